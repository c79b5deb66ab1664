#pragma once

#include "oretile/graph.hpp"
#include "oretile/rational.hpp"

#include <map>
#include <utility>
#include <vector>

namespace oretile {

// Arc (from, to): `to` sits in factor element `element` and `from` is adjacent in R to every
// other cluster of that element.
struct ArcWitness {
    int from = -1;
    int to = -1;
    int element = -1;
    VertexSet adjacent; // the other clusters of the element, each adjacent to `from`
};

struct TransferDigraph {
    Digraph d;
    std::vector<VertexSet> factor;
    std::vector<int> element_of;           // -1 for clusters outside the factor
    std::vector<char> self_arc;            // (U, U) would be an arc; kept out of d
    std::map<std::pair<int, int>, ArcWitness> witnesses;

    int order() const { return d.order(); }
    // out-degree counting the self arc, as in the degree counting over factor elements
    int out_degree_with_self(int u) const { return d.out_degree(u) + (self_arc[u] ? 1 : 0); }
};

TransferDigraph build_digraph(const Graph& r, const std::vector<VertexSet>& factor);

// Re-derives every arc and witness from R; throws LemmaViolation on any mismatch.
void verify_digraph(const Graph& r, const TransferDigraph& t);

// Vertices with a directed path to v (v included).
VertexSet source_set(const Digraph& d, int v);

struct SinkRound {
    int chosen = -1;
    int removed = 0;           // |W(chosen)| in the remaining digraph
    int remaining_min_out = 0; // min out-degree of the remaining digraph before the round
};

struct SinkSetResult {
    VertexSet sinks; // in selection order
    std::vector<SinkRound> rounds;
    int min_out_degree = 0;
};

// Pick a vertex with the largest source set (smallest id on ties), delete its source set, repeat.
// Every round must delete at least min_out_degree + 1 vertices; a shortfall is a LemmaViolation.
SinkSetResult sink_set_greedy(const Digraph& d);

Digraph induced_subdigraph(const Digraph& d, const VertexSet& keep);

enum class DegreeCase { general, balanced };

struct OutDegreeParams {
    Rational gamma; // general case only
    Rational d;
    Rational eps;
};

struct OutDegreeCheck {
    bool hypothesis = false;  // degree condition on U (and the side conditions) holds
    Rational degree_fraction; // weighted d_R(U) / |V(R)|
    Rational threshold;
    int out_degree = 0;       // including the self arc
    Rational bound;           // required out-degree
    bool holds = false;       // meaningful only when hypothesis is true
};

// weights: relative cluster sizes (empty means all equal).
OutDegreeCheck out_degree_check(const Graph& r, const TransferDigraph& t, int u, const OutDegreeParams& params,
                                DegreeCase c, const std::vector<Rational>& weights = {});

// Weights 1 for the first k-1 clusters of every element and alpha' for the last.
std::vector<Rational> factor_weights(int n, const std::vector<VertexSet>& factor, const Rational& alpha_prime);

Rational degree_threshold(int k, DegreeCase c, const OutDegreeParams& params);

struct LowDegreeSplit {
    VertexSet low;       // weighted degree below the threshold
    bool low_is_clique = false;
    VertexSet reach_low; // union of the source sets of the low clusters
    VertexSet high_part; // everything else; closed under out-arcs
};

LowDegreeSplit split_low_degree(const Graph& r, const TransferDigraph& t, const Rational& threshold,
                                const std::vector<Rational>& weights = {});

struct Transfer {
    VertexSet path; // cluster ids, ending at a sink
    long long amount = 0;
};

struct TransferPlan {
    std::vector<Transfer> transfers;
    std::vector<long long> residual; // extras per cluster after the transfers
    std::map<std::pair<int, int>, long long> arc_load;
    VertexSet unreachable; // clusters with extras and no path to a sink
};

// Shortest paths (breadth first from the sinks over reversed arcs, smallest id next hop).
// max_per_path > 0 splits a cluster's extras into chunks of at most that size.
TransferPlan plan_transfers(const Digraph& d, const std::vector<long long>& extras, const VertexSet& sinks,
                            long long max_per_path = 0);

} // namespace oretile
