#pragma once

#include "oretile/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oretile {

using VertexSet = std::vector<int>;

inline constexpr int max_order = 4096;

/// Simple undirected graph on vertices 0..n-1, stored as bit rows.
class Graph {
public:
    Graph() = default;
    explicit Graph(int n);

    int order() const { return n_; }
    std::size_t edge_count() const;

    bool adjacent(int u, int v) const
    {
        return (rows_[idx(u) + (v >> 6)] >> (v & 63)) & 1U;
    }
    void add_edge(int u, int v);
    void remove_edge(int u, int v);

    int degree(int v) const;
    int degree_into(int v, const VertexSet& set) const;
    VertexSet neighbors(int v) const;
    std::vector<std::pair<int, int>> edges() const;

    const std::uint64_t* row(int v) const { return rows_.data() + idx(v); }
    int words() const { return words_; }

    Graph induced(const VertexSet& vertices) const;
    bool is_clique(const VertexSet& vertices) const;
    bool operator==(const Graph& other) const = default;

private:
    std::size_t idx(int v) const { return static_cast<std::size_t>(v) * words_; }
    void check_vertex(int v) const;

    int n_ = 0;
    int words_ = 0;
    std::vector<std::uint64_t> rows_;
};

/// Loopless directed graph on vertices 0..n-1.
class Digraph {
public:
    Digraph() = default;
    explicit Digraph(int n);

    int order() const { return n_; }
    bool has_arc(int u, int v) const { return out_[u][v] != 0; }
    void add_arc(int u, int v);
    const VertexSet& out_neighbors(int v) const { return succ_[v]; }
    VertexSet in_neighbors(int v) const;
    int out_degree(int v) const { return static_cast<int>(succ_[v].size()); }
    int min_out_degree() const;
    std::size_t arc_count() const;

private:
    int n_ = 0;
    std::vector<std::vector<char>> out_;
    std::vector<VertexSet> succ_;
};

struct ClusterMap {
    std::vector<VertexSet> clusters;
    Graph reduced;
    // densities[i][j] is the realized pair density; zero off the reduced graph.
    std::vector<std::vector<Rational>> densities;
};

struct OreReport {
    std::optional<long long> min_sum; // empty means +infinity (G complete)
    std::optional<std::pair<int, int>> witness_pair;
    Rational threshold;
    std::optional<Rational> margin; // empty means +infinity
};

struct RegularityWitness {
    VertexSet x;
    VertexSet y;
    Rational deviation; // |d(X,Y) - d(A,B)|
};

struct DegreeViolations {
    VertexSet in_a; // a in A with deg_B(a) <= d|B|
    VertexSet in_b; // b in B with deg_A(b) <= d|A|
    bool empty() const { return in_a.empty() && in_b.empty(); }
};

Graph complement(const Graph& g);
Graph complete_multipartite(const std::vector<int>& sizes);
Graph complete_graph(int n);
Graph cycle_graph(int n);
Graph path_graph(int n);
Graph petersen_graph();
Graph disjoint_union(const Graph& a, const Graph& b);

Graph random_graph(int n, const Rational& p, std::uint64_t seed);
std::pair<Graph, ClusterMap> blowup_instance(const Graph& reduced, int cluster_size,
                                             const Rational& d_lo, std::uint64_t seed);

// Ore statistics against an explicit critical chromatic number.
OreReport ore_report_for(const Graph& g, const Rational& chi_cr);
OreReport ore_report(const Graph& g, const Graph& h);

long long edges_between(const Graph& g, const VertexSet& a, const VertexSet& b);
Rational density(const Graph& g, const VertexSet& a, const VertexSet& b);

inline constexpr int refute_exhaustive_cap = 16;

std::optional<RegularityWitness> refute_regularity(const Graph& g, const VertexSet& a,
                                                   const VertexSet& b, const Rational& eps,
                                                   long long budget, std::uint64_t seed);

DegreeViolations super_regular_degree_check(const Graph& g, const VertexSet& a,
                                            const VertexSet& b, const Rational& d);

inline constexpr int enumeration_order_cap = 9;

// Canonical upper-triangle code; equal iff the graphs are isomorphic (n <= 11).
std::uint64_t canonical_code(const Graph& g);
// One representative per isomorphism class on n vertices, n <= 9.
std::vector<Graph> nonisomorphic_graphs(int n);

Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);
Digraph read_digraph(std::istream& in);
Digraph read_digraph_file(const std::string& path);
void write_digraph(std::ostream& out, const Digraph& d);

} // namespace oretile
