#pragma once

#include "oretile/bounds.hpp"
#include "oretile/chromatic.hpp"
#include "oretile/graph.hpp"
#include "oretile/rational.hpp"
#include "oretile/tiling.hpp"
#include "oretile/transfer.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oretile {

// Pattern graph with an optimal coloring whose color 0 is a smallest class.
struct HProfile {
    Graph h;
    int k = 0;
    int sigma = 0;
    int omega = 0;
    std::vector<int> coloring;    // per vertex of h
    std::vector<int> class_sizes; // class_sizes[0] = sigma
    Rational alpha;               // sigma / omega
    BottleSpec spec;
    bool balanced = false;        // sigma == omega
    int order() const { return h.order(); }
};

HProfile h_profile(const Graph& h);

// Leftover bound for the applicable case (balanced when sigma == omega).
Integer pipeline_leftover_bound(const HProfile& hp);

struct PipelineConfig {
    Rational d = Rational(1, 10);
    Rational eps = Rational(1, 100);
    Rational theta = Rational(1, 1000); // theta_1 = sqrt(theta), compared through squares
    long long exact_budget = 200'000;
    int exact_cap = 60; // residuals up to this many vertices go to the exact solver
    int embed_retries = 60;
    int cleanup_rounds = 4;
    std::uint64_t seed = 1;
};

// Generated blow-up: elements of k clusters (the last one is the small cluster of size alpha' L
// in the general case), dense pairs along the reduced graph, and a few exceptional vertices.
struct BlowupSpec {
    int k = 3;
    int elements = 4;
    int L = 100;
    Rational alpha_prime = Rational(1); // 1 gives a balanced factor
    Rational density = Rational(9, 10);
    Rational cross_drop = Rational(1, 5); // chance that a pair of clusters in different elements is absent
    int exceptional = 1;
    bool low_degree_exceptional = false;  // make the last exceptional vertex fall below the split
    int planted_bad = 0;                  // cluster vertices that lose their neighbours in one sibling
    std::uint64_t seed = 1;
};

struct BlowupInstance {
    Graph g;
    ClusterMap map;
    std::vector<VertexSet> factor; // cluster ids, small cluster last
    VertexSet v0;
    Rational min_pair_density;
};

BlowupInstance gen_blowup_instance(const BlowupSpec& spec, const HProfile& hp);

struct TilingState {
    Graph g;
    Graph reduced;
    std::vector<VertexSet> clusters; // current members (vertices moved out are dropped)
    std::vector<VertexSet> factor;
    std::vector<char> used;          // covered by a removed copy
    std::vector<VertexSet> copies;   // removed copies of H
    VertexSet uncovered_exceptional; // exceptional vertices nobody could take
    std::vector<int> selections;     // Phase I selections per element
};

struct InsertionStep {
    int vertex = -1;
    int element = -1;
    int cluster = -1;         // cluster whose color class took the vertex
    Rational availability;    // fraction of elements meeting the adjacency rule
    Rational unavailable;     // fraction of elements at the selection cap
    int round = 0;            // 0 for the original exceptional set, then cleanup rounds
};

struct Phase1Report {
    VertexSet low;            // below the degree split, tiled as a clique
    VertexSet high;
    bool low_is_clique = true;
    int low_copies = 0;
    VertexSet low_left;
    std::vector<InsertionStep> steps;
    Rational availability_floor; // alpha/2 general, 1/3 balanced
    Rational min_availability = Rational(1);
    long long cap = 0;           // ceil(theta_1 L_1)
    int max_selections = 0;
    VertexSet cleanup_moved;
    int cleanup_rounds = 0;
};

TilingState initial_state(const Graph& g, const ClusterMap& map, const std::vector<VertexSet>& factor);

// Throws LemmaViolation when no available element can take a vertex or a measured availability
// falls below the floor; PreconditionError when |V0| > theta n.
Phase1Report phase1_insert(TilingState& state, const VertexSet& v0, const HProfile& hp, const PipelineConfig& cfg);

// Class-count plan for one element: copies[p] copies put the smallest class in position p.
struct ElementPlan {
    std::vector<long long> sizes;
    std::vector<long long> copies;
    std::vector<long long> leftover; // a_i
    long long total_copies = 0;
    long long total_leftover = 0;
    long long imbalance = 0; // sum |a_i - omega|
};

// Most copies, then smallest imbalance, then lexicographically largest copies vector.
ElementPlan best_element_plan(const std::vector<long long>& sizes, const HProfile& hp);

struct Phase2Report {
    std::vector<ElementPlan> plans;
    std::vector<long long> extras; // per cluster
    VertexSet low_clusters;
    bool low_is_clique = true;
    VertexSet sinks;
    std::vector<SinkRound> sink_rounds;
    TransferPlan transfer;
    long long transfer_copies = 0;
    long long transfer_failures = 0;
    std::vector<ElementPlan> final_plans;
    long long planned_final_leftover = 0; // sum of the final plans
    long long residual_exact_copies = 0;
    TilingResult result;                  // all copies of both phases and the uncovered vertices
    Integer bound;
    bool within_bound = false;
};

Phase2Report phase2_transfer(TilingState& state, const HProfile& hp, const PipelineConfig& cfg);

struct PipelineReport {
    Phase1Report phase1;
    Phase2Report phase2;
    long long leftover = 0;
    Integer bound;
    bool copies_verified = false;
    bool pass = false;
};

PipelineReport run_pipeline(const BlowupInstance& inst, const HProfile& hp, const PipelineConfig& cfg);

// Every copy is a copy of H in g and copies are disjoint.
bool verify_copies(const Graph& g, const Graph& h, const std::vector<VertexSet>& copies);

enum class InstanceKind { ore_random, near_threshold, space_barrier };

std::string to_string(InstanceKind kind);

Graph gen_extremal_instance(const Graph& h, int n, InstanceKind kind, std::uint64_t seed);
// Random graph repaired by adding edges between nonadjacent pairs of least degree sum until the
// Ore margin reaches `margin`.
Graph gen_ore_instance(const Graph& h, int n, long long margin, std::uint64_t seed);

struct ExperimentRow {
    std::string kind;
    int n = 0;
    std::uint64_t seed = 0;
    std::string margin; // rational, or "inf" for complete graphs
    long long leftover = 0;
    bool optimal = false;
    bool pass = false;
};

struct ExperimentReport {
    std::string pattern;
    std::vector<ExperimentRow> rows;
    std::map<int, long long> max_leftover;
    Rational slope;
    Integer bound;
    long long matching_cap = -1; // 1 for K_2, otherwise unused
    bool pass = false;
};

ExperimentReport run_theorem_experiment(const Graph& h, const std::string& name, const std::vector<int>& n_grid,
                                        int trials, std::uint64_t seed, long long budget = 2'000'000);

// Seeded blow-up runs: L drawn from [L_min, L_max], enough elements that |V0| <= theta n.
struct PipelineBatchSpec {
    int runs = 20;
    int L_min = 100;
    int L_max = 300;
    Rational mu = Rational(1, 10); // alpha' = alpha + alpha(1 - alpha) mu / k^2 in the general case
    Rational density = Rational(9, 10);
    Rational cross_drop = Rational(1, 5);
    int exceptional = 1;
    int planted_bad = 2;
    std::uint64_t seed = 1;
    PipelineConfig cfg;
};

struct PipelineRun {
    std::uint64_t seed = 0;
    int L = 0;
    int elements = 0;
    int n = 0;
    int exceptional = 0;
    Rational alpha_prime;
    Rational min_pair_density;
    Rational min_availability;
    Rational availability_floor;
    int insertions = 0;
    int max_selections = 0;
    long long cap = 0;
    int cleanup_moved = 0;
    long long transfer_copies = 0;
    long long transfer_failures = 0;
    long long leftover = 0;
    Integer bound;
    bool pass = false;
    std::string error; // what() of a LemmaViolation, empty otherwise
};

struct PipelineBatch {
    std::string pattern;
    int k = 0;
    bool balanced = false;
    std::vector<PipelineRun> runs;
    long long max_leftover = 0;
    bool pass = false;
};

PipelineBatch run_pipeline_batch(const Graph& h, const std::string& name, const PipelineBatchSpec& spec);

// Least squares slope of y against x.
Rational fitted_slope(const std::vector<std::pair<Rational, Rational>>& points);

} // namespace oretile
