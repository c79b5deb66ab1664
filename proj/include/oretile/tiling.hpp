#pragma once

#include "oretile/graph.hpp"
#include "oretile/rational.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace oretile {

inline constexpr int copy_order_cap = 12;

struct TilingResult {
    std::vector<VertexSet> copies;
    VertexSet leftover;
    bool optimal = false;
    long long nodes_explored = 0;
};

struct CopyList {
    std::vector<VertexSet> copies; // sorted vertex sets in lexicographic order
    bool truncated = false;
};

enum class Verdict { yes, no, unknown };

// True iff h is isomorphic to a spanning subgraph of g (same order).
bool contains_spanning(const Graph& g, const Graph& h);
// True iff g[s] contains h as a spanning subgraph.
bool hosts_copy(const Graph& g, const VertexSet& s, const Graph& h);

CopyList enumerate_copies(const Graph& g, const Graph& h, long long limit);

TilingResult max_tiling(const Graph& g, const Graph& h, long long budget);
TilingResult greedy_tiling(const Graph& g, const Graph& h, std::uint64_t seed);
Verdict has_factor(const Graph& g, const Graph& h, long long budget);

// K_k-tiling via padding with universal vertices; leaves at most k(k-1)s + (k-1)^2 uncovered.
TilingResult kk_tiling_padded(const Graph& g, int k, int s, long long budget = 5'000'000);
// Fractional slack: pads with the least integer >= ks that makes the order divisible by k.
TilingResult kk_tiling_padded(const Graph& g, int k, const Rational& s, long long budget = 5'000'000);
long long padded_leftover_bound(int k, int s);
Rational padded_leftover_bound(int k, const Rational& s);

std::optional<VertexSet> embed_in_clusters(const Graph& g, const std::vector<VertexSet>& clusters,
                                           const Graph& h, int small_class_position,
                                           std::uint64_t seed, int retries = 200);

} // namespace oretile
