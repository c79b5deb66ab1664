#pragma once

#include "oretile/graph.hpp"
#include "oretile/rational.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace oretile {

struct Star {
    int center = -1;
    VertexSet leaves;
};

struct StarPacking {
    int t = 0;
    std::vector<Star> stars;
    bool optimal = false;
    long long nodes_explored = 0;
};

struct ComplementMatching {
    bool perfect = false;
    std::vector<std::pair<int, int>> pairs; // (a, b) with a in A, b in B, nonadjacent in G
    VertexSet violator;                     // S subset of A when not perfect
    VertexSet violator_neighbors;           // B-vertices nonadjacent to some vertex of S
};

struct CopyMatching {
    std::vector<std::pair<int, int>> pairs; // (left index, right index)
    std::vector<int> unmatched_left;
    std::vector<int> unmatched_right;
    long long predicate_calls = 0;
};

// Maximum matching (blossom algorithm); mate[v] is the partner of v or -1.
std::vector<int> maximum_matching(const Graph& g, long long* phases = nullptr);

StarPacking max_star_packing(const Graph& g, int t, long long budget);
StarPacking greedy_star_packing(const Graph& g, int t);
Rational star_bound(long long u1_size, long long delta_h, long long max_degree, int t,
                    const Rational& eps1);

ComplementMatching complement_perfect_matching(const Graph& g, const VertexSet& a,
                                               const VertexSet& b);

CopyMatching match_copies(const std::vector<VertexSet>& left, const std::vector<VertexSet>& right,
                          const std::function<bool(const VertexSet&, const VertexSet&)>& compatible);

} // namespace oretile
