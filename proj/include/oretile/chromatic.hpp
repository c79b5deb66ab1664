#pragma once

#include "oretile/graph.hpp"
#include "oretile/rational.hpp"

#include <vector>

namespace oretile {

inline constexpr int coloring_order_cap = 24;
inline constexpr long long default_coloring_budget = 50'000'000;

struct ColoringProfile {
    int chi = 0;
    int sigma = 0;
    // One ascending size tuple per optimal coloring, deduplicated and sorted.
    std::vector<std::vector<int>> optimal_class_size_multisets;
};

struct BottleSpec {
    int k = 0;
    int sigma = 0;
    int omega = 0;
    Rational alpha;
    Rational chi_cr;
    std::vector<Rational> color_vector;
};

struct BottleResult {
    BottleSpec spec;
    Graph graph;
    std::vector<VertexSet> factor; // an H-factor of graph
    bool from_shift_construction = false;
    // Other bottles of the same minimal order with the required color vector.
    std::vector<BottleSpec> minimal_candidates;
};

int clique_number(const Graph& g);
int chromatic_number(const Graph& h, long long budget = default_coloring_budget);

// A proper coloring with chromatic_number(h) colors; color[v] in [0, chi).
std::vector<int> optimal_coloring(const Graph& h, long long budget = default_coloring_budget);

// An optimal coloring whose color 0 has exactly sigma(h) vertices.
std::vector<int> smallest_class_coloring(const Graph& h,
                                         long long budget = default_coloring_budget);

ColoringProfile smallest_color_class(const Graph& h, long long budget = default_coloring_budget);

Rational chi_critical(const Graph& h);
Rational chi_critical(int chi, int sigma, int order);

BottleSpec bottle_spec(int k, int sigma, int omega);
Graph bottle_graph(int k, int sigma, int omega);
BottleResult bottle_of(const Graph& h, long long tiling_budget = 2'000'000);

Rational gamma_param(int k, const Rational& alpha);
Rational ore_threshold(const Graph& h, int n);
Rational ore_threshold_for(const Rational& chi_cr, int n);

} // namespace oretile
