#include "doctest.h"

#include "catalog.hpp"
#include "oretile/errors.hpp"
#include "oretile/packing.hpp"

#include <algorithm>
#include <functional>

using namespace oretile;

namespace {

// Exhaustive maximum number of disjoint t-stars.
int brute_star_count(const Graph& g, int t)
{
    const int n = g.order();
    std::vector<std::vector<int>> stars;
    for (int c = 0; c < n; ++c) {
        auto nb = g.neighbors(c);
        std::vector<int> pick;
        std::function<void(std::size_t)> rec = [&](std::size_t from) {
            if (static_cast<int>(pick.size()) == t) {
                auto s = pick;
                s.push_back(c);
                stars.push_back(s);
                return;
            }
            for (std::size_t i = from; i < nb.size(); ++i) {
                pick.push_back(nb[i]);
                rec(i + 1);
                pick.pop_back();
            }
        };
        rec(0);
    }
    std::vector<char> used(n, 0);
    int best = 0;
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int count) {
        best = std::max(best, count);
        for (std::size_t j = i; j < stars.size(); ++j) {
            if (std::any_of(stars[j].begin(), stars[j].end(), [&](int v) { return used[v]; }))
                continue;
            for (int v : stars[j])
                used[v] = 1;
            rec(j + 1, count + 1);
            for (int v : stars[j])
                used[v] = 0;
        }
    };
    rec(0, 0);
    return best;
}

void check_packing(const Graph& g, const StarPacking& p)
{
    std::vector<char> used(g.order(), 0);
    for (const auto& s : p.stars) {
        CHECK(static_cast<int>(s.leaves.size()) == p.t);
        CHECK(! used[s.center]);
        used[s.center] = 1;
        for (int l : s.leaves) {
            CHECK(g.adjacent(s.center, l));
            CHECK(! used[l]);
            used[l] = 1;
        }
    }
}

int residual_max_degree(const Graph& g, const StarPacking& p)
{
    std::vector<char> used(g.order(), 0);
    for (const auto& s : p.stars) {
        used[s.center] = 1;
        for (int l : s.leaves)
            used[l] = 1;
    }
    int worst = 0;
    for (int v = 0; v < g.order(); ++v) {
        if (used[v])
            continue;
        int d = 0;
        for (int u : g.neighbors(v))
            d += ! used[u];
        worst = std::max(worst, d);
    }
    return worst;
}

Graph perfect_matching_graph(int pairs)
{
    Graph g(2 * pairs);
    for (int i = 0; i < pairs; ++i)
        g.add_edge(2 * i, 2 * i + 1);
    return g;
}

} // namespace

TEST_CASE("maximum star packing examples")
{
    auto pm = max_star_packing(perfect_matching_graph(5), 1, 1000);
    CHECK(pm.stars.size() == 5);
    CHECK(pm.optimal);
    CHECK(max_star_packing(testing_catalog::star(5), 5, 1000).stars.size() == 1);
    REQUIRE(brute_star_count(cycle_graph(6), 2) == 2);
    auto c6 = max_star_packing(cycle_graph(6), 2, 1000);
    CHECK(c6.stars.size() == 2);
    CHECK(c6.optimal);
    check_packing(cycle_graph(6), c6);
    CHECK_THROWS_AS(max_star_packing(cycle_graph(6), 0, 10), PreconditionError);
}

TEST_CASE("maximum star packing agrees with exhaustive search")
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        int n = 4 + static_cast<int>(seed % 6);
        int t = 1 + static_cast<int>(seed % 3);
        Graph g = random_graph(n, rat(1, 2), seed);
        auto p = max_star_packing(g, t, 1'000'000);
        REQUIRE(p.optimal);
        check_packing(g, p);
        CHECK(static_cast<int>(p.stars.size()) == brute_star_count(g, t));
    }
}

TEST_CASE("greedy star packing is maximal")
{
    auto s7 = greedy_star_packing(testing_catalog::star(7), 3);
    CHECK(s7.stars.size() == 1);
    CHECK(greedy_star_packing(Graph(9), 2).stars.empty());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Graph g = random_graph(40, rat(1, 2), seed);
        for (int t : {1, 2, 4}) {
            auto p = greedy_star_packing(g, t);
            check_packing(g, p);
            CHECK(residual_max_degree(g, p) <= t - 1);
        }
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Graph g = random_graph(8, rat(1, 2), seed);
        CHECK(static_cast<int>(greedy_star_packing(g, 2).stars.size()) <= brute_star_count(g, 2));
    }
}

TEST_CASE("star bound")
{
    // Perfect matching on 2m vertices: bound m/2, optimum m.
    for (int m = 1; m <= 6; ++m) {
        Rational b = star_bound(2 * m, 1, 1, 1, rat(0));
        CHECK(b == Rational(m, 2));
        CHECK(Rational(static_cast<long long>(
                  max_star_packing(perfect_matching_graph(m), 1, 100).stars.size())) >= b);
    }
    CHECK(star_bound(10, 1, 3, 2, rat(0)) <= 0);
    CHECK_THROWS_AS(star_bound(10, 3, 0, 1, rat(0)), PreconditionError);
    CHECK(star_bound(20, 5, 6, 2, rat(1, 10)) == Rational(4 * 8 * 20, 10 * 2 * 3 * 6));
}

TEST_CASE("greedy packing meets the star bound when its hypotheses hold")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        int n = 12 + static_cast<int>(seed % 30);
        int t = 1 + static_cast<int>(seed % 3);
        Graph g = random_graph(n, Rational(1 + static_cast<long long>(seed % 4), 8), seed);
        int max_deg = 0;
        for (int v = 0; v < n; ++v)
            max_deg = std::max(max_deg, g.degree(v));
        if (max_deg == 0)
            continue;
        // High-degree vertices: degree at least the median.
        std::vector<int> degs;
        for (int v = 0; v < n; ++v)
            degs.push_back(g.degree(v));
        std::sort(degs.begin(), degs.end());
        int delta = degs[n / 2];
        long long high = std::count_if(degs.begin(), degs.end(), [&](int d) { return d >= delta; });
        Rational eps1 = Rational(n - high, 2 * n);
        auto p = greedy_star_packing(g, t);
        CHECK(Rational(static_cast<long long>(p.stars.size())) >= star_bound(n, delta, max_deg, t, eps1));
    }
}

TEST_CASE("complement perfect matching")
{
    Graph empty(6);
    auto id = complement_perfect_matching(empty, {0, 1, 2}, {3, 4, 5});
    CHECK(id.perfect);
    CHECK(id.pairs == std::vector<std::pair<int, int>>{{0, 3}, {1, 4}, {2, 5}});

    Graph full = complete_multipartite({3, 3});
    auto v = complement_perfect_matching(full, {0, 1, 2}, {3, 4, 5});
    CHECK(! v.perfect);
    CHECK(v.violator == VertexSet{0});
    CHECK(v.violator_neighbors.empty());

    // Cycle 1-2-3-4-5 on labels 1..5 (vertex 0 unused).
    Graph c(6);
    for (int i = 1; i <= 5; ++i)
        c.add_edge(i, i % 5 + 1);
    auto m = complement_perfect_matching(c, {1, 2}, {3, 4});
    REQUIRE(m.perfect);
    for (auto [x, y] : m.pairs)
        CHECK(! c.adjacent(x, y));
    CHECK_THROWS_AS(complement_perfect_matching(c, {1, 2}, {3}), PreconditionError);
    CHECK_THROWS_AS(complement_perfect_matching(c, {1, 2}, {2, 3}), PreconditionError);
}

TEST_CASE("Hall violators are genuine")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        int m = 1 + static_cast<int>(seed % 6);
        Graph g = random_graph(2 * m, rat(2, 3), seed);
        VertexSet a, b;
        for (int i = 0; i < m; ++i) {
            a.push_back(i);
            b.push_back(m + i);
        }
        auto r = complement_perfect_matching(g, a, b);
        if (r.perfect) {
            std::vector<char> used(2 * m, 0);
            for (auto [x, y] : r.pairs) {
                CHECK(! g.adjacent(x, y));
                CHECK(! used[x]);
                CHECK(! used[y]);
                used[x] = used[y] = 1;
            }
            continue;
        }
        VertexSet nbhd;
        for (int y : b)
            for (int x : r.violator)
                if (! g.adjacent(x, y)) {
                    nbhd.push_back(y);
                    break;
                }
        CHECK(nbhd == r.violator_neighbors);
        CHECK(nbhd.size() < r.violator.size());
    }
}

TEST_CASE("copy matching")
{
    std::vector<VertexSet> left{{0}, {1}, {2}}, right{{3}, {4}, {5}};
    auto all = match_copies(left, right, [](const VertexSet&, const VertexSet&) { return true; });
    CHECK(all.pairs.size() == 3);
    CHECK(all.unmatched_left.empty());
    auto none = match_copies(left, right, [](const VertexSet&, const VertexSet&) { return false; });
    CHECK(none.pairs.empty());
    CHECK(none.unmatched_left.size() == 3);
    CHECK(none.unmatched_right.size() == 3);
    CHECK(none.predicate_calls == 9);

    // Left copies are single vertices; compatible when adjacent to every vertex of the right copy.
    auto [g, map] = blowup_instance(complete_graph(3), 12, rat(1), 2);
    std::vector<VertexSet> lefts, rights;
    for (int v : map.clusters[0])
        lefts.push_back({v});
    for (int i = 0; i < 12; ++i)
        rights.push_back({map.clusters[1][i], map.clusters[2][i]});
    auto cm = match_copies(lefts, rights, [&](const VertexSet& l, const VertexSet& r) {
        return std::all_of(r.begin(), r.end(), [&](int x) { return g.adjacent(l[0], x); });
    });
    CHECK(cm.pairs.size() == 12);
    for (auto [i, j] : cm.pairs)
        for (int x : rights[j])
            CHECK(g.adjacent(lefts[i][0], x));
}
