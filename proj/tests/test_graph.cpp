#include "doctest.h"

#include "oretile/chromatic.hpp"
#include "oretile/graph.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace oretile;

namespace {

// Independent pair scan used as the oracle for ore_report.
long long brute_min_sum(const Graph& g)
{
    long long best = -1;
    for (int u = 0; u < g.order(); ++u)
        for (int v = 0; v < g.order(); ++v) {
            if (u == v || g.adjacent(u, v))
                continue;
            long long du = 0, dv = 0;
            for (int w = 0; w < g.order(); ++w) {
                du += g.adjacent(u, w);
                dv += g.adjacent(v, w);
            }
            if (best < 0 || du + dv < best)
                best = du + dv;
        }
    return best;
}

} // namespace

TEST_CASE("complement of small graphs")
{
    CHECK(complement(complete_graph(3)).edge_count() == 0);
    CHECK(complement(Graph(4)) == complete_graph(4));

    // C5 complement is the pentagram; relabel i -> 2i mod 5 gives back the cycle.
    Graph c = complement(cycle_graph(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j) {
                int diff = ((i - j) % 5 + 5) % 5;
                CHECK(c.adjacent(i, j) == (diff == 2 || diff == 3));
                CHECK(c.adjacent((2 * i) % 5, (2 * j) % 5) == (diff == 1 || diff == 4));
            }
}

TEST_CASE("complement is an involution")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Graph g = random_graph(static_cast<int>(seed % 17) + 1, rat(1, 3), seed);
        CHECK(complement(complement(g)) == g);
    }
}

TEST_CASE("complete multipartite graphs")
{
    CHECK(complete_multipartite({2, 2, 2}).edge_count() == 12);
    CHECK(complete_multipartite({1, 2, 2}).edge_count() == 8);
    Graph five = complete_multipartite({5});
    CHECK(five.order() == 5);
    CHECK(five.edge_count() == 0);
    CHECK_THROWS_AS(complete_multipartite({}), std::invalid_argument);
    CHECK_THROWS_AS(complete_multipartite({2, 0}), std::invalid_argument);
}

TEST_CASE("graph order cap")
{
    CHECK_NOTHROW(Graph(4096));
    CHECK_THROWS_AS(Graph(4097), std::invalid_argument);
    Graph g(3);
    CHECK_THROWS_AS(g.add_edge(1, 1), std::invalid_argument);
}

TEST_CASE("random graph extremes and edge statistics")
{
    CHECK(random_graph(10, rat(0), 1).edge_count() == 0);
    CHECK(random_graph(10, rat(1), 1) == complete_graph(10));
    CHECK(random_graph(20, rat(1, 2), 5) == random_graph(20, rat(1, 2), 5));

    // Binomial(1225, 1/2): mean 612.5, sd 17.5.
    double sum = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto m = static_cast<double>(random_graph(50, rat(1, 2), 7 + seed).edge_count());
        CHECK(std::abs(m - 612.5) <= 4 * 17.5);
        sum += m;
    }
    CHECK(std::abs(sum / 100 - 612.5) <= 4 * 17.5 / 10);
    CHECK_THROWS(random_graph(5, rat(3, 2), 1));
}

TEST_CASE("blow-up instances")
{
    auto [g, map] = blowup_instance(complete_graph(2), 3, rat(1), 1);
    CHECK(g == complete_multipartite({3, 3}));
    CHECK(map.clusters.size() == 2);
    CHECK(map.densities[0][1] == 1);

    auto [single, smap] = blowup_instance(Graph(1), 5, rat(1, 2), 1);
    CHECK(single.order() == 5);
    CHECK(single.edge_count() == 0);

    auto [tri, tmap] = blowup_instance(complete_graph(3), 100, parse_rational("0.9"), 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) {
                CHECK(tmap.densities[i][j] >= parse_rational("0.9"));
                CHECK(density(tri, tmap.clusters[i], tmap.clusters[j]) == tmap.densities[i][j]);
            }
}

TEST_CASE("blow-up edges respect the reduced graph")
{
    Graph r = cycle_graph(5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto [g, map] = blowup_instance(r, 12, rat(3, 4), seed);
        for (auto [u, v] : g.edges())
            CHECK(r.adjacent(u / 12, v / 12));
        for (auto [i, j] : r.edges())
            CHECK(density(g, map.clusters[i], map.clusters[j]) >= rat(3, 4));
    }
}

TEST_CASE("reduced graph keeps an Ore-type bound on blow-ups")
{
    // R = C4; for nonadjacent clusters d_R sums to 4 >= (C - 2d - 4 eps)|R|.
    Graph r = cycle_graph(4);
    auto [g, map] = blowup_instance(r, 20, parse_rational("0.9"), 11);
    auto rep = ore_report_for(g, rat(2));
    Rational c = Rational(*rep.min_sum) / g.order();
    Rational d = rat(1, 10), eps = rat(1, 100);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (! r.adjacent(i, j))
                CHECK(Rational(r.degree(i) + r.degree(j)) >= (c - 2 * d - 4 * eps) * 4);
}

TEST_CASE("ore report")
{
    auto c5 = ore_report(cycle_graph(5), complete_graph(3));
    REQUIRE(c5.min_sum.has_value());
    CHECK(*c5.min_sum == 4);
    CHECK(c5.threshold == rat(20, 3));
    CHECK(*c5.margin == rat(-8, 3));
    CHECK(! cycle_graph(5).adjacent(c5.witness_pair->first, c5.witness_pair->second));

    auto k6 = ore_report(complete_graph(6), complete_graph(3));
    CHECK(! k6.min_sum.has_value());
    CHECK(! k6.margin.has_value());

    auto oct = ore_report(complete_multipartite({2, 2, 2}), complete_graph(3));
    CHECK(*oct.min_sum == 8);
    CHECK(oct.threshold == 8);
    CHECK(*oct.margin == 0);
}

TEST_CASE("ore report minimum matches exhaustive scan")
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        int n = 2 + static_cast<int>(seed * 5 % 60);
        Graph g = random_graph(n, rat(2, 3), seed);
        auto rep = ore_report_for(g, rat(3));
        long long oracle = brute_min_sum(g);
        if (oracle < 0) {
            CHECK(! rep.min_sum);
            continue;
        }
        REQUIRE(rep.min_sum);
        CHECK(*rep.min_sum == oracle);
        auto [x, y] = *rep.witness_pair;
        CHECK(! g.adjacent(x, y));
        CHECK(g.degree(x) + g.degree(y) == oracle);
    }
}

TEST_CASE("pair density")
{
    Graph kb = complete_multipartite({3, 4});
    CHECK(density(kb, {0, 1, 2}, {3, 4, 5, 6}) == 1);
    CHECK(density(Graph(4), {0, 1}, {2, 3}) == 0);
    CHECK(density(cycle_graph(4), {0, 2}, {1, 3}) == 1);
    CHECK_THROWS_AS(density(kb, {}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(density(kb, {0, 1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("regularity refutation")
{
    Graph kb = complete_multipartite({4, 4});
    CHECK(! refute_regularity(kb, {0, 1, 2, 3}, {4, 5, 6, 7}, rat(1, 10), 0, 1));

    // A1={0,1}, A2={2,3}, B1={4,5}, B2={6,7}; A1-B1 and A2-B2 complete.
    Graph g(8);
    for (int a : {0, 1})
        for (int b : {4, 5})
            g.add_edge(a, b);
    for (int a : {2, 3})
        for (int b : {6, 7})
            g.add_edge(a, b);
    auto w = refute_regularity(g, {0, 1, 2, 3}, {4, 5, 6, 7}, rat(1, 4), 0, 1);
    REQUIRE(w);
    CHECK(w->x == VertexSet{0, 1});
    CHECK(w->y == VertexSet{4, 5});
    CHECK(w->deviation == rat(1, 2));
}

TEST_CASE("regularity witnesses satisfy size and deviation inequalities")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        int half = 3 + static_cast<int>(seed % 10);
        Graph g = random_graph(2 * half, rat(1, 2), seed);
        VertexSet a, b;
        for (int v = 0; v < half; ++v) {
            a.push_back(v);
            b.push_back(half + v);
        }
        Rational eps = rat(1, 5);
        auto w = refute_regularity(g, a, b, eps, 500, seed);
        if (! w)
            continue;
        CHECK(Rational(static_cast<long long>(w->x.size())) > eps * half);
        CHECK(Rational(static_cast<long long>(w->y.size())) > eps * half);
        Rational dev = density(g, w->x, w->y) - density(g, a, b);
        if (dev < 0)
            dev = -dev;
        CHECK(dev == w->deviation);
        CHECK(dev >= eps);
    }
}

TEST_CASE("random dense pairs rarely refuted at eps 0.4")
{
    int refuted = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto [g, map] = blowup_instance(complete_graph(2), 30, rat(7, 10), seed);
        if (refute_regularity(g, map.clusters[0], map.clusters[1], parse_rational("0.4"), 10000,
                              seed))
            ++refuted;
    }
    CHECK(refuted <= 1);
}

TEST_CASE("super-regular degree check")
{
    Graph kb = complete_multipartite({3, 3});
    CHECK(super_regular_degree_check(kb, {0, 1, 2}, {3, 4, 5}, parse_rational("0.9")).empty());

    Graph g = complete_multipartite({3, 3});
    for (int b : {3, 4, 5})
        g.remove_edge(0, b);
    auto rep = super_regular_degree_check(g, {0, 1, 2}, {3, 4, 5}, parse_rational("0.1"));
    CHECK(rep.in_a == VertexSet{0});
    CHECK(rep.in_b.empty());

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto [bg, map] = blowup_instance(complete_graph(2), 40, parse_rational("0.95"), seed);
        int min_cross = 40;
        for (int v : map.clusters[0])
            min_cross = std::min(min_cross, bg.degree_into(v, map.clusters[1]));
        for (int v : map.clusters[1])
            min_cross = std::min(min_cross, bg.degree_into(v, map.clusters[0]));
        if (min_cross > 20)
            CHECK(super_regular_degree_check(bg, map.clusters[0], map.clusters[1], rat(1, 2))
                      .empty());
    }
}

TEST_CASE("graph text format round trip")
{
    std::istringstream in("# a comment\n4 3\n0 1\n1 2 # trailing\n\n2 3\n");
    Graph g = read_graph(in);
    CHECK(g == path_graph(4));
    std::ostringstream out;
    write_graph(out, g);
    std::istringstream back(out.str());
    CHECK(read_graph(back) == g);

    std::istringstream bad("3 2\n0 1\n");
    CHECK_THROWS(read_graph(bad));

    std::istringstream din("3 2\n0 1\n2 0\n");
    Digraph d = read_digraph(din);
    CHECK(d.has_arc(0, 1));
    CHECK(d.has_arc(2, 0));
    CHECK(! d.has_arc(1, 0));
}

TEST_CASE("rational literals")
{
    CHECK(parse_rational("0.9") == rat(9, 10));
    CHECK(parse_rational("1/2") == rat(1, 2));
    CHECK(parse_rational("1e-6") == rat(1, 1000000));
    CHECK(parse_rational("-3") == rat(-3));
    CHECK(to_string(rat(6, 4)) == "3/2");
    CHECK(floor_rat(rat(-3, 2)) == -2);
    CHECK(ceil_rat(rat(-3, 2)) == -1);
    CHECK_THROWS(parse_rational("abc"));
}
