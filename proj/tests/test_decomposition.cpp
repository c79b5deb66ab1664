#include "doctest.h"

#include "oretile/decomposition.hpp"
#include "oretile/errors.hpp"

#include <set>

using namespace oretile;

namespace {

RegularClique clique_of(int order, const Integer& size)
{
    RegularClique c;
    c.sizes.assign(order, size);
    return c;
}

// Integrality of every size the four steps produce, written out directly.
bool sizes_integral(const Integer& L, const Rational& alpha, int k, const Rational& mu, const std::vector<int>& iv)
{
    AlphaPrime ap = alpha_prime(alpha, k, mu);
    const Rational& a = ap.value;
    auto integral = [](const Rational& x) { return denom(x) == 1; };
    Rational lp = Rational(L) / Rational(ap.q - ap.p);
    if (!integral(lp) || !integral(lp / Rational((k - 1) * ap.q + ap.p)))
        return false;
    for (int i : iv) {
        Rational t1 = lp / i, t2 = (1 - a) * lp / (i * (i - 1 + a));
        const std::vector<Rational> xs{t1, t2, a * t1, a * t2, t1 / Rational(ap.q), t2 / Rational(ap.q)};
        for (const Rational& x : xs)
            if (!integral(x))
                return false;
    }
    return true;
}

void check_certificate(const DecompositionCertificate& c)
{
    CHECK(c.residue == 0);
    CHECK(c.input_mass == c.output_mass + c.exceptional_mass);
    CHECK(c.L1 > 0);
    CHECK(c.L1 % c.alpha_prime.q == 0);
    CHECK(Rational(c.tiles.small) == c.alpha_prime.value * Rational(c.tiles.width));
    CHECK(c.tiles.width == c.L1);
    for (const auto& e : c.eliminations) {
        CHECK(e.availability_slack > 0);
        CHECK(e.pool_margin >= 0);
        CHECK(e.rounds == (e.i - 1) * c.alpha_prime.q + c.alpha_prime.p);
        CHECK(e.consumed_mass == e.produced_mass);
        CHECK(e.rounds * e.per_round == c.L);
    }
}

} // namespace

TEST_CASE("s-partition")
{
    ClusterSystem sys;
    sys.k = 3;
    int id = sys.add(clique_of(3, 12));
    CHECK(s_partition(sys, id, 1) == std::vector<int>{id});
    auto parts = s_partition(sys, id, 3);
    REQUIRE(parts.size() == 3);
    for (int p : parts) {
        const auto& c = sys.cliques.at(p);
        CHECK(c.sizes == std::vector<Integer>{4, 4, 4});
        CHECK(c.provenance == Provenance::sliced);
        CHECK(c.parent == id);
    }
    CHECK(sys.mass() == 36);
    CHECK_THROWS_AS(s_partition(sys, parts[0], 3), PreconditionError);
    CHECK(sys.cliques.size() == 3);
}

TEST_CASE("divisor set lcm")
{
    // frozen from an independent check: valid at L, invalid at L/p for every prime p | L
    CHECK(minimal_valid_L(rat(1, 2), 3, rat(1), {1}) == 1058148);
    CHECK(minimal_valid_L(rat(1, 2), 4, rat(1), {3}) == 71870400);
    CHECK(minimal_valid_L(rat(1, 2), 3, rat(1, 10), {1, 2}) == Integer(11370672690480LL));
    CHECK(minimal_valid_L(rat(1, 3), 4, rat(1, 10), {1, 2, 3}) == Integer("1934280991574779680"));
    CHECK(minimal_valid_L(rat(2, 3), 3, rat(1, 10), {}) == 134 * 1081);

    for (int k : {3, 4})
        for (const Rational& a : {rat(1, 3), rat(1, 2), rat(2, 3)})
            for (const Rational& mu : {rat(1), rat(1, 10)}) {
                std::vector<int> iv;
                for (int i = 1; i < k; ++i)
                    iv.push_back(i);
                Integer L = minimal_valid_L(a, k, mu, iv);
                CHECK(sizes_integral(L, a, k, mu, iv));
                for (int pr : {2, 3, 5, 7, 11, 13})
                    if (L % pr == 0)
                        CHECK_FALSE(sizes_integral(L / pr, a, k, mu, iv));
            }
}

TEST_CASE("eliminating one clique")
{
    AlphaPrime ap{rat(1, 2), 1, 2};
    ClusterSystem sys;
    sys.k = 3;
    int k0 = sys.add(clique_of(3, 12));
    int k1 = sys.add(clique_of(3, 12));
    int k2 = sys.add(clique_of(3, 12));
    RegularClique small = clique_of(2, 24);
    small.links[k0] = {Connection::well, {0}};
    small.links[k1] = {Connection::well, {1, 2}};
    small.links[k2] = {Connection::over, {0, 1, 2}};
    int sid = sys.add(small);
    const Integer before = sys.mass();

    SUBCASE("typical")
    {
        auto rec = eliminate_clique(sys, sid, {k0, k1}, ap, ElimMode::typical);
        CHECK(rec.t1 == 12);
        CHECK(rec.t2 == 12);
        CHECK(rec.large_size == 6);
        CHECK(rec.small_size == 6);
        CHECK(rec.per_round == 12);
        CHECK(rec.rounds == 2);
        CHECK(rec.used == std::vector<int>{k0, k1});
        CHECK(rec.consumed_mass == 120);
        CHECK(sys.mass() == before);
        CHECK(sys.family(2).empty());
        CHECK(sys.family(3).size() == 3); // k2 plus two product records
        for (int id : sys.family(3))
            if (id != k2) {
                CHECK(sys.cliques.at(id).sizes == std::vector<Integer>{12, 12, 6});
                CHECK(sys.cliques.at(id).multiplicity == 2);
            }
    }
    SUBCASE("wrong connection kind leaves the system untouched")
    {
        CHECK_THROWS_AS(eliminate_clique(sys, sid, {k0, k2}, ap, ElimMode::typical), PreconditionError);
        CHECK(sys.cliques.size() == 4);
        CHECK(sys.mass() == before);
    }
    SUBCASE("pool too small")
    {
        CHECK_THROWS_AS(eliminate_clique(sys, sid, {k0}, ap, ElimMode::typical), PreconditionError);
        CHECK(sys.cliques.size() == 4);
    }
    SUBCASE("missing common neighbourhood")
    {
        sys.cliques.at(sid).links[k0].b_positions.clear();
        CHECK_THROWS_AS(eliminate_clique(sys, sid, {k0, k1}, ap, ElimMode::typical), LemmaViolation);
        CHECK(sys.mass() == before);
    }
}

TEST_CASE("only top-order cliques")
{
    const Rational a = rat(1, 2), mu = rat(1, 10);
    const Integer L = minimal_valid_L(a, 3, mu, {});
    ClusterSystem sys;
    sys.k = 3;
    for (int c = 0; c < 20; ++c)
        sys.add(clique_of(3, L));
    auto cert = run_decomposition(sys, a, mu, L);
    check_certificate(cert);
    CHECK(cert.phi[3] == rat(1, 3));
    CHECK(cert.s == rat(2, 15));
    CHECK(cert.eliminations.empty());
    CHECK(cert.L1 == 360 * (cert.L_prime / (2 * 360 + 181)));
    // each sliced clique becomes one tile per small-cluster position
    CHECK(cert.tiles.count == 20 * 179 * 3);
}

TEST_CASE("hand-built system with one clique of each smaller order")
{
    // k = 3, 20 triangles, one pair and one singleton, every link well-connected
    const Rational a = rat(1, 2), mu = rat(1, 10);
    const Integer L = minimal_valid_L(a, 3, mu, {1, 2});
    ClusterSystem sys;
    sys.k = 3;
    std::vector<int> kids;
    for (int c = 0; c < 20; ++c)
        kids.push_back(sys.add(clique_of(3, L)));
    for (int order : {2, 1}) {
        RegularClique c = clique_of(order, L);
        for (int kid : kids)
            c.links[kid] = {Connection::well, {0, 1, 2}};
        sys.add(c);
    }
    auto cert = run_decomposition(sys, a, mu, L);
    check_certificate(cert);
    CHECK(cert.eliminations.size() == 2);
    CHECK(cert.exceptional_cliques.empty());
    CHECK(cert.phi[3] * 63 == 20);
    CHECK(cert.s == rat(19, 63) - rat(1, 5));
}

TEST_CASE("one unreachable clique is absorbed as exceptional")
{
    const Rational a = rat(1, 2), mu = rat(1, 10);
    const Integer L = minimal_valid_L(a, 3, mu, {1});
    ClusterSystem sys;
    sys.k = 3;
    std::vector<int> kids;
    for (int c = 0; c < 12; ++c)
        kids.push_back(sys.add(clique_of(3, L)));
    RegularClique linked = clique_of(2, L);
    for (int kid : kids)
        linked.links[kid] = {Connection::well, {0, 1}};
    int good = sys.add(linked);
    int lonely = sys.add(clique_of(2, L));
    auto cert = run_decomposition(sys, a, mu, L);
    check_certificate(cert);
    CHECK(cert.s == rat(1, 10));
    CHECK(cert.lambda[1] == rat(12, 40));
    CHECK(cert.exceptional_cliques == std::vector<int>{lonely});
    CHECK(cert.exceptional_mass == 2 * L);
    REQUIRE(cert.eliminations.size() == 1);
    CHECK(cert.eliminations[0].clique == good);

    // two unreachable cliques drive the measured lambda to zero
    sys.add(clique_of(2, L));
    for (int c = 0; c < 6; ++c)
        sys.add(clique_of(3, L));
    CHECK_THROWS_AS(run_decomposition(sys, a, mu, L), PreconditionError);
}

TEST_CASE("preconditions of the decomposition")
{
    const Rational a = rat(1, 2), mu = rat(1, 10);
    const Integer L = minimal_valid_L(a, 3, mu, {1});
    ClusterSystem sys;
    sys.k = 3;
    for (int c = 0; c < 11; ++c)
        sys.add(clique_of(3, L));
    sys.add(clique_of(2, L));
    sys.add(clique_of(2, L));
    CHECK_THROWS_AS(run_decomposition(sys, a, mu, L), PreconditionError); // s = 11/37 - 1/5 < mu

    ClusterSystem top;
    top.k = 3;
    for (int c = 0; c < 4; ++c)
        top.add(clique_of(3, L));
    CHECK_NOTHROW(run_decomposition(top, a, mu, L));
    CHECK_THROWS_AS(run_decomposition(top, a, mu, L + 1), PreconditionError);
    CHECK_THROWS_AS(run_decomposition(top, a, rat(1), L), PreconditionError); // s < 1 always
}

TEST_CASE("synthetic systems over the parameter grid")
{
    int feasible = 0;
    for (int k : {3, 4})
        for (const Rational& a : {rat(1, 3), rat(1, 2), rat(2, 3)})
            for (const Rational& mu : {rat(1), rat(1, 10)})
                for (int atypical : {0, 1})
                    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                        std::vector<int> iv;
                        for (int i = 1; i < k; ++i)
                            iv.push_back(i);
                        Integer L = minimal_valid_L(a, k, mu, iv);
                        SyntheticOptions opt;
                        opt.atypical = atypical;
                        auto sys = synthetic_system(k, a, mu, L, seed, opt);
                        Rational s_limit = Rational(1, k) - (k - 1) * gamma_param(k, a);
                        if (!sys) {
                            CHECK(s_limit <= mu);
                            continue;
                        }
                        ++feasible;
                        auto cert = run_decomposition(*sys, a, mu, L);
                        CHECK(cert.s >= mu);
                        check_certificate(cert);
                        std::set<int> over_used;
                        int step3 = 0;
                        for (const auto& e : cert.eliminations)
                            if (e.mode == ElimMode::atypical) {
                                ++step3;
                                for (int u : e.used)
                                    CHECK(over_used.insert(u).second);
                            }
                        CHECK(step3 == (atypical ? 1 : 0));
                    }
    CHECK(feasible == 4 * 2 * 3);
}

TEST_CASE("system read off a clique cover")
{
    // two triangles joined completely, plus an edge 6-7 where 6 sees all six and 7 sees 0 and 1
    Graph r(8);
    for (int u = 0; u < 6; ++u)
        for (int v = u + 1; v < 6; ++v)
            r.add_edge(u, v);
    r.add_edge(6, 7);
    for (int u = 0; u < 6; ++u)
        r.add_edge(u, 6);
    r.add_edge(7, 0);
    r.add_edge(7, 1);
    CliqueCover cover;
    cover.k = 3;
    cover.families.assign(4, {});
    cover.families[3] = {{0, 1, 2}, {3, 4, 5}};
    cover.families[2] = {{6, 7}};
    ClusterSystem sys = system_from_cover(r, cover, 30);
    const auto tri = sys.family(3);
    REQUIRE(tri.size() == 2);
    REQUIRE(sys.family(2).size() == 1);
    const auto& pair = sys.cliques.at(sys.family(2)[0]);
    CHECK(pair.sizes == std::vector<Integer>{30, 30});
    REQUIRE(pair.links.size() == 1); // 3 edges to {3,4,5} is under-connected
    const auto& e = pair.links.at(tri[0]);
    CHECK(e.kind == Connection::over);
    CHECK(e.b_positions == std::vector<int>{0, 1});
    CHECK(sys.mass() == 8 * 30);
}

TEST_CASE("balanced decomposition")
{
    auto k6 = run_balanced_decomposition(complete_graph(6), 3, 10, rat(1, 10), rat(1, 100));
    CHECK(k6.tiles.size() == 2);
    CHECK(k6.exceptional.empty());
    CHECK(k6.exceptional_mass == 0);

    auto c5 = run_balanced_decomposition(cycle_graph(5), 2, 7, rat(1, 10), rat(1, 100));
    CHECK(c5.tiles.size() == 2);
    CHECK(c5.exceptional.size() == 1);
    CHECK(c5.exceptional_mass == 7);
    CHECK(Rational(1) <= c5.bound);

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Graph g = random_graph(12 + static_cast<int>(seed % 7), rat(4, 5), seed);
        const Rational s = (rat(1, 4) + rat(2, 100)) * g.order();
        auto ore = ore_report_for(g, Rational(3));
        if (ore.min_sum && Rational(*ore.min_sum) < Rational(4, 3) * g.order() - 2 * s) {
            CHECK_THROWS_AS(run_balanced_decomposition(g, 3, 20, rat(1, 4), rat(1, 100)), PreconditionError);
            continue;
        }
        auto bd = run_balanced_decomposition(g, 3, 20, rat(1, 4), rat(1, 100));
        CHECK(Rational(static_cast<long long>(bd.exceptional.size())) <= bd.bound);
        std::set<int> seen(bd.exceptional.begin(), bd.exceptional.end());
        for (const auto& t : bd.tiles) {
            CHECK(t.size() == 3);
            for (int v : t)
                CHECK(seen.insert(v).second);
        }
        CHECK(static_cast<int>(seen.size()) == g.order());
        if (bd.mass_bound_applicable)
            CHECK(bd.mass_bound_holds);
    }
}
