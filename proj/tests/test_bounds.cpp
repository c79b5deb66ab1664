#include "doctest.h"

#include "oretile/bounds.hpp"
#include "oretile/errors.hpp"

#include <cmath>
#include <random>

using namespace oretile;

namespace {

PhiVector phi3(Rational p1, Rational p2, Rational p3) { return {0, p1, p2, p3}; }

// Random normalised phi with small integer weights.
PhiVector random_phi(std::mt19937_64& rng, int k)
{
    std::uniform_int_distribution<int> w(0, 20);
    PhiVector phi(k + 1, Rational(0));
    Rational total = 0;
    for (int i = 1; i <= k; ++i) {
        phi[i] = w(rng);
        total += i * phi[i];
    }
    if (total == 0) {
        phi[k] = 1;
        total = k;
    }
    for (auto& x : phi)
        x /= total;
    return phi;
}

} // namespace

TEST_CASE("s parameter")
{
    SUBCASE("worked k=3 instance")
    {
        PhiVector phi = phi3(0, rat(1, 10), rat(4, 15));
        CHECK(weighted_phi_sum(phi) == 1);
        CHECK(s_param(phi, 3, rat(1, 10)) == rat(1, 15));
    }
    SUBCASE("zero when phi_k sits exactly on the gamma term")
    {
        // k=3, gamma=1/10: phi_3 = 1/5 and phi_2 absorbs the remainder.
        PhiVector phi = phi3(0, rat(1, 5), rat(1, 5));
        CHECK(s_param(phi, 3, rat(1, 10)) == 0);
    }
    SUBCASE("bad phi rejected")
    {
        CHECK_THROWS_AS(s_param(phi3(0, 0, rat(1, 2)), 3, rat(1, 10)), PreconditionError);
        CHECK_THROWS_AS(s_param(PhiVector{0, 1}, 3, rat(1, 10)), PreconditionError);
        CHECK_THROWS_AS(s_param(phi3(-1, 1, 0), 3, rat(1, 10)), PreconditionError);
    }
}

TEST_CASE("phi_k lower check")
{
    PhiVector phi = phi3(0, rat(1, 10), rat(4, 15));
    Slack ok = phi_k_lower_check(phi, 3, rat(1, 10), 0, 0);
    CHECK(ok.holds);
    CHECK(ok.slack == rat(1, 15));

    PhiVector flat = phi3(1, 0, 0);
    Slack bad = phi_k_lower_check(flat, 3, rat(1, 10), 0, 0);
    CHECK_FALSE(bad.holds);
    CHECK(bad.slack < 0);

    // equivalence with s >= -(k-1)(d + 2 eps) on random input
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 2 + static_cast<int>(rng() % 5);
        PhiVector phi_r = random_phi(rng, k);
        Rational gamma = gamma_param(k, Rational(1 + static_cast<long long>(rng() % 9), 10));
        Rational d(static_cast<long long>(rng() % 5), 100), eps(static_cast<long long>(rng() % 5), 1000);
        Rational s = s_param(phi_r, k, gamma);
        CHECK(phi_k_lower_check(phi_r, k, gamma, d, eps).holds == (s >= -(k - 1) * (d + 2 * eps)));
    }
}

TEST_CASE("family count identity under the s substitution")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 3 + static_cast<int>(rng() % 4);
        PhiVector phi = random_phi(rng, k);
        Rational alpha(1 + static_cast<long long>(rng() % 9), 10);
        Rational gamma = gamma_param(k, alpha);
        Rational s = s_param(phi, k, gamma);
        Rational plain = 0;
        for (int i = 1; i <= k; ++i)
            plain += phi[i];
        CHECK(plain == Rational(1, k - 1) - gamma - s / (k - 1));
        // sigma_{k-1} closed form
        Rational sig = 0;
        for (int j = 1; j <= k - 1; ++j)
            sig += (k - j) * phi[j];
        CHECK(sig == Rational(1, k - 1) - k * gamma - Rational(k, k - 1) * s);
        CHECK(sig == (1 - alpha) / (k - 1 + alpha) - Rational(k, k - 1) * s);
    }
}

TEST_CASE("lambda lower bound")
{
    PhiVector phi = phi3(0, rat(1, 10), rat(4, 15));
    // term by term: (k-1)gamma = 1/5, (i-1)s/(k-1) = 1/30, phi_{k-2} = phi_1 = 0, tail empty
    CHECK(lambda_lower(2, phi, 3, rat(1, 10), rat(1, 15), 0, 0) == rat(7, 30));
    CHECK(lambda_lower(1, phi, 3, rat(1, 10), rat(1, 15), 0, 0) == rat(1, 5));
    CHECK(lambda_lower(1, phi, 3, rat(1, 10), rat(1, 15), rat(1, 100), rat(1, 1000)) ==
          rat(1, 5) - 2 * (rat(1, 100) + rat(2, 1000)));

    // k=4, alpha=1/3, phi=(1/20,1/20,1/20,7/40), d=1/1000, eps=1/10000 (oracle values)
    PhiVector phi4{0, rat(1, 20), rat(1, 20), rat(1, 20), rat(7, 40)};
    Rational g4 = gamma_param(4, rat(1, 3));
    CHECK(g4 == rat(1, 30));
    Rational s4 = s_param(phi4, 4, g4);
    CHECK(s4 == rat(-3, 40));
    CHECK(lambda_lower(1, phi4, 4, g4, s4, rat(1, 1000), rat(1, 10000)) == rat(241, 2500));
    CHECK(lambda_lower(2, phi4, 4, g4, s4, rat(1, 1000), rat(1, 10000)) == rat(863, 5000));
    CHECK(lambda_lower(3, phi4, 4, g4, s4, rat(1, 1000), rat(1, 10000)) == rat(497, 2500));

    CHECK_THROWS_AS(lambda_lower(0, phi, 3, rat(1, 10), 0, 0, 0), PreconditionError);
    CHECK_THROWS_AS(lambda_lower(3, phi, 3, rat(1, 10), 0, 0, 0), PreconditionError);
}

TEST_CASE("alpha prime and typicality threshold")
{
    AlphaPrime a = alpha_prime(rat(1, 2), 3, rat(1, 10));
    CHECK(a.value == rat(181, 360));
    CHECK(a.p == 181);
    CHECK(a.q == 360);
    CHECK(alpha_prime(rat(1, 2), 3, 1).value == rat(19, 36));
    CHECK_THROWS_AS(alpha_prime(rat(1, 2), 3, rat(2, 7)), PreconditionError);
    CHECK_THROWS_AS(alpha_prime(1, 3, rat(1, 10)), PreconditionError);

    CHECK(typicality_threshold(rat(1, 2), 3) == 5);
    CHECK(typicality_threshold(rat(19, 36), 3) == 6);
    CHECK_THROWS_AS(typicality_threshold(1, 3), PreconditionError);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int k = 2 + static_cast<int>(rng() % 5);
        long long omega = 2 + static_cast<long long>(rng() % 8);
        long long sigma = 1 + static_cast<long long>(rng() % (omega - 1));
        Rational alpha(sigma, omega);
        long long n = 1 + static_cast<long long>(rng() % 100);
        AlphaPrime ap = alpha_prime(alpha, k, Rational(1, n));
        CHECK(ap.value > alpha);
        CHECK(ap.value < 1);
        CHECK(ap.q <= Integer(omega * omega * k * k * n));
        Rational bigger = ap.value + (1 - ap.value) / 2;
        CHECK(typicality_threshold(bigger, k) >= typicality_threshold(ap.value, k));
    }
}

TEST_CASE("availability inequality")
{
    SUBCASE("nothing to subtract")
    {
        PhiVector phi = phi3(0, 0, rat(1, 3));
        Rational ap = alpha_prime(rat(1, 2), 3, rat(1, 10)).value;
        Feasibility f = feasibility_ii(1, rat(1, 5), phi, rat(1, 2), ap, 3, rat(1, 10), rat(1, 10));
        CHECK(f.availability);
        CHECK(f.availability_slack == rat(1, 5));
    }
    SUBCASE("correction term identity")
    {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 100; ++trial) {
            int k = 3 + static_cast<int>(rng() % 3);
            Rational alpha(1 + static_cast<long long>(rng() % 8), 10);
            Rational ap = alpha_prime(alpha, k, Rational(1, 1 + static_cast<long long>(rng() % 20))).value;
            for (int l = 1; l <= k - 1; ++l)
                CHECK((l - 1 + ap) / (1 - ap) - (l - 1 + alpha) / (1 - alpha) ==
                      l * (ap - alpha) / ((1 - ap) * (1 - alpha)));
        }
    }
    SUBCASE("closed form of I_i at the lambda bound, and the chain when s >= mu")
    {
        std::mt19937_64 rng(9);
        int chains = 0;
        for (int trial = 0; trial < 400; ++trial) {
            int k = 3 + static_cast<int>(rng() % 4);
            PhiVector phi = random_phi(rng, k);
            Rational alpha(1 + static_cast<long long>(rng() % 9), 10);
            Rational mu(1, 1 + static_cast<long long>(rng() % 40));
            Rational gamma = gamma_param(k, alpha);
            Rational s = s_param(phi, k, gamma);
            Rational ap = alpha_prime(alpha, k, mu).value;
            for (int i = 1; i <= k - 1; ++i) {
                Rational lam = lambda_lower(i, phi, k, gamma, s, 0, 0);
                Feasibility f = feasibility_ii(i, lam, phi, alpha, ap, k, s, mu);
                CHECK(f.i_value == f.i_lower);
                CHECK(f.availability_slack == f.i_value - f.correction);
                CHECK(f.correction_slack >= 0);
                if (s >= mu) {
                    ++chains;
                    CHECK(f.i_value >= k * alpha * s / ((1 - alpha) * (k - 1)));
                    CHECK(f.availability);
                }
            }
        }
        CHECK(chains > 0);
    }
    SUBCASE("k=3, alpha=1/2, mu=1/10, s=1/10")
    {
        // phi_3 = phi_1 + 2 gamma + s with gamma = 1/10 and phi_1 = 0
        Rational p1 = 0, p3 = p1 + rat(1, 5) + rat(1, 10);
        PhiVector phi = phi3(p1, (1 - p1 - 3 * p3) / 2, p3);
        Rational s = s_param(phi, 3, rat(1, 10));
        REQUIRE(s == rat(1, 10));
        Rational ap = alpha_prime(rat(1, 2), 3, rat(1, 10)).value;
        for (int i = 1; i <= 2; ++i) {
            Feasibility f = feasibility_ii(i, lambda_lower(i, phi, 3, rat(1, 10), s, 0, 0), phi,
                                           rat(1, 2), ap, 3, s, rat(1, 10));
            CHECK(f.availability);
            CHECK(f.chain);
        }
    }
    CHECK_THROWS_AS(feasibility_ii(1, 0, phi3(0, 0, rat(1, 3)), rat(1, 2), 1, 3, 0, rat(1, 10)),
                    PreconditionError);
}

TEST_CASE("extremal cascade")
{
    const Rational alpha = rat(1, 2), mu = rat(1, 100), eps = rat(1, 1000000);
    SUBCASE("alpha0 and a one-step cascade")
    {
        // s = 0: phi_3 = phi_1 + 1/5
        PhiVector phi = phi3(rat(1, 10), 0, rat(3, 10));
        ExtremalCascade c = extremal_cascade(phi, 3, alpha, mu, eps);
        CHECK(c.alpha0 == rat(37, 200));
        CHECK(c.sigma_partials == std::vector<Rational>{0, rat(1, 5), rat(1, 5)});
        CHECK(c.t == 1);
        CHECK(c.j0 == 1);
        CHECK(c.mu_prime == doctest::Approx(std::cbrt(37.0 / 200 * 1e-12)));
        CHECK(c.eps_prime == doctest::Approx(3 * (1e-6 + 0.02)));
    }
    SUBCASE("empty lower families force t = k-1")
    {
        ExtremalCascade c = extremal_cascade(phi3(0, rat(1, 5), rat(1, 5)), 3, alpha, mu, eps);
        CHECK(c.t == 2);
        CHECK(c.j0 == 1);
    }
    SUBCASE("a two-level cascade")
    {
        Rational p1 = rat(1, 200000), p3 = p1 + rat(1, 5);
        ExtremalCascade c = extremal_cascade(phi3(p1, (1 - p1 - 3 * p3) / 2, p3), 3, alpha, mu, eps);
        CHECK(c.t == 2);
        CHECK(c.j0 == 2);
        CHECK(at_least_power(c.sigma_partials[2], 2, 3, c.alpha0, eps));
        CHECK(at_most_power(c.sigma_partials[1], 1, 3, c.alpha0, eps));
    }
    SUBCASE("regime checks")
    {
        CHECK_THROWS_AS(extremal_cascade(phi3(0, 0, rat(1, 3)), 3, alpha, mu, eps), PreconditionError);
        CHECK_THROWS_AS(extremal_cascade(phi3(0, rat(1, 5), rat(1, 5)), 3, rat(9, 10), rat(1, 10), eps),
                        PreconditionError);
    }
    SUBCASE("sandwich holds on random extremal inputs")
    {
        std::mt19937_64 rng(21);
        int ran = 0;
        for (int trial = 0; trial < 500; ++trial) {
            int k = 3 + static_cast<int>(rng() % 3);
            PhiVector phi = random_phi(rng, k);
            Rational a(1 + static_cast<long long>(rng() % 5), 10);
            Rational m(1, 100);
            Rational e(1, 1 + static_cast<long long>(rng() % 100000));
            Rational s = s_param(phi, k, gamma_param(k, a));
            Rational a0 = (1 - a) / (k - 1 + a) - Rational(k, k - 1) * m;
            if (s >= m || a0 <= 0)
                continue;
            ++ran;
            ExtremalCascade c = extremal_cascade(phi, k, a, m, e);
            CHECK(c.sigma_partials[k - 1] >= c.alpha0);
            CHECK(at_least_power(c.sigma_partials[c.t], c.j0, k, c.alpha0, e));
            CHECK(at_most_power(c.sigma_partials[c.t - 1], c.j0 - 1, k, c.alpha0, e));
        }
        CHECK(ran > 20);
    }
}

TEST_CASE("power comparisons agree with floating point away from ties")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        int k = 3 + static_cast<int>(rng() % 3);
        Rational a0(1 + static_cast<long long>(rng() % 50), 100);
        Rational e(1, 1 + static_cast<long long>(rng() % 10000));
        Rational x(static_cast<long long>(rng() % 1000), 1000);
        int j = static_cast<int>(rng() % (k + 1));
        double rhs = std::pow(to_double(a0) / to_double(e), double(j) / k) * to_double(e);
        double lhs = to_double(x);
        if (std::abs(lhs - rhs) < 1e-9 * (1 + rhs))
            continue;
        CHECK(at_least_power(x, j, k, a0, e) == (lhs >= rhs));
        CHECK(at_most_power(x, j, k, a0, e) == (lhs <= rhs));
    }
}

TEST_CASE("leftover constants")
{
    CHECK(leftover_constant(bottle_spec(3, 2, 2), LeftoverCase::balanced) == 60);
    CHECK(leftover_constant(bottle_spec(2, 1, 1), LeftoverCase::padding, 0) == 1);
    CHECK(leftover_constant(bottle_spec(3, 1, 2), LeftoverCase::general) == 230);
    CHECK(leftover_constant(bottle_spec(3, 1, 1), LeftoverCase::padding, rat(1, 2)) == 3 + 4);
    CHECK(leftover_constant(bottle_spec(2, 1, 2), LeftoverCase::general) == 5 * 4 * 2 * 3 + 3);
}

TEST_CASE("critical chromatic identity on bottle specs")
{
    for (int k = 2; k <= 6; ++k)
        for (int omega = 1; omega <= 6; ++omega)
            for (int sigma = 1; sigma <= omega; ++sigma) {
                BottleSpec b = bottle_spec(k, sigma, omega);
                Rational gamma = gamma_param(k, b.alpha);
                CHECK(2 * (1 - 1 / b.chi_cr) == 2 * (1 - Rational(1, k - 1) + gamma));
            }
}

TEST_CASE("parameter validation and table")
{
    CHECK(validate_ordering(rat(1, 2), rat(1, 10000), rat(1, 100000), rat(1, 20)).empty());
    auto bad = validate_ordering(rat(1, 2), rat(1, 100), rat(1, 100), rat(1, 10));
    CHECK(bad.size() == 3);

    ParamSet p;
    p.k = 3;
    p.alpha = rat(1, 2);
    p.gamma = rat(1, 10);
    p.mu = rat(1, 20);
    p.d = rat(1, 2000);
    p.eps = rat(1, 20000);
    p.phi = phi3(0, rat(1, 10), rat(4, 15));
    p.s = rat(1, 15);
    CHECK(validate_params(p).empty());
    p.s = 0;
    CHECK(validate_params(p).size() == 1);

    BoundsTable t = bounds_table(3, 1, 2, rat(1, 10), rat(1, 1000), rat(1, 10000));
    auto find = [&](const std::string& key) {
        for (auto& [k, v] : t.rows)
            if (k == key)
                return v;
        return std::string("?");
    };
    CHECK(find("gamma") == "1/10");
    CHECK(find("alpha_prime") == "181/360");
    CHECK(find("leftover_general") == "230");
    CHECK(find("c_t") == "6");
    CHECK(t.violations.size() == 1); // mu = 1/10 is above min(alpha,1-alpha)/10
}
