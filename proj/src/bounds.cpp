#include "oretile/bounds.hpp"

#include "oretile/errors.hpp"

#include <algorithm>
#include <cmath>

namespace oretile {

namespace {

Rational phi_at(const PhiVector& phi, int i)
{
    if (i < 1 || i >= static_cast<int>(phi.size()))
        return 0;
    return phi[i];
}

void require_index(int i, int k)
{
    if (i < 1 || i > k - 1)
        throw PreconditionError("index i must lie in [1, k-1], got " + std::to_string(i));
}

} // namespace

Rational weighted_phi_sum(const PhiVector& phi)
{
    Rational total = 0;
    for (std::size_t i = 1; i < phi.size(); ++i)
        total += static_cast<long long>(i) * phi[i];
    return total;
}

void check_phi(const PhiVector& phi, int k)
{
    if (k < 2)
        throw PreconditionError("k must be at least 2");
    if (static_cast<int>(phi.size()) != k + 1)
        throw PreconditionError("phi must have k+1 entries (index 0 unused)");
    if (phi[0] != 0)
        throw PreconditionError("phi[0] must be zero");
    for (const auto& x : phi)
        if (x < 0)
            throw PreconditionError("phi entries must be nonnegative");
    if (weighted_phi_sum(phi) != 1)
        throw PreconditionError("sum of i*phi_i is " + to_string(weighted_phi_sum(phi)) +
                                ", expected 1");
}

std::vector<std::string> validate_ordering(const Rational& alpha, const Rational& d,
                                           const Rational& eps, const Rational& mu)
{
    std::vector<std::string> bad;
    if (eps <= 0)
        bad.push_back("eps > 0");
    if (d <= 0)
        bad.push_back("d > 0");
    if (mu <= 0)
        bad.push_back("mu > 0");
    if (alpha <= 0 || alpha > 1)
        bad.push_back("0 < alpha <= 1");
    if (eps > d / 10)
        bad.push_back("eps <= d/10");
    if (d > mu / 100)
        bad.push_back("d <= mu/100");
    Rational cap = alpha < 1 ? std::min(alpha, Rational(1) - alpha) / 10 : Rational(1, 10);
    if (mu > cap)
        bad.push_back(alpha < 1 ? "mu <= min(alpha, 1-alpha)/10" : "mu <= 1/10");
    return bad;
}

std::vector<std::string> validate_params(const ParamSet& p)
{
    std::vector<std::string> bad = validate_ordering(p.alpha, p.d, p.eps, p.mu);
    if (p.k < 2) {
        bad.push_back("k >= 2");
        return bad;
    }
    try {
        check_phi(p.phi, p.k);
    } catch (const PreconditionError&) {
        bad.push_back("phi normalised");
        return bad;
    }
    if (p.alpha > 0 && p.alpha <= 1 && p.gamma != gamma_param(p.k, p.alpha))
        bad.push_back("gamma = alpha/((k-1)(k-1+alpha))");
    if (p.s != s_param(p.phi, p.k, p.gamma))
        bad.push_back("s consistent with phi");
    return bad;
}

Rational s_param(const PhiVector& phi, int k, const Rational& gamma)
{
    check_phi(phi, k);
    Rational s = phi[k] - (k - 1) * gamma;
    for (int i = 2; i <= k - 1; ++i)
        s -= (i - 1) * phi_at(phi, k - i);
    return s;
}

Slack phi_k_lower_check(const PhiVector& phi, int k, const Rational& gamma, const Rational& d,
                        const Rational& eps)
{
    Rational slack = s_param(phi, k, gamma) + (k - 1) * (d + 2 * eps);
    return {slack >= 0, slack};
}

Rational lambda_lower(int i, const PhiVector& phi, int k, const Rational& gamma,
                      const Rational& s, const Rational& d, const Rational& eps)
{
    check_phi(phi, k);
    require_index(i, k);
    Rational v = (k - 1) * gamma + Rational(i - 1, k - 1) * s - (k - i) * (d + 2 * eps);
    for (int j = 2; j <= i; ++j)
        v += (j - 1) * phi_at(phi, k - j);
    Rational tail = 0;
    for (int j = i + 1; j <= k - 1; ++j)
        tail += phi_at(phi, k - j);
    return v + (i - 1) * tail;
}

AlphaPrime alpha_prime(const Rational& alpha, int k, const Rational& mu)
{
    if (alpha <= 0 || alpha >= 1)
        throw PreconditionError("alpha' needs 0 < alpha < 1");
    if (k < 2)
        throw PreconditionError("k must be at least 2");
    if (mu <= 0 || numer(mu) != 1)
        throw PreconditionError("mu must be a unit fraction 1/N, got " + to_string(mu));
    AlphaPrime out;
    out.value = alpha + alpha * (1 - alpha) * mu / (k * k);
    out.p = numer(out.value);
    out.q = denom(out.value);
    Integer omega = denom(alpha);
    Integer cap = omega * omega * k * k * denom(mu);
    if (!(out.p < out.q) || out.q > cap)
        throw LemmaViolation("alpha' = " + to_string(out.value) + " breaks p < q <= omega^2 k^2 N");
    return out;
}

int typicality_threshold(const Rational& alpha_prime, int k)
{
    if (alpha_prime >= 1)
        throw PreconditionError("typicality threshold needs alpha' < 1");
    return static_cast<int>(ceil_rat((k - 1 + alpha_prime) / (1 - alpha_prime)));
}

Feasibility feasibility_ii(int i, const Rational& lambda_i, const PhiVector& phi,
                           const Rational& alpha, const Rational& alpha_prime, int k,
                           const Rational& s, const Rational& mu)
{
    check_phi(phi, k);
    require_index(i, k);
    if (alpha_prime >= 1 || alpha >= 1)
        throw PreconditionError("feasibility needs alpha < alpha' < 1");
    Feasibility f;
    f.availability_slack = lambda_i;
    f.i_value = lambda_i;
    for (int l = 1; l <= i; ++l) {
        Rational ph = phi_at(phi, k - l);
        f.availability_slack -= (l - 1 + alpha_prime) / (1 - alpha_prime) * ph;
        f.i_value -= (l - 1 + alpha) / (1 - alpha) * ph;
        f.correction += ph * l * (alpha_prime - alpha) / ((1 - alpha_prime) * (1 - alpha));
    }
    Rational ratio = alpha / (1 - alpha);
    f.i_lower = (Rational(i - 1, k - 1) + k * ratio / (k - 1)) * s;
    for (int j = i + 1; j <= k - 1; ++j)
        f.i_lower += (i - 1 + ratio * j) * phi_at(phi, k - j);
    f.mu1 = k * ratio * mu / (k - 1);
    f.chain_slack = f.i_value - f.mu1;
    f.correction_slack = f.mu1 - f.correction;
    f.availability = f.availability_slack > 0;
    f.chain = f.chain_slack >= 0 && f.correction_slack >= 0 && f.chain_slack + f.correction_slack > 0;
    return f;
}

bool at_least_power(const Rational& x, int j, int k, const Rational& alpha0, const Rational& eps)
{
    if (x < 0)
        return false;
    return pow_rat(x, k) >= pow_rat(alpha0, j) * pow_rat(eps, k - j);
}

bool at_most_power(const Rational& x, int j, int k, const Rational& alpha0, const Rational& eps)
{
    if (x < 0)
        return true;
    return pow_rat(x, k) <= pow_rat(alpha0, j) * pow_rat(eps, k - j);
}

ExtremalCascade extremal_cascade(const PhiVector& phi, int k, const Rational& alpha,
                                 const Rational& mu, const Rational& eps)
{
    check_phi(phi, k);
    if (k < 3)
        throw PreconditionError("extremal cascade needs k >= 3");
    if (eps <= 0 || mu <= 0)
        throw PreconditionError("eps and mu must be positive");
    Rational gamma = gamma_param(k, alpha);
    Rational s = s_param(phi, k, gamma);
    if (s >= mu)
        throw PreconditionError("extremal regime needs s < mu, s = " + to_string(s));

    ExtremalCascade c;
    c.alpha0 = (1 - alpha) / (k - 1 + alpha) - Rational(k, k - 1) * mu;
    if (c.alpha0 <= 0)
        throw PreconditionError("alpha0 = " + to_string(c.alpha0) + " is not positive");
    c.c_pow_k = c.alpha0 / eps;
    c.sigma_partials.assign(k, Rational(0));
    for (int i = 1; i <= k - 1; ++i)
        c.sigma_partials[i] = c.sigma_partials[i - 1] + (k - i) * phi[i];

    for (int t = 1; t <= k - 1 && c.t == 0; ++t)
        for (int j = 1; j <= k; ++j)
            if (at_least_power(c.sigma_partials[t], j, k, c.alpha0, eps) &&
                at_most_power(c.sigma_partials[t - 1], j - 1, k, c.alpha0, eps)) {
                c.t = t;
                c.j0 = j;
                break;
            }
    if (c.t == 0)
        throw LemmaViolation("no level t with sigma_t >= C^j eps >= C sigma_{t-1} exists");

    c.mu_prime_pow_k = pow_rat(c.alpha0, c.j0) * pow_rat(eps, k - c.j0);
    c.lower_pow_k = pow_rat(c.alpha0, c.j0 - 1) * pow_rat(eps, k - c.j0 + 1);
    c.mu_prime = std::pow(to_double(c.mu_prime_pow_k), 1.0 / k);
    c.eps_prime = k * (std::pow(to_double(c.lower_pow_k), 1.0 / k) + 2 * to_double(mu));
    return c;
}

Integer leftover_constant(const BottleSpec& spec, LeftoverCase which, const Rational& padding_s)
{
    const int k = spec.k;
    const Integer h = spec.sigma + static_cast<long long>(k - 1) * spec.omega;
    switch (which) {
    case LeftoverCase::general: {
        Rational gamma = k >= 2 ? gamma_param(k, spec.alpha) : Rational(0);
        if (gamma == 0)
            throw PreconditionError("general leftover constant needs gamma > 0");
        Rational c = Rational(5 * k * k) * spec.omega / ((k - 1) * (k - 1) * gamma);
        return ceil_rat(c) + h;
    }
    case LeftoverCase::balanced:
        return Integer(3 * k * k) * spec.omega + h;
    case LeftoverCase::padding:
        if (padding_s < 0)
            throw PreconditionError("padding slack must be nonnegative");
        return ceil_rat(k * (k - 1) * padding_s) + (k - 1) * (k - 1);
    }
    return 0;
}

BoundsTable bounds_table(int k, int sigma, int omega, const Rational& mu, const Rational& d,
                         const Rational& eps)
{
    BottleSpec spec = bottle_spec(k, sigma, omega);
    BoundsTable t;
    auto row = [&](std::string name, std::string value) { t.rows.emplace_back(std::move(name), std::move(value)); };
    Rational gamma = gamma_param(k, spec.alpha);
    row("k", std::to_string(k));
    row("sigma", std::to_string(sigma));
    row("omega", std::to_string(omega));
    row("h", std::to_string(sigma + (k - 1) * omega));
    row("alpha", to_string(spec.alpha));
    row("chi_cr", to_string(spec.chi_cr));
    row("gamma", to_string(gamma));
    row("ore_coefficient", to_string(2 * (1 - 1 / spec.chi_cr)));
    row("mu", to_string(mu));
    row("d", to_string(d));
    row("eps", to_string(eps));
    if (spec.alpha < 1) {
        AlphaPrime ap = alpha_prime(spec.alpha, k, mu);
        row("alpha_prime", to_string(ap.value));
        row("p", ap.p.str());
        row("q", ap.q.str());
        row("q_minus_p", Integer(ap.q - ap.p).str());
        row("c_t", std::to_string(typicality_threshold(ap.value, k)));
        row("mu1", to_string(k * spec.alpha * mu / ((1 - spec.alpha) * (k - 1))));
        Rational a0 = (1 - spec.alpha) / (k - 1 + spec.alpha) - Rational(k, k - 1) * mu;
        row("alpha0", to_string(a0));
        row("leftover_general", leftover_constant(spec, LeftoverCase::general).str());
    }
    row("leftover_balanced", leftover_constant(spec, LeftoverCase::balanced).str());
    row("phi_k_slack_floor", to_string(-(k - 1) * (d + 2 * eps)));
    row("padding_leftover_per_cluster", to_string(k * (k - 1) * (d + 2 * eps)));
    t.violations = validate_ordering(spec.alpha, d, eps, mu);
    return t;
}

} // namespace oretile
