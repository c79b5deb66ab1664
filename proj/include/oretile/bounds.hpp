#pragma once

#include "oretile/chromatic.hpp"
#include "oretile/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace oretile {

// Clique-family densities: phi[i] is |family of order i| / l for i = 1..k; phi[0] is unused
// and must be zero, so phi.size() == k + 1.
using PhiVector = std::vector<Rational>;

struct ParamSet {
    int k = 0;
    Rational alpha;
    Rational gamma;
    Rational d, eps, mu;
    Rational s;
    PhiVector phi;
};

// Names of the violated conditions; empty when p is admissible. Covers positivity, the phi
// normalisation, gamma consistency, s consistency and eps <= d/10, d <= mu/100,
// mu <= min(alpha, 1 - alpha)/10 (mu <= 1/10 when alpha = 1).
std::vector<std::string> validate_params(const ParamSet& p);
std::vector<std::string> validate_ordering(const Rational& alpha, const Rational& d,
                                           const Rational& eps, const Rational& mu);

// Throws PreconditionError unless phi has k+1 nonnegative entries, phi[0] = 0 and sum i*phi_i = 1.
void check_phi(const PhiVector& phi, int k);
Rational weighted_phi_sum(const PhiVector& phi);

struct Slack {
    bool holds = false;
    Rational slack;
};

Rational s_param(const PhiVector& phi, int k, const Rational& gamma);
// phi_k >= sum (i-1) phi_{k-i} + (k-1) gamma - (k-1)(d + 2 eps); slack is lhs - rhs.
Slack phi_k_lower_check(const PhiVector& phi, int k, const Rational& gamma, const Rational& d,
                        const Rational& eps);

// Lower bound on the density of k-cliques well connected to a (k-i)-clique, 1 <= i <= k-1.
Rational lambda_lower(int i, const PhiVector& phi, int k, const Rational& gamma,
                      const Rational& s, const Rational& d, const Rational& eps);

struct AlphaPrime {
    Rational value;
    Integer p, q;
};

// alpha + alpha(1-alpha) mu / k^2 in lowest terms; mu must be 1/N.
AlphaPrime alpha_prime(const Rational& alpha, int k, const Rational& mu);

// ceil((k - 1 + a') / (1 - a'))
int typicality_threshold(const Rational& alpha_prime, int k);

struct Feasibility {
    Rational availability_slack; // lambda_i - sum_{l<=i} (l-1+a')/(1-a') phi_{k-l}
    Rational i_value;            // lambda_i - sum_{l<=i} (l-1+a)/(1-a) phi_{k-l}
    Rational i_lower;            // closed form lower bound on i_value in terms of s and phi
    Rational mu1;                // k a mu / ((1-a)(k-1))
    Rational correction;         // sum_{l<=i} phi_{k-l} l (a'-a) / ((1-a')(1-a))
    Rational chain_slack;        // i_value - mu1
    Rational correction_slack;   // mu1 - correction
    bool availability = false;   // availability_slack > 0
    // i_value >= mu1 >= correction with at least one strict; at s = mu with an empty tail
    // the first step is an equality.
    bool chain = false;
};

Feasibility feasibility_ii(int i, const Rational& lambda_i, const PhiVector& phi,
                           const Rational& alpha, const Rational& alpha_prime, int k,
                           const Rational& s, const Rational& mu);

struct ExtremalCascade {
    std::vector<Rational> sigma_partials; // index 0..k-1, entry 0 is zero
    Rational alpha0;
    Rational c_pow_k;       // C^k = alpha0 / eps; C itself is never formed
    int t = 0;
    int j0 = 0;
    Rational mu_prime_pow_k;   // (C^j0 eps)^k
    Rational lower_pow_k;      // (C^(j0-1) eps)^k
    double mu_prime = 0;       // C^j0 eps, rounded
    double eps_prime = 0;      // k (C^(j0-1) eps + 2 mu), rounded
};

// sigma_i = sum_{j<=i} (k-j) phi_j, then the least t and least j0 in [1, k] with
// sigma_t >= C^j0 eps and sigma_{t-1} <= C^(j0-1) eps, compared through k-th powers.
ExtremalCascade extremal_cascade(const PhiVector& phi, int k, const Rational& alpha,
                                 const Rational& mu, const Rational& eps);

// x >= C^j eps, with C^k = alpha0/eps, decided exactly.
bool at_least_power(const Rational& x, int j, int k, const Rational& alpha0, const Rational& eps);
bool at_most_power(const Rational& x, int j, int k, const Rational& alpha0, const Rational& eps);

enum class LeftoverCase { general, balanced, padding };

Integer leftover_constant(const BottleSpec& spec, LeftoverCase which,
                          const Rational& padding_s = Rational(0));

// Name/value rows for the bounds subcommand.
struct BoundsTable {
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<std::string> violations;
};

BoundsTable bounds_table(int k, int sigma, int omega, const Rational& mu, const Rational& d,
                         const Rational& eps);

} // namespace oretile
