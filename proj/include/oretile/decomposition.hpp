#pragma once

#include "oretile/bounds.hpp"
#include "oretile/cover.hpp"
#include "oretile/graph.hpp"
#include "oretile/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oretile {

enum class Provenance { original, sliced, large_part, small_part, final_tile };

struct ConnectionEntry {
    Connection kind = Connection::under;
    // Positions of the k-clique whose clusters are adjacent to every cluster of the smaller clique.
    std::vector<int> b_positions;
};

struct RegularClique {
    int id = -1;
    std::vector<Integer> sizes; // cluster sizes; for unbalanced products the small cluster is last
    Integer multiplicity = 1;   // identical copies folded into one record
    Provenance provenance = Provenance::original;
    int parent = -1;
    bool good = true;
    // For cliques of order < k: links to original k-cliques (missing means under-connected).
    std::map<int, ConnectionEntry> links;

    int order() const { return static_cast<int>(sizes.size()); }
    Integer mass() const;
};

struct ClusterSystem {
    int k = 0;
    std::map<int, RegularClique> cliques;
    int next_id = 0;

    int add(RegularClique c); // assigns an id when c.id < 0
    std::vector<int> family(int order) const; // ascending ids
    Integer mass() const;
    int cluster_count() const; // sum of order * multiplicity over original cliques
};

// Replace a clique by s copies with every size divided by s.
std::vector<int> s_partition(ClusterSystem& sys, int clique_id, int s);

enum class ElimMode { typical, atypical };

struct EliminationRecord {
    int clique = -1;
    int i = 0; // the clique has order k - i
    ElimMode mode = ElimMode::typical;
    std::vector<int> used; // pool members consumed, in order
    Integer l_prime, t1, t2, per_round, rounds;
    Integer large_size, small_size;
    Integer consumed_mass, produced_mass;
    Rational availability_slack; // measured lambda for Step 2, the guaranteed lambda bound for Step 3
    Integer pool_margin;         // connected L'-cliques on offer minus rounds
};

// Eliminate a (k-i)-clique with k-cliques of cluster size L' from pool (consumed in the given
// order). All sizes are checked for integrality before anything is changed.
EliminationRecord eliminate_clique(ClusterSystem& sys, int clique_id, const std::vector<int>& pool,
                                   const AlphaPrime& ap, ElimMode mode);

struct LedgerEntry {
    std::string step;
    int clique = -1;
    Integer consumed;
    Integer produced;
    std::string note;
};

struct TileProfile {
    Integer width;
    Integer small;
    Integer count;
};

struct DecompositionCertificate {
    int k = 0;
    Rational alpha, mu, s;
    AlphaPrime alpha_prime;
    int c_t = 0;
    Integer L, L_prime, L1;
    Integer min_valid_L;
    Rational realized_c; // L1 / (mu L)
    PhiVector phi;
    std::vector<Rational> lambda;               // measured, index i = 1..k-1 (0 when unused)
    std::vector<Rational> availability_slack;   // index i = 1..k-1, measured lambda
    std::vector<Rational> bound_slack;          // index i = 1..k-1, lambda at its lower bound (d = eps = 0)
    std::vector<EliminationRecord> eliminations;
    std::vector<int> exceptional_cliques;
    Integer exceptional_mass;
    std::vector<TileProfile> intermediate; // Step 2/3 products and leftover balanced cliques
    TileProfile tiles;                     // final uniform profile and count
    std::vector<LedgerEntry> ledger;
    Integer input_mass, output_mass;
    Integer residue;
};

// lcm of the denominators that make every Step 1-4 size integral, given which orders < k occur.
Integer minimal_valid_L(const Rational& alpha, int k, const Rational& mu, const std::vector<int>& i_values);

PhiVector system_phi(const ClusterSystem& sys);

DecompositionCertificate run_decomposition(ClusterSystem sys, const Rational& alpha, const Rational& mu,
                                           const Integer& L);

// Cluster system of a reduced graph R with a k-clique cover: every cluster has size L and the
// links are read off R.
ClusterSystem system_from_cover(const Graph& r, const CliqueCover& cover, const Integer& L);

struct SyntheticOptions {
    int max_small_per_family = 2;
    int atypical = 0;        // cliques of order k-1 given c_t exclusive over-connected k-cliques
    int extra_k = 0;         // additional k-cliques beyond what s >= mu needs
    int under_permille = 50; // chance that a typical link is dropped
};

// Random abstract system with s >= mu, or nullopt when no system with the requested small
// families can reach s >= mu (1/k - (k-1) gamma < mu).
std::optional<ClusterSystem> synthetic_system(int k, const Rational& alpha, const Rational& mu,
                                              const Integer& L, std::uint64_t seed,
                                              const SyntheticOptions& opt = {});

struct BalancedDecomposition {
    std::vector<VertexSet> tiles; // k-tuples of R-vertices
    VertexSet exceptional;        // uncovered R-vertices
    Rational padding_s;           // (d + 2 eps) l
    Rational bound;               // k(k-1) s + (k-1)^2
    Integer exceptional_mass;     // |exceptional| * L
    bool mass_bound_applicable = false; // (k-1)^2 <= k(k-1)(d - 2 eps) l and eps <= d
    bool mass_bound_holds = false;      // exceptional_mass <= 2 k^2 d l L
};

BalancedDecomposition run_balanced_decomposition(const Graph& r, int k, const Integer& L,
                                                 const Rational& d, const Rational& eps,
                                                 long long budget = 5'000'000);

std::string to_string(Provenance p);

} // namespace oretile
