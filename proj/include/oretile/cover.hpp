#pragma once

#include "oretile/graph.hpp"
#include "oretile/rational.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace oretile {

inline constexpr int exact_cover_order_cap = 16;

struct CliqueCover {
    int k = 0;
    // families[i] holds the cliques of order i; index 0 is unused.
    std::vector<std::vector<VertexSet>> families;
    bool certified = false;

    // (|family k|, ..., |family 1|)
    std::vector<int> signature() const;
    int vertex_count() const;
};

enum class CoverMode { exact, heuristic };
enum class Connection { well, over, under };

struct ConnectionClass {
    Connection kind = Connection::under;
    long long edges = 0;
};

struct ABPartition {
    VertexSet a; // i - 1 neighbours in each of K1, K2
    VertexSet b; // i neighbours in each of K1, K2
};

struct AuditCheck {
    std::string name;
    bool applicable = true;
    bool passed = true;
    long long instances = 0;
    std::string witness; // first failure, human readable
};

struct CoverAudit {
    std::vector<AuditCheck> checks;
    bool all_passed() const;
    const AuditCheck& check(const std::string& name) const;
};

CliqueCover maximal_clique_cover(const Graph& g, int k, CoverMode mode, long long budget = 50'000'000);
std::optional<CliqueCover> merge_step(const Graph& g, const CliqueCover& cover);
ConnectionClass classify_connection(const Graph& g, const VertexSet& ki, const VertexSet& kj);
ABPartition ab_partition(const Graph& g, const VertexSet& k1, const VertexSet& k2, const VertexSet& kj);

// phi values in signature order (phi_k, ..., phi_1).
std::vector<Rational> phi_vector(const CliqueCover& cover, int ell);
// phi values indexed by clique order: result[i] = phi_i, result[0] = 0.
std::vector<Rational> phi_by_order(const CliqueCover& cover, int ell);

CoverAudit audit_cover(const Graph& g, const CliqueCover& cover, const Rational& gamma,
                       const Rational& d, const Rational& eps);

void validate_cover(const Graph& g, const CliqueCover& cover);
void write_cover(std::ostream& out, const CliqueCover& cover);
CliqueCover read_cover(std::istream& in, int k);

} // namespace oretile
