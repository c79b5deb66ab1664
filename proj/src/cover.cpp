#include "oretile/cover.hpp"

#include "oretile/chromatic.hpp"
#include "oretile/errors.hpp"
#include "oretile/packing.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace oretile {

std::vector<int> CliqueCover::signature() const
{
    std::vector<int> sig;
    for (int i = k; i >= 1; --i)
        sig.push_back(i < static_cast<int>(families.size()) ? static_cast<int>(families[i].size()) : 0);
    return sig;
}

int CliqueCover::vertex_count() const
{
    int total = 0;
    for (std::size_t i = 1; i < families.size(); ++i)
        total += static_cast<int>(i * families[i].size());
    return total;
}

bool CoverAudit::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

const AuditCheck& CoverAudit::check(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return c;
    throw std::out_of_range("no audit check named " + name);
}

namespace {

std::string set_text(const VertexSet& s)
{
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? " " : "") + std::to_string(s[i]);
    return out + "}";
}

// Lexicographically first clique of the given size inside `avail` (sorted).
std::optional<VertexSet> find_clique(const Graph& g, const VertexSet& avail, int size)
{
    VertexSet cur;
    std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
        if (static_cast<int>(cur.size()) == size)
            return true;
        for (std::size_t i = from; i + (size - cur.size()) <= avail.size(); ++i) {
            int v = avail[i];
            bool ok = true;
            for (int u : cur)
                if (! g.adjacent(u, v)) {
                    ok = false;
                    break;
                }
            if (! ok)
                continue;
            cur.push_back(v);
            if (rec(i + 1))
                return true;
            cur.pop_back();
        }
        return false;
    };
    if (rec(0))
        return cur;
    return std::nullopt;
}

// Greedily packs `pool` into cliques of order at most k, largest first.
void greedy_pack(const Graph& g, VertexSet pool, int k, CliqueCover& cover)
{
    std::sort(pool.begin(), pool.end());
    for (int size = k; size >= 1 && ! pool.empty(); --size)
        while (auto c = find_clique(g, pool, size)) {
            cover.families[size].push_back(*c);
            VertexSet rest;
            std::set_difference(pool.begin(), pool.end(), c->begin(), c->end(),
                                std::back_inserter(rest));
            pool = std::move(rest);
        }
}

void normalize(CliqueCover& cover)
{
    for (auto& fam : cover.families) {
        for (auto& c : fam)
            std::sort(c.begin(), c.end());
        std::sort(fam.begin(), fam.end());
    }
}

// Exhaustive lexicographic maximisation over vertex masks.
class ExactCover {
public:
    ExactCover(const Graph& g, long long budget) : g_(g), budget_(budget)
    {
        nbr_.assign(g.order(), 0);
        for (int v = 0; v < g.order(); ++v)
            for (int u : g.neighbors(v))
                nbr_[v] |= 1U << u;
    }

    struct Best {
        std::vector<int> sig; // counts for orders j..1
        std::vector<VertexSet> cliques;
    };

    const Best& solve(std::uint32_t mask, int j)
    {
        std::uint64_t key = mask | (static_cast<std::uint64_t>(j) << 32);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        Best best;
        if (j == 1) {
            best.sig = {std::popcount(mask)};
            for (int v = 0; v < g_.order(); ++v)
                if ((mask >> v) & 1U)
                    best.cliques.push_back({v});
        }
        else {
            bool have = false;
            std::vector<VertexSet> chosen;
            pack(mask, 0, j, chosen, best, have);
        }
        return memo_.emplace(key, std::move(best)).first->second;
    }

private:
    void pack(std::uint32_t avail, std::uint32_t leftover, int j, std::vector<VertexSet>& chosen,
              Best& best, bool& have)
    {
        if (++nodes_ > budget_)
            throw BudgetExhausted("exact clique cover exceeded node budget");
        const int count = static_cast<int>(chosen.size());
        if (have && count + std::popcount(avail) / j < best.sig[0])
            return;
        if (avail == 0) {
            const Best& rest = solve(leftover, j - 1);
            std::vector<int> sig{count};
            sig.insert(sig.end(), rest.sig.begin(), rest.sig.end());
            if (! have || sig > best.sig) {
                have = true;
                best.sig = std::move(sig);
                best.cliques = chosen;
                best.cliques.insert(best.cliques.end(), rest.cliques.begin(), rest.cliques.end());
            }
            return;
        }
        const int v = std::countr_zero(avail);
        const std::uint32_t vbit = 1U << v;
        // j-cliques through v inside avail.
        VertexSet clique{v};
        std::function<void(std::uint32_t)> grow = [&](std::uint32_t cand) {
            if (static_cast<int>(clique.size()) == j) {
                std::uint32_t cmask = 0;
                for (int u : clique)
                    cmask |= 1U << u;
                chosen.push_back(clique);
                pack(avail & ~cmask, leftover, j, chosen, best, have);
                chosen.pop_back();
                return;
            }
            while (cand) {
                int u = std::countr_zero(cand);
                cand &= cand - 1;
                if (std::popcount(cand) + 1 + static_cast<int>(clique.size()) < j)
                    return;
                clique.push_back(u);
                grow(cand & nbr_[u]);
                clique.pop_back();
            }
        };
        grow(avail & nbr_[v] & ~vbit);
        pack(avail & ~vbit, leftover | vbit, j, chosen, best, have);
    }

    const Graph& g_;
    long long budget_;
    long long nodes_ = 0;
    std::vector<std::uint32_t> nbr_;
    std::unordered_map<std::uint64_t, Best> memo_;
};

AuditCheck named_check(const char* name)
{
    AuditCheck c;
    c.name = name;
    return c;
}

void require_clique(const Graph& g, const VertexSet& s, const char* what)
{
    if (s.empty() || ! g.is_clique(s))
        throw PreconditionError(std::string(what) + " must be a nonempty clique");
}

} // namespace

void validate_cover(const Graph& g, const CliqueCover& cover)
{
    std::vector<char> seen(g.order(), 0);
    int covered = 0;
    for (std::size_t i = 1; i < cover.families.size(); ++i)
        for (const auto& c : cover.families[i]) {
            if (static_cast<int>(i) > cover.k || c.size() != i || ! g.is_clique(c))
                throw PreconditionError("cover member " + set_text(c) + " is not a clique of order " +
                                        std::to_string(i));
            for (int v : c) {
                if (v < 0 || v >= g.order() || seen[v])
                    throw PreconditionError("cover members overlap or leave the vertex range");
                seen[v] = 1;
                ++covered;
            }
        }
    if (covered != g.order())
        throw PreconditionError("cover does not span the graph");
}

CliqueCover maximal_clique_cover(const Graph& g, int k, CoverMode mode, long long budget)
{
    if (k < 2)
        throw PreconditionError("clique cover needs k >= 2");
    CliqueCover cover;
    cover.k = k;
    cover.families.assign(k + 1, {});
    if (mode == CoverMode::exact) {
        if (g.order() > exact_cover_order_cap)
            throw PreconditionError("exact clique cover is capped at 16 vertices");
        ExactCover solver(g, budget);
        std::uint32_t all = g.order() == 32 ? ~0U : ((1U << g.order()) - 1);
        const auto& best = solver.solve(all, k);
        for (const auto& c : best.cliques)
            cover.families[c.size()].push_back(c);
        cover.certified = true;
        normalize(cover);
        return cover;
    }

    VertexSet all(g.order());
    for (int v = 0; v < g.order(); ++v)
        all[v] = v;
    greedy_pack(g, all, k, cover);
    normalize(cover);
    while (auto next = merge_step(g, cover))
        cover = std::move(*next);
    cover.certified = false;
    return cover;
}

std::optional<CliqueCover> merge_step(const Graph& g, const CliqueCover& cover)
{
    validate_cover(g, cover);
    for (int i = cover.k - 1; i >= 1; --i) {
        const auto& fam = cover.families[i];
        for (std::size_t x = 0; x < fam.size(); ++x)
            for (std::size_t y = x + 1; y < fam.size(); ++y) {
                auto m = complement_perfect_matching(g, fam[x], fam[y]);
                if (m.perfect)
                    continue;
                // S from the Hall violator, T = members of K' adjacent to all of S.
                VertexSet t;
                std::set_difference(fam[y].begin(), fam[y].end(), m.violator_neighbors.begin(),
                                    m.violator_neighbors.end(), std::back_inserter(t));
                VertexSet st = m.violator;
                st.insert(st.end(), t.begin(), t.end());
                std::sort(st.begin(), st.end());
                VertexSet q(st.begin(), st.begin() + i + 1);
                if (! g.is_clique(q))
                    throw LemmaViolation("Hall violator did not produce a clique");

                CliqueCover next;
                next.k = cover.k;
                next.families = cover.families;
                auto& fi = next.families[i];
                fi.erase(fi.begin() + static_cast<std::ptrdiff_t>(y));
                fi.erase(fi.begin() + static_cast<std::ptrdiff_t>(x));
                next.families[i + 1].push_back(q);
                VertexSet pool;
                for (int v : fam[x])
                    if (! std::binary_search(q.begin(), q.end(), v))
                        pool.push_back(v);
                for (int v : fam[y])
                    if (! std::binary_search(q.begin(), q.end(), v))
                        pool.push_back(v);
                for (const auto& c : next.families[1])
                    pool.push_back(c[0]);
                next.families[1].clear();
                greedy_pack(g, pool, cover.k, next);
                normalize(next);
                next.certified = false;
                return next;
            }
    }
    return std::nullopt;
}

ConnectionClass classify_connection(const Graph& g, const VertexSet& ki, const VertexSet& kj)
{
    require_clique(g, ki, "K^i");
    require_clique(g, kj, "K^j");
    if (ki.size() > kj.size())
        throw PreconditionError("classify_connection needs |K^i| <= |K^j|");
    for (int v : ki)
        if (std::find(kj.begin(), kj.end(), v) != kj.end())
            throw PreconditionError("cliques must be disjoint");
    const long long i = static_cast<long long>(ki.size()), j = static_cast<long long>(kj.size());
    ConnectionClass out;
    bool well = true;
    for (int v : ki) {
        int d = g.degree_into(v, kj);
        out.edges += d;
        well = well && d == j - 1;
    }
    if (well)
        out.kind = Connection::well;
    else if (out.edges >= i * (j - 1))
        out.kind = Connection::over;
    else
        out.kind = Connection::under;
    return out;
}

ABPartition ab_partition(const Graph& g, const VertexSet& k1, const VertexSet& k2, const VertexSet& kj)
{
    require_clique(g, k1, "K1");
    require_clique(g, k2, "K2");
    require_clique(g, kj, "K^j");
    const long long i = static_cast<long long>(k1.size()), j = static_cast<long long>(kj.size());
    if (k2.size() != k1.size() || i > j)
        throw PreconditionError("A/B partition needs |K1| = |K2| <= |K^j|");
    if (edges_between(g, k1, kj) != i * (j - 1) || edges_between(g, k2, kj) != i * (j - 1))
        throw PreconditionError("A/B partition needs e(K1,K^j) = e(K2,K^j) = i(j-1)");
    ABPartition out;
    for (int v : kj) {
        int d1 = g.degree_into(v, k1), d2 = g.degree_into(v, k2);
        if (d1 != d2)
            throw LemmaViolation("vertex " + std::to_string(v) + " sees K1 and K2 differently");
        if (d1 == i - 1)
            out.a.push_back(v);
        else if (d1 == i)
            out.b.push_back(v);
        else
            throw LemmaViolation("vertex " + std::to_string(v) + " has " + std::to_string(d1) +
                                 " neighbours in K1");
    }
    if (static_cast<long long>(out.a.size()) != i || static_cast<long long>(out.b.size()) != j - i)
        throw LemmaViolation("A/B sizes are " + std::to_string(out.a.size()) + "/" +
                             std::to_string(out.b.size()));
    std::sort(out.a.begin(), out.a.end());
    std::sort(out.b.begin(), out.b.end());
    return out;
}

std::vector<Rational> phi_by_order(const CliqueCover& cover, int ell)
{
    if (ell <= 0 || cover.vertex_count() != ell)
        throw PreconditionError("phi vector needs the cover to span ell vertices");
    std::vector<Rational> phi(cover.k + 1, Rational(0));
    Rational total = 0;
    for (int i = 1; i <= cover.k && i < static_cast<int>(cover.families.size()); ++i) {
        phi[i] = Rational(static_cast<long long>(cover.families[i].size()), ell);
        total += i * phi[i];
    }
    if (total != 1)
        throw LemmaViolation("sum of i * phi_i differs from 1");
    return phi;
}

std::vector<Rational> phi_vector(const CliqueCover& cover, int ell)
{
    auto by = phi_by_order(cover, ell);
    return {by.rbegin(), by.rend() - 1};
}

CoverAudit audit_cover(const Graph& g, const CliqueCover& cover, const Rational& gamma,
                       const Rational& d, const Rational& eps)
{
    validate_cover(g, cover);
    const int k = cover.k;
    const int ell = g.order();
    const auto& fam = cover.families;
    CoverAudit audit;

    AuditCheck c1 = named_check("edge-count bound between cover cliques");
    for (int i = 1; i < k; ++i)
        for (int j = i; j < k; ++j)
            for (const auto& ki : fam[i])
                for (const auto& kj : fam[j]) {
                    if (&ki == &kj)
                        continue;
                    ++c1.instances;
                    auto cc = classify_connection(g, ki, kj);
                    bool ok = cc.edges < i * (j - 1) || (cc.edges == i * (j - 1) && cc.kind == Connection::well);
                    if (! ok && c1.passed) {
                        c1.passed = false;
                        c1.witness = set_text(ki) + " -> " + set_text(kj) + " has " +
                                     std::to_string(cc.edges) + " edges";
                    }
                }
    audit.checks.push_back(c1);

    AuditCheck c2 = named_check("k cliques into a top clique");
    for (const auto& kk : fam[k])
        for (int i = 1; i < k; ++i) {
            if (static_cast<int>(fam[i].size()) < k)
                continue;
            std::vector<long long> e;
            for (const auto& ki : fam[i])
                e.push_back(edges_between(g, ki, kk));
            std::sort(e.rbegin(), e.rend());
            long long top = 0;
            for (int p = 0; p < k; ++p)
                top += e[p];
            ++c2.instances;
            if (top > static_cast<long long>(i) * k * (k - 1) && c2.passed) {
                c2.passed = false;
                c2.witness = std::to_string(k) + " cliques of order " + std::to_string(i) + " send " +
                             std::to_string(top) + " edges into " + set_text(kk);
            }
        }
    audit.checks.push_back(c2);

    AuditCheck c3 = named_check("A/B partition");
    for (int i = 1; i < k; ++i)
        for (std::size_t x = 0; x < fam[i].size(); ++x)
            for (std::size_t y = x + 1; y < fam[i].size(); ++y) {
                VertexSet a_union;
                for (int j = i; j < k; ++j)
                    for (const auto& kj : fam[j]) {
                        if (&kj == &fam[i][x] || &kj == &fam[i][y])
                            continue;
                        long long need = static_cast<long long>(i) * (j - 1);
                        if (edges_between(g, fam[i][x], kj) != need ||
                            edges_between(g, fam[i][y], kj) != need)
                            continue;
                        ++c3.instances;
                        try {
                            auto ab = ab_partition(g, fam[i][x], fam[i][y], kj);
                            a_union.insert(a_union.end(), ab.a.begin(), ab.a.end());
                        }
                        catch (const LemmaViolation& e) {
                            if (c3.passed) {
                                c3.passed = false;
                                c3.witness = set_text(fam[i][x]) + ", " + set_text(fam[i][y]) +
                                             " vs " + set_text(kj) + ": " + e.what();
                            }
                        }
                    }
                if (a_union.empty() || ! c3.passed)
                    continue;
                std::sort(a_union.begin(), a_union.end());
                if (chromatic_number(g.induced(a_union)) > i) {
                    c3.passed = false;
                    c3.witness = "union of A-sets " + set_text(a_union) + " is not " +
                                 std::to_string(i) + "-partite";
                }
            }
    audit.checks.push_back(c3);

    AuditCheck cm = named_check("complement matching between equal cliques");
    for (int i = 1; i < k; ++i)
        for (std::size_t x = 0; x < fam[i].size(); ++x)
            for (std::size_t y = x + 1; y < fam[i].size(); ++y) {
                ++cm.instances;
                auto m = complement_perfect_matching(g, fam[i][x], fam[i][y]);
                if (! m.perfect && cm.passed) {
                    cm.passed = false;
                    cm.witness = set_text(fam[i][x]) + ", " + set_text(fam[i][y]) +
                                 ": Hall violator " + set_text(m.violator);
                }
            }
    audit.checks.push_back(cm);

    // Degree-sum lower bound, meaningful only under the Ore-type hypothesis.
    AuditCheck c4 = named_check("degree-sum lower bound");
    const Rational t = (1 - Rational(1, k - 1) + gamma - d - 2 * eps) * ell;
    auto ore = ore_report_for(g, Rational(2));
    c4.applicable = ! ore.min_sum || Rational(*ore.min_sum) >= 2 * t;
    for (int i = 1; i < k && c4.applicable; ++i) {
        if (fam[i].size() < 2)
            continue;
        std::vector<long long> sums;
        for (const auto& ki : fam[i]) {
            long long s = 0;
            for (int v : ki)
                s += g.degree(v);
            sums.push_back(s);
        }
        std::sort(sums.begin(), sums.end());
        long long acc = sums[0];
        for (std::size_t p = 1; p < sums.size(); ++p) {
            acc += sums[p];
            ++c4.instances;
            long long cnt = static_cast<long long>(p + 1);
            if (Rational(acc) < cnt * i * t && c4.passed) {
                c4.passed = false;
                c4.witness = std::to_string(cnt) + " cliques of order " + std::to_string(i) +
                             " have degree sum " + std::to_string(acc);
            }
        }
    }
    audit.checks.push_back(c4);
    return audit;
}

void write_cover(std::ostream& out, const CliqueCover& cover)
{
    for (int i = cover.k; i >= 1; --i)
        for (const auto& c : cover.families[i]) {
            out << i << ':';
            for (int v : c)
                out << ' ' << v;
            out << '\n';
        }
}

CliqueCover read_cover(std::istream& in, int k)
{
    CliqueCover cover;
    cover.k = k;
    cover.families.assign(k + 1, {});
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("cover line without ':' - " + line);
        int i = std::stoi(line.substr(0, colon));
        if (i < 1 || i > k)
            throw std::runtime_error("cover clique order out of range: " + line);
        std::istringstream ls(line.substr(colon + 1));
        VertexSet c;
        int v;
        while (ls >> v)
            c.push_back(v);
        if (static_cast<int>(c.size()) != i)
            throw std::runtime_error("cover clique has wrong size: " + line);
        cover.families[i].push_back(c);
    }
    normalize(cover);
    return cover;
}

} // namespace oretile
