#include "oretile/decomposition.hpp"

#include "oretile/errors.hpp"
#include "oretile/tiling.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace oretile {

namespace {

Integer lcm_int(const Integer& a, const Integer& b) { return a / boost::multiprecision::gcd(a, b) * b; }

// value must be a nonnegative integer; returns it
Integer whole(const Rational& value, const std::string& what)
{
    if (denom(value) != 1)
        throw PreconditionError(what + " = " + to_string(value) + " is not integral");
    return numer(value);
}

void require_positive(const Integer& v, const std::string& what)
{
    if (v <= 0)
        throw PreconditionError(what + " must be positive");
}

} // namespace

std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::original: return "original";
    case Provenance::sliced: return "sliced";
    case Provenance::large_part: return "large-part";
    case Provenance::small_part: return "small-part";
    case Provenance::final_tile: return "tile";
    }
    return "?";
}

Integer RegularClique::mass() const
{
    Integer m = 0;
    for (const auto& x : sizes)
        m += x;
    return m * multiplicity;
}

int ClusterSystem::add(RegularClique c)
{
    if (c.id < 0)
        c.id = next_id;
    if (cliques.count(c.id))
        throw PreconditionError("duplicate clique id " + std::to_string(c.id));
    next_id = std::max(next_id, c.id + 1);
    int id = c.id;
    cliques.emplace(id, std::move(c));
    return id;
}

std::vector<int> ClusterSystem::family(int order) const
{
    std::vector<int> ids;
    for (const auto& [id, c] : cliques)
        if (c.order() == order)
            ids.push_back(id);
    return ids;
}

Integer ClusterSystem::mass() const
{
    Integer m = 0;
    for (const auto& [id, c] : cliques)
        m += c.mass();
    return m;
}

int ClusterSystem::cluster_count() const
{
    Integer total = 0;
    for (const auto& [id, c] : cliques)
        if (c.provenance == Provenance::original)
            total += c.order() * c.multiplicity;
    return static_cast<int>(total);
}

std::vector<int> s_partition(ClusterSystem& sys, int clique_id, int s)
{
    auto it = sys.cliques.find(clique_id);
    if (it == sys.cliques.end())
        throw PreconditionError("no clique " + std::to_string(clique_id));
    if (s < 1)
        throw PreconditionError("partition count must be positive");
    if (s == 1)
        return {clique_id};
    RegularClique base = it->second;
    for (const auto& x : base.sizes)
        if (x % s != 0)
            throw PreconditionError("cluster size " + x.str() + " is not divisible by " + std::to_string(s));
    sys.cliques.erase(it);
    std::vector<int> out;
    for (int part = 0; part < s; ++part) {
        RegularClique c;
        for (const auto& x : base.sizes)
            c.sizes.push_back(x / s);
        c.multiplicity = base.multiplicity;
        c.provenance = Provenance::sliced;
        c.parent = base.provenance == Provenance::sliced ? base.parent : base.id;
        c.good = base.good;
        c.links = base.links;
        out.push_back(sys.add(std::move(c)));
    }
    return out;
}

EliminationRecord eliminate_clique(ClusterSystem& sys, int clique_id, const std::vector<int>& pool,
                                   const AlphaPrime& ap, ElimMode mode)
{
    const int k = sys.k;
    auto it = sys.cliques.find(clique_id);
    if (it == sys.cliques.end())
        throw PreconditionError("no clique " + std::to_string(clique_id));
    const RegularClique& K = it->second;
    const int i = k - K.order();
    if (i < 1 || i > k - 1)
        throw PreconditionError("only cliques of order 1..k-1 are eliminated");
    if (K.multiplicity != 1)
        throw PreconditionError("eliminated clique must be a single record");
    const Rational& a = ap.value;

    EliminationRecord rec;
    rec.clique = clique_id;
    rec.i = i;
    rec.mode = mode;
    if (pool.empty())
        throw PreconditionError("empty pool for clique " + std::to_string(clique_id));
    const RegularClique& first = sys.cliques.at(pool.front());
    rec.l_prime = first.sizes.front();
    const Rational lp(rec.l_prime);

    rec.t1 = whole(lp / i, "t1 = L'/i");
    rec.t2 = whole((1 - a) * lp / (i * (i - 1 + a)), "t2");
    rec.large_size = whole((i - 1 + a) * lp / i, "large part");
    rec.small_size = whole((1 - a) * lp / i, "small part");
    whole(a * Rational(rec.t1), "alpha' t1");
    whole(a * Rational(rec.t2), "alpha' t2");
    rec.per_round = i * rec.t2;
    require_positive(rec.t2, "t2");

    Integer size_k = K.sizes.front();
    for (const auto& x : K.sizes)
        if (x != size_k)
            throw PreconditionError("eliminated clique must have equal cluster sizes");
    if (size_k % rec.per_round != 0)
        throw PreconditionError("cluster size " + size_k.str() + " is not a multiple of the per-round use " +
                                rec.per_round.str());
    rec.rounds = size_k / rec.per_round;
    if (Integer(pool.size()) < rec.rounds)
        throw PreconditionError("pool holds " + std::to_string(pool.size()) + " k-cliques, " +
                                rec.rounds.str() + " needed");

    // validate every pool member before touching anything
    const int need = static_cast<int>(rec.rounds);
    const Connection want = mode == ElimMode::typical ? Connection::well : Connection::over;
    std::vector<std::vector<int>> b_sets;
    for (int r = 0; r < need; ++r) {
        auto pit = sys.cliques.find(pool[r]);
        if (pit == sys.cliques.end())
            throw PreconditionError("pool clique " + std::to_string(pool[r]) + " is gone");
        const RegularClique& P = pit->second;
        if (P.order() != k || P.multiplicity != 1)
            throw PreconditionError("pool members must be single k-cliques");
        for (const auto& x : P.sizes)
            if (x != rec.l_prime)
                throw PreconditionError("pool members must have cluster size L'");
        int origin = P.provenance == Provenance::sliced ? P.parent : P.id;
        auto link = K.links.find(origin);
        if (link == K.links.end() || link->second.kind != want)
            throw PreconditionError("pool clique " + std::to_string(pool[r]) + " is not " +
                                    (mode == ElimMode::typical ? "well" : "over") + "-connected");
        if (static_cast<int>(link->second.b_positions.size()) < i)
            throw LemmaViolation("k-clique " + std::to_string(origin) + " has fewer than " +
                                 std::to_string(i) + " clusters adjacent to all of clique " +
                                 std::to_string(clique_id));
        b_sets.emplace_back(link->second.b_positions.begin(), link->second.b_positions.begin() + i);
    }

    // mutate
    rec.consumed_mass = 0;
    for (int r = 0; r < need; ++r) {
        rec.consumed_mass += sys.cliques.at(pool[r]).mass();
        sys.cliques.erase(pool[r]);
        rec.used.push_back(pool[r]);
    }
    rec.consumed_mass += K.mass();
    const int kid = K.id;
    sys.cliques.erase(it);

    auto product = [&](const Integer& t, Provenance prov) {
        RegularClique c;
        c.sizes.assign(k - 1, t);
        c.sizes.push_back(numer(a * Rational(t)));
        c.multiplicity = rec.rounds * i;
        c.provenance = prov;
        c.parent = kid;
        return c;
    };
    RegularClique large = product(rec.t1, Provenance::large_part);
    RegularClique small = product(rec.t2, Provenance::small_part);
    rec.produced_mass = large.mass() + small.mass();
    sys.add(std::move(large));
    sys.add(std::move(small));
    if (rec.produced_mass != rec.consumed_mass)
        throw LemmaViolation("elimination of clique " + std::to_string(kid) + " does not conserve mass");
    return rec;
}

Integer minimal_valid_L(const Rational& alpha, int k, const Rational& mu, const std::vector<int>& i_values)
{
    AlphaPrime ap = alpha_prime(alpha, k, mu);
    const Integer p = ap.p, q = ap.q;
    const Rational lp = Rational(1) / Rational(q - p); // L' per unit of L
    std::vector<Rational> coeffs{lp, lp / Rational((k - 1) * q + p)};
    for (int i : i_values) {
        coeffs.push_back(lp / Rational(i * q));
        coeffs.push_back(Rational(q - p) * lp / Rational(i * ((i - 1) * q + p) * q));
    }
    Integer l = 1;
    for (const auto& c : coeffs)
        l = lcm_int(l, denom(c));
    return l;
}

PhiVector system_phi(const ClusterSystem& sys)
{
    const int k = sys.k;
    PhiVector phi(k + 1, Rational(0));
    Integer ell = 0;
    for (const auto& [id, c] : sys.cliques) {
        if (c.order() < 1 || c.order() > k)
            throw PreconditionError("clique order out of range");
        ell += c.order() * c.multiplicity;
    }
    if (ell == 0)
        throw PreconditionError("empty cluster system");
    for (const auto& [id, c] : sys.cliques)
        phi[c.order()] += Rational(c.multiplicity) / Rational(ell);
    return phi;
}

DecompositionCertificate run_decomposition(ClusterSystem sys, const Rational& alpha, const Rational& mu,
                                           const Integer& L)
{
    const int k = sys.k;
    if (k < 2)
        throw PreconditionError("k must be at least 2");
    DecompositionCertificate cert;
    cert.k = k;
    cert.alpha = alpha;
    cert.mu = mu;
    cert.L = L;
    for (const auto& [id, c] : sys.cliques) {
        if (c.provenance != Provenance::original || c.multiplicity != 1)
            throw PreconditionError("input cliques must be single original records");
        for (const auto& x : c.sizes)
            if (x != L)
                throw PreconditionError("every input cluster must have size L");
    }

    cert.phi = system_phi(sys);
    const Rational gamma = gamma_param(k, alpha);
    cert.s = s_param(cert.phi, k, gamma);
    if (cert.s < mu)
        throw PreconditionError("s >= mu fails: s = " + to_string(cert.s) + ", slack " + to_string(cert.s - mu));
    cert.alpha_prime = alpha_prime(alpha, k, mu);
    const Rational& a = cert.alpha_prime.value;
    const Integer p = cert.alpha_prime.p, q = cert.alpha_prime.q;
    cert.c_t = typicality_threshold(a, k);

    std::vector<int> i_values;
    for (int i = 1; i <= k - 1; ++i)
        if (!sys.family(k - i).empty())
            i_values.push_back(i);
    cert.min_valid_L = minimal_valid_L(alpha, k, mu, i_values);
    if (L % cert.min_valid_L != 0)
        throw PreconditionError("L = " + L.str() + " is not a multiple of the divisor set lcm " +
                                cert.min_valid_L.str());
    cert.L_prime = L / (q - p);
    cert.input_mass = sys.mass();

    // typicality and measured lambda (all before Step 1, on the original k-cliques)
    const std::vector<int> originals_k = sys.family(k);
    std::map<int, bool> typical;
    cert.lambda.assign(k, Rational(0));
    cert.availability_slack.assign(k, Rational(0));
    cert.bound_slack.assign(k, Rational(0));
    const Integer ell = sys.cluster_count();
    for (int i : i_values) {
        Rational lam0 = lambda_lower(i, cert.phi, k, gamma, cert.s, Rational(0), Rational(0));
        Feasibility f0 = feasibility_ii(i, lam0, cert.phi, alpha, a, k, cert.s, mu);
        cert.bound_slack[i] = f0.availability_slack;
        if (!f0.availability)
            throw LemmaViolation("availability inequality fails at the lambda bound for i = " + std::to_string(i));
        std::vector<Rational> values;
        for (int id : sys.family(k - i)) {
            const auto& K = sys.cliques.at(id);
            int over = 0, well = 0;
            for (const auto& [to, e] : K.links) {
                over += e.kind == Connection::over;
                well += e.kind == Connection::well;
            }
            typical[id] = over < cert.c_t;
            if (typical[id])
                values.push_back(Rational(well) / Rational(ell));
        }
        if (values.empty())
            continue;
        std::sort(values.begin(), values.end());
        // one clique per family may fall below the bound
        cert.lambda[i] = values.size() >= 2 ? values[1] : values[0];
        Feasibility f = feasibility_ii(i, cert.lambda[i], cert.phi, alpha, a, k, cert.s, mu);
        cert.availability_slack[i] = f.availability_slack;
        if (!f.availability)
            throw PreconditionError("availability inequality fails for i = " + std::to_string(i) +
                                    ", slack " + to_string(f.availability_slack));
    }

    // Step 1
    const int parts = static_cast<int>(q - p);
    for (int id : originals_k) {
        Integer before = sys.cliques.at(id).mass();
        s_partition(sys, id, parts);
        cert.ledger.push_back({"step1", id, before, before, "sliced into " + std::to_string(parts)});
    }

    // Steps 2 and 3
    std::map<int, int> consumed_by;
    for (ElimMode mode : {ElimMode::typical, ElimMode::atypical}) {
        const Connection want = mode == ElimMode::typical ? Connection::well : Connection::over;
        for (int i = 1; i <= k - 1; ++i) {
            int absorbed = 0;
            for (int id : sys.family(k - i)) {
                const auto& K = sys.cliques.at(id);
                if (K.provenance != Provenance::original || typical[id] != (mode == ElimMode::typical))
                    continue;
                std::vector<int> pool;
                for (int cand : sys.family(k)) {
                    const auto& P = sys.cliques.at(cand);
                    if (P.provenance != Provenance::sliced)
                        continue;
                    auto link = K.links.find(P.parent);
                    if (link != K.links.end() && link->second.kind == want)
                        pool.push_back(cand);
                }
                Integer rounds = (i - 1) * q + p;
                if (Integer(pool.size()) < rounds) {
                    if (mode == ElimMode::atypical)
                        throw LemmaViolation("atypical clique " + std::to_string(id) + " has only " +
                                             std::to_string(pool.size()) + " over-connected k-cliques");
                    if (++absorbed > 1)
                        throw LemmaViolation("a second clique of order " + std::to_string(k - i) +
                                             " lacks well-connected k-cliques");
                    Integer m = K.mass();
                    cert.exceptional_cliques.push_back(id);
                    cert.exceptional_mass += m;
                    cert.ledger.push_back({"exceptional", id, m, m, "absorbed into the exceptional set"});
                    sys.cliques.erase(id);
                    continue;
                }
                for (int r = 0; r < static_cast<int>(rounds); ++r) {
                    int origin = sys.cliques.at(pool[r]).parent;
                    auto [pos, fresh] = consumed_by.emplace(origin, id);
                    if (!fresh && pos->second != id && mode == ElimMode::atypical)
                        throw LemmaViolation("k-clique " + std::to_string(origin) +
                                             " serves more than one small clique in Step 3");
                }
                EliminationRecord rec = eliminate_clique(sys, id, pool, cert.alpha_prime, mode);
                rec.availability_slack =
                    mode == ElimMode::typical ? cert.availability_slack[i] : cert.bound_slack[i];
                rec.pool_margin = Integer(pool.size()) - rec.rounds;
                cert.ledger.push_back({mode == ElimMode::typical ? "step2" : "step3", id, rec.consumed_mass,
                                       rec.produced_mass,
                                       "i=" + std::to_string(i) + " rounds=" + rec.rounds.str()});
                cert.eliminations.push_back(std::move(rec));
            }
        }
    }
    for (int i = 1; i <= k - 1; ++i)
        for (int id : sys.family(k - i))
            throw LemmaViolation("clique " + std::to_string(id) + " survived Steps 2-3");

    // Step 4
    std::vector<Integer> widths;
    for (const auto& [id, c] : sys.cliques)
        if (c.provenance != Provenance::sliced)
            widths.push_back(c.sizes.front());
    Integer g = cert.L_prime / ((k - 1) * q + p);
    for (const auto& w : widths)
        g = boost::multiprecision::gcd(g, Integer(w / q));
    for (const auto& w : widths)
        if (w % q != 0)
            throw LemmaViolation("product width " + w.str() + " is not a multiple of q");
    cert.L1 = q * g;
    require_positive(cert.L1, "L1");
    const Integer small1 = numer(a * Rational(cert.L1));
    cert.realized_c = Rational(cert.L1) / (mu * Rational(L));

    Integer tiles = 0;
    std::map<std::pair<Integer, Integer>, Integer> profile_counts;
    for (const auto& [id, c] : sys.cliques) {
        Integer made;
        if (c.provenance == Provenance::sliced) {
            // rotate the small cluster: x copies per position
            Rational x = Rational(q * c.sizes.front()) / Rational(((k - 1) * q + p) * cert.L1);
            made = whole(x, "balanced split count") * k * c.multiplicity;
        } else {
            if (c.sizes.back() != numer(a * Rational(c.sizes.front())))
                throw LemmaViolation("product clique " + std::to_string(id) + " is not of profile (t, alpha' t)");
            made = c.sizes.front() / cert.L1 * c.multiplicity;
        }
        profile_counts[{c.sizes.front(), c.sizes.back()}] += c.multiplicity;
        Integer out_mass = made * ((k - 1) * cert.L1 + small1);
        if (out_mass != c.mass())
            throw LemmaViolation("Step 4 split of clique " + std::to_string(id) + " loses mass");
        cert.ledger.push_back({"step4", id, c.mass(), out_mass, to_string(c.provenance)});
        tiles += made;
    }
    for (const auto& [prof, count] : profile_counts)
        cert.intermediate.push_back({prof.first, prof.second, count});
    cert.tiles = {cert.L1, small1, tiles};
    cert.output_mass = tiles * ((k - 1) * cert.L1 + small1);
    cert.residue = cert.input_mass - cert.output_mass - cert.exceptional_mass;
    if (cert.residue != 0)
        throw LemmaViolation("mass residue " + cert.residue.str());
    return cert;
}

ClusterSystem system_from_cover(const Graph& r, const CliqueCover& cover, const Integer& L)
{
    validate_cover(r, cover);
    const int k = cover.k;
    ClusterSystem sys;
    sys.k = k;
    std::map<int, VertexSet> members;
    for (int order = k; order >= 1; --order)
        for (const auto& clique : cover.families[order]) {
            RegularClique c;
            c.sizes.assign(order, L);
            int id = sys.add(std::move(c));
            members[id] = clique;
        }
    for (auto& [id, c] : sys.cliques) {
        if (c.order() == k)
            continue;
        for (const auto& [kid, kc] : members) {
            if (static_cast<int>(kc.size()) != k)
                continue;
            ConnectionClass cc = classify_connection(r, members[id], kc);
            if (cc.kind == Connection::under)
                continue;
            ConnectionEntry e;
            e.kind = cc.kind;
            for (int pos = 0; pos < k; ++pos)
                if (r.degree_into(kc[pos], members[id]) == c.order())
                    e.b_positions.push_back(pos);
            c.links[kid] = e;
        }
    }
    return sys;
}

std::optional<ClusterSystem> synthetic_system(int k, const Rational& alpha, const Rational& mu,
                                              const Integer& L, std::uint64_t seed,
                                              const SyntheticOptions& opt)
{
    if (k < 2)
        throw PreconditionError("k must be at least 2");
    const Rational gamma = gamma_param(k, alpha);
    std::mt19937_64 rng(seed);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    // small families first, then enough k-cliques to push s past mu
    std::vector<int> count(k + 1, 0);
    for (int order = 1; order < k; ++order)
        count[order] = pick(opt.max_small_per_family + 1);
    if (opt.atypical > 0 && count[k - 1] < opt.atypical)
        count[k - 1] = opt.atypical;
    const Rational s_limit = Rational(1, k) - (k - 1) * gamma;
    bool any_small = false;
    for (int order = 1; order < k; ++order)
        any_small = any_small || count[order] > 0;
    if (s_limit < mu || (s_limit == mu && any_small))
        return std::nullopt;
    auto s_of = [&](int nk) {
        Rational ell = 0, minus = 0;
        for (int order = 1; order < k; ++order) {
            ell += order * count[order];
            minus += (k - order - 1) * count[order];
        }
        ell += k * nk;
        return Rational(nk) / ell - minus / ell - (k - 1) * gamma;
    };
    int nk = 1;
    while (s_of(nk) < mu)
        ++nk;
    int over_needed = 0;
    const int ct = alpha < 1 ? typicality_threshold(alpha_prime(alpha, k, mu).value, k) : 0;
    over_needed = opt.atypical * ct;
    nk += over_needed + opt.extra_k;
    count[k] = nk;

    ClusterSystem sys;
    sys.k = k;
    std::vector<int> kids;
    for (int c = 0; c < count[k]; ++c) {
        RegularClique rc;
        rc.sizes.assign(k, L);
        kids.push_back(sys.add(std::move(rc)));
    }
    auto random_positions = [&](int want, int extra) {
        std::vector<int> pos(k);
        std::iota(pos.begin(), pos.end(), 0);
        for (int x = k - 1; x > 0; --x)
            std::swap(pos[x], pos[pick(x + 1)]);
        pos.resize(std::min(k, want + extra));
        std::sort(pos.begin(), pos.end());
        return pos;
    };
    // the first over_needed k-cliques are reserved for the atypical cliques
    int next_reserved = 0;
    int made_atypical = 0;
    for (int order = k - 1; order >= 1; --order)
        for (int c = 0; c < count[order]; ++c) {
            const int i = k - order;
            RegularClique rc;
            rc.sizes.assign(order, L);
            if (order == k - 1 && made_atypical < opt.atypical) {
                ++made_atypical;
                for (int r = 0; r < ct; ++r)
                    rc.links[kids[next_reserved++]] = {Connection::over, random_positions(i, pick(k - i + 1))};
            } else {
                for (int x = over_needed; x < nk; ++x)
                    if (pick(1000) >= opt.under_permille)
                        rc.links[kids[x]] = {Connection::well, random_positions(i, 0)};
            }
            sys.add(std::move(rc));
        }
    return sys;
}

BalancedDecomposition run_balanced_decomposition(const Graph& r, int k, const Integer& L, const Rational& d,
                                                 const Rational& eps, long long budget)
{
    const int ell = r.order();
    BalancedDecomposition out;
    out.padding_s = (d + 2 * eps) * ell;
    out.bound = padded_leftover_bound(k, out.padding_s);
    TilingResult t = kk_tiling_padded(r, k, out.padding_s, budget);
    out.tiles = t.copies;
    out.exceptional = t.leftover;
    out.exceptional_mass = Integer(out.exceptional.size()) * L;
    if (Rational(static_cast<long long>(out.exceptional.size())) > out.bound)
        throw LemmaViolation("exceptional cluster count exceeds k(k-1)s + (k-1)^2");
    // the mass estimate needs (k-1)^2 <= k(k-1)(d - 2 eps) l, i.e. l large enough
    out.mass_bound_applicable = eps <= d && Rational((k - 1) * (k - 1)) <= k * (k - 1) * (d - 2 * eps) * ell;
    out.mass_bound_holds =
        Rational(out.exceptional_mass) <= 2 * k * k * d * Rational(L * ell);
    if (out.mass_bound_applicable && !out.mass_bound_holds)
        throw LemmaViolation("exceptional mass exceeds 2k^2 d n");
    return out;
}

} // namespace oretile
