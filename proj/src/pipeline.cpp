#include "oretile/pipeline.hpp"

#include "oretile/errors.hpp"
#include "oretile/rng.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <set>

namespace oretile {

namespace {

// exact coin: true with probability num/den
bool coin(std::mt19937_64& rng, const Rational& p)
{
    if (p <= 0)
        return false;
    if (p >= 1)
        return true;
    const auto num = static_cast<std::uint64_t>(numer(p));
    const auto den = static_cast<std::uint64_t>(denom(p));
    return draw_below(rng, den) < num;
}

// least c >= 0 with c^2 >= x
Integer ceil_sqrt(const Rational& x)
{
    if (x <= 0)
        return 0;
    Integer c = boost::multiprecision::sqrt(floor_rat(x));
    while (Rational(c * c) < x)
        ++c;
    return c;
}

VertexSet unused_members(const TilingState& st, const VertexSet& cluster)
{
    VertexSet out;
    for (int v : cluster)
        if (!st.used[v])
            out.push_back(v);
    return out;
}

int degree_into_unused(const TilingState& st, int v, const VertexSet& cluster)
{
    int d = 0;
    for (int u : cluster)
        d += !st.used[u] && st.g.adjacent(v, u);
    return d;
}

// position of each color class for a pattern that puts class 0 at position p
std::vector<int> class_positions(int k, int p)
{
    std::vector<int> pos(k);
    pos[0] = p;
    for (int c = 1, slot = 0; c < k; ++c, ++slot) {
        if (slot == p)
            ++slot;
        pos[c] = slot;
    }
    return pos;
}

// Embed one copy of H with class c drawn from pools[c]; pin_h (if >= 0) is mapped to pin_g.
std::optional<VertexSet> embed_copy(const TilingState& st, const HProfile& hp,
                                    const std::vector<const VertexSet*>& pools, int pin_h, int pin_g,
                                    std::mt19937_64& rng, int retries)
{
    const Graph& h = hp.h;
    const int hn = h.order();
    std::vector<int> order;
    std::vector<char> in(hn, 0);
    if (pin_h >= 0) {
        order.push_back(pin_h);
        in[pin_h] = 1;
    }
    while (static_cast<int>(order.size()) < hn) {
        int pick = -1, links = -1;
        for (int x = 0; x < hn; ++x) {
            if (in[x])
                continue;
            int l = 0;
            for (int y : order)
                l += h.adjacent(x, y);
            if (l > links) {
                pick = x;
                links = l;
            }
        }
        in[pick] = 1;
        order.push_back(pick);
    }
    std::vector<char> taken(st.g.order(), 0);
    for (int attempt = 0; attempt < retries; ++attempt) {
        VertexSet image(hn, -1);
        bool ok = true;
        for (int x : order) {
            if (x == pin_h) {
                image[x] = pin_g;
                taken[pin_g] = 1;
                continue;
            }
            VertexSet cand;
            for (int v : *pools[hp.coloring[x]]) {
                if (st.used[v] || taken[v])
                    continue;
                bool fits = true;
                for (int y = 0; y < hn && fits; ++y)
                    if (image[y] >= 0 && h.adjacent(x, y) && !st.g.adjacent(v, image[y]))
                        fits = false;
                if (fits)
                    cand.push_back(v);
            }
            if (cand.empty()) {
                ok = false;
                break;
            }
            int v = cand[draw_below(rng, cand.size())];
            image[x] = v;
            taken[v] = 1;
        }
        for (int v : image)
            if (v >= 0)
                taken[v] = 0;
        if (ok)
            return image;
    }
    return std::nullopt;
}

void take_copy(TilingState& st, VertexSet copy)
{
    for (int v : copy) {
        if (st.used[v])
            throw LemmaViolation("vertex " + std::to_string(v) + " covered twice");
        st.used[v] = 1;
    }
    std::sort(copy.begin(), copy.end());
    st.copies.push_back(std::move(copy));
}

Rational low_split_fraction(const HProfile& hp)
{
    if (hp.balanced)
        return 1 - Rational(1, hp.k);
    if (hp.k < 2)
        throw PreconditionError("pattern must have at least two color classes");
    return 1 - Rational(1, hp.k - 1) + gamma_param(hp.k, hp.alpha);
}

// tile a clique of exceptional vertices in groups of |H|; returns the remainder
VertexSet tile_clique(TilingState& st, const HProfile& hp, const VertexSet& clique, int& copies)
{
    const int hn = hp.order();
    VertexSet rest = clique;
    std::sort(rest.begin(), rest.end());
    std::size_t at = 0;
    for (; at + hn <= rest.size(); at += hn) {
        VertexSet group(rest.begin() + at, rest.begin() + at + hn);
        if (!hosts_copy(st.g, group, hp.h))
            throw LemmaViolation("clique group does not host H");
        take_copy(st, group);
        ++copies;
    }
    return VertexSet(rest.begin() + at, rest.end());
}

// arithmetic plan for equal class sizes: one pattern suffices
ElementPlan finish_plan(const std::vector<long long>& sizes, const HProfile& hp, std::vector<long long> y)
{
    const int k = hp.k;
    ElementPlan plan;
    plan.sizes = sizes;
    plan.copies = y;
    plan.leftover = sizes;
    for (int p = 0; p < k; ++p) {
        auto pos = class_positions(k, p);
        for (int c = 0; c < k; ++c)
            plan.leftover[pos[c]] -= y[p] * hp.class_sizes[c];
        plan.total_copies += y[p];
    }
    for (int i = 0; i < k; ++i) {
        plan.total_leftover += plan.leftover[i];
        plan.imbalance += std::llabs(plan.leftover[i] - hp.omega);
    }
    return plan;
}

} // namespace

HProfile h_profile(const Graph& h)
{
    HProfile hp;
    hp.h = h;
    if (h.order() == 0 || h.edge_count() == 0)
        throw PreconditionError("pattern graph needs at least one edge");
    hp.coloring = smallest_class_coloring(h);
    hp.k = *std::max_element(hp.coloring.begin(), hp.coloring.end()) + 1;
    hp.class_sizes.assign(hp.k, 0);
    for (int c : hp.coloring)
        ++hp.class_sizes[c];
    hp.sigma = hp.class_sizes[0];
    hp.omega = *std::max_element(hp.class_sizes.begin(), hp.class_sizes.end());
    hp.alpha = Rational(hp.sigma, hp.omega);
    hp.spec = bottle_spec(hp.k, hp.sigma, hp.omega);
    hp.balanced = hp.sigma == hp.omega;
    return hp;
}

Integer pipeline_leftover_bound(const HProfile& hp)
{
    return leftover_constant(hp.spec, hp.balanced ? LeftoverCase::balanced : LeftoverCase::general);
}

BlowupInstance gen_blowup_instance(const BlowupSpec& spec, const HProfile& hp)
{
    const int k = spec.k;
    if (k < 2 || spec.elements < 1 || spec.L < 1)
        throw PreconditionError("blow-up needs k >= 2, at least one element and L >= 1");
    if (spec.alpha_prime <= 0 || spec.alpha_prime > 1)
        throw PreconditionError("alpha' must lie in (0, 1]");
    if (spec.density <= 0 || spec.density > 1)
        throw PreconditionError("density must lie in (0, 1]");
    std::mt19937_64 rng(spec.seed);
    const int small = static_cast<int>(floor_rat(spec.alpha_prime * spec.L));
    const int clusters = k * spec.elements;
    std::vector<int> size(clusters);
    for (int c = 0; c < clusters; ++c)
        size[c] = c % k == k - 1 ? small : spec.L;
    const int core = std::accumulate(size.begin(), size.end(), 0);
    const int n = core + spec.exceptional;

    BlowupInstance inst;
    inst.g = Graph(n);
    inst.map.reduced = Graph(clusters);
    inst.map.clusters.resize(clusters);
    inst.map.densities.assign(clusters, std::vector<Rational>(clusters, Rational(0)));
    for (int c = 0, v = 0; c < clusters; ++c)
        for (int x = 0; x < size[c]; ++x)
            inst.map.clusters[c].push_back(v++);
    for (int e = 0; e < spec.elements; ++e) {
        VertexSet el;
        for (int i = 0; i < k; ++i)
            el.push_back(e * k + i);
        inst.factor.push_back(el);
    }
    for (int a = 0; a < clusters; ++a)
        for (int b = a + 1; b < clusters; ++b)
            if (a / k == b / k || !coin(rng, spec.cross_drop))
                inst.map.reduced.add_edge(a, b);

    // pairs along R: coin at (1 + density)/2, topped up to the density
    inst.min_pair_density = 1;
    const Rational keep = (1 + spec.density) / 2;
    for (auto [a, b] : inst.map.reduced.edges()) {
        const auto& A = inst.map.clusters[a];
        const auto& B = inst.map.clusters[b];
        std::vector<std::pair<int, int>> missing;
        long long present = 0;
        for (int x : A)
            for (int y : B) {
                if (coin(rng, keep)) {
                    inst.g.add_edge(x, y);
                    ++present;
                }
                else
                    missing.emplace_back(x, y);
            }
        const long long need = static_cast<long long>(ceil_rat(spec.density * Rational(A.size() * B.size())));
        portable_shuffle(missing, rng);
        for (std::size_t m = 0; present < need && m < missing.size(); ++m, ++present)
            inst.g.add_edge(missing[m].first, missing[m].second);
        Rational dens(present, static_cast<long long>(A.size() * B.size()));
        inst.map.densities[a][b] = inst.map.densities[b][a] = dens;
        inst.min_pair_density = std::min(inst.min_pair_density, dens);
    }

    // planted vertices lose almost all neighbours in one sibling cluster
    for (int p = 0; p < spec.planted_bad; ++p) {
        int e = static_cast<int>(draw_below(rng, spec.elements));
        int i = static_cast<int>(draw_below(rng, k));
        int j = (i + 1 + static_cast<int>(draw_below(rng, k - 1))) % k;
        const auto& U = inst.map.clusters[e * k + i];
        int v = U[draw_below(rng, U.size())];
        for (int u : inst.map.clusters[e * k + j])
            if (inst.g.adjacent(v, u) && draw_below(rng, 50) != 0)
                inst.g.remove_edge(v, u);
    }

    // exceptional vertices: per element they see all clusters, all but one, or all but two
    const Rational split = low_split_fraction(hp);
    for (int x = 0; x < spec.exceptional; ++x) {
        const int v = core + x;
        inst.v0.push_back(v);
        const bool low = spec.low_degree_exceptional && x == spec.exceptional - 1;
        std::vector<int> missing(spec.elements);
        for (auto& m : missing)
            m = low ? 2 : static_cast<int>(draw_below(rng, 3));
        auto wire = [&] {
            for (int u = 0; u < core; ++u)
                if (inst.g.adjacent(v, u))
                    inst.g.remove_edge(v, u);
            for (int e = 0; e < spec.elements; ++e) {
                std::vector<int> pos(k);
                std::iota(pos.begin(), pos.end(), 0);
                portable_shuffle(pos, rng);
                for (int i = 0; i < k; ++i) {
                    bool seen = i >= missing[e];
                    const Rational p = seen ? Rational(19, 20) : Rational(1, 50);
                    for (int u : inst.map.clusters[e * k + pos[i]])
                        if (coin(rng, p))
                            inst.g.add_edge(v, u);
                }
            }
        };
        wire();
        // lift a high vertex over the split by seeing more clusters
        for (int e = 0; !low && Rational(inst.g.degree(v)) < split * n && e < spec.elements; ++e)
            if (missing[e] > 0) {
                missing[e] = 0;
                wire();
                e = -1;
            }
    }
    // exceptional vertices are pairwise adjacent (the low ones must form a clique)
    for (std::size_t a = 0; a < inst.v0.size(); ++a)
        for (std::size_t b = a + 1; b < inst.v0.size(); ++b)
            inst.g.add_edge(inst.v0[a], inst.v0[b]);
    return inst;
}

TilingState initial_state(const Graph& g, const ClusterMap& map, const std::vector<VertexSet>& factor)
{
    TilingState st;
    st.g = g;
    st.reduced = map.reduced;
    st.clusters = map.clusters;
    st.factor = factor;
    st.used.assign(g.order(), 0);
    st.selections.assign(factor.size(), 0);
    std::set<int> seen;
    for (const auto& el : factor) {
        if (el.empty() || el.size() != factor.front().size())
            throw PreconditionError("factor elements must all have k clusters");
        for (int c : el)
            if (c < 0 || c >= static_cast<int>(map.clusters.size()) || !seen.insert(c).second)
                throw PreconditionError("factor clusters must be distinct cluster ids");
    }
    return st;
}

Phase1Report phase1_insert(TilingState& st, const VertexSet& v0, const HProfile& hp, const PipelineConfig& cfg)
{
    const int n = st.g.order();
    const int k = hp.k;
    Phase1Report rep;
    if (Rational(static_cast<long long>(v0.size())) > cfg.theta * n)
        throw PreconditionError("|V0| = " + std::to_string(v0.size()) + " exceeds theta n");
    if (!st.factor.empty() && static_cast<int>(st.factor.front().size()) != k)
        throw PreconditionError("factor elements must have chi(H) clusters");
    rep.availability_floor = hp.balanced ? Rational(1, 3) : hp.alpha / 2;
    Integer l1 = 0;
    for (const auto& el : st.factor)
        for (int c : el)
            l1 = std::max(l1, Integer(st.clusters[c].size()));
    rep.cap = static_cast<long long>(ceil_sqrt(cfg.theta * Rational(l1 * l1)));
    const Rational split = low_split_fraction(hp);
    std::mt19937_64 rng(cfg.seed);
    const int elements = static_cast<int>(st.factor.size());

    auto insert = [&](int v, int round) {
        InsertionStep step;
        step.vertex = v;
        step.round = round;
        std::vector<std::vector<char>> sees(elements, std::vector<char>(k, 0));
        int satisfied = 0, capped = 0;
        for (int e = 0; e < elements; ++e) {
            int count = 0;
            for (int i = 0; i < k; ++i) {
                const auto& U = st.clusters[st.factor[e][i]];
                long long free = 0;
                for (int u : U)
                    free += !st.used[u];
                sees[e][i] = Rational(degree_into_unused(st, v, U)) >= cfg.d * free;
                count += sees[e][i];
            }
            satisfied += count >= k - 1;
            capped += st.selections[e] >= rep.cap;
        }
        step.availability = elements == 0 ? Rational(0) : Rational(satisfied, elements);
        step.unavailable = elements == 0 ? Rational(0) : Rational(capped, elements);
        rep.min_availability = std::min(rep.min_availability, step.availability);
        if (step.availability < rep.availability_floor)
            throw LemmaViolation("vertex " + std::to_string(v) + ": only " + to_string(step.availability) +
                                 " of the elements meet the adjacency rule, floor " +
                                 to_string(rep.availability_floor));
        if (step.unavailable * step.unavailable > k * k * cfg.theta)
            throw LemmaViolation("unavailable fraction " + to_string(step.unavailable) + " exceeds k sqrt(theta)");
        for (int e = 0; e < elements; ++e) {
            int count = std::count(sees[e].begin(), sees[e].end(), 1);
            if (count < k - 1 || st.selections[e] >= rep.cap)
                continue;
            // position whose color class takes v, and where the smallest class goes
            int miss = -1;
            for (int i = 0; i < k; ++i)
                if (!sees[e][i])
                    miss = i;
            int small_pos, v_pos;
            if (hp.balanced) {
                v_pos = miss < 0 ? 0 : miss;
                small_pos = v_pos;
            } else {
                small_pos = k - 1;
                v_pos = miss < 0 ? k - 1 : miss;
            }
            auto pos = class_positions(k, small_pos);
            std::vector<const VertexSet*> pools(k);
            int v_class = -1;
            for (int c = 0; c < k; ++c) {
                pools[c] = &st.clusters[st.factor[e][pos[c]]];
                if (pos[c] == v_pos)
                    v_class = c;
            }
            for (int x = 0; x < hp.order(); ++x) {
                if (hp.coloring[x] != v_class)
                    continue;
                auto copy = embed_copy(st, hp, pools, x, v, rng, cfg.embed_retries);
                if (!copy)
                    continue;
                take_copy(st, *copy);
                ++st.selections[e];
                rep.max_selections = std::max(rep.max_selections, st.selections[e]);
                step.element = e;
                step.cluster = st.factor[e][v_pos];
                rep.steps.push_back(step);
                return;
            }
        }
        throw LemmaViolation("no available element can take exceptional vertex " + std::to_string(v));
    };

    auto process = [&](const VertexSet& batch, int round) {
        VertexSet low, high;
        for (int v : batch)
            (Rational(st.g.degree(v)) < split * n ? low : high).push_back(v);
        rep.low.insert(rep.low.end(), low.begin(), low.end());
        rep.high.insert(rep.high.end(), high.begin(), high.end());
        if (!st.g.is_clique(low)) {
            rep.low_is_clique = false;
            st.uncovered_exceptional.insert(st.uncovered_exceptional.end(), low.begin(), low.end());
        } else {
            VertexSet left = tile_clique(st, hp, low, rep.low_copies);
            rep.low_left.insert(rep.low_left.end(), left.begin(), left.end());
            st.uncovered_exceptional.insert(st.uncovered_exceptional.end(), left.begin(), left.end());
        }
        for (int v : high)
            insert(v, round);
    };

    process(v0, 0);

    // super-regularization: vertices with too few neighbours in a sibling cluster become exceptional
    for (int round = 1; round <= cfg.cleanup_rounds; ++round) {
        VertexSet moved;
        for (const auto& el : st.factor)
            for (int i = 0; i < k; ++i) {
                auto& U = st.clusters[el[i]];
                VertexSet keep;
                for (int v : U) {
                    if (st.used[v]) {
                        keep.push_back(v);
                        continue;
                    }
                    bool bad = false;
                    for (int j = 0; j < k && !bad; ++j) {
                        if (j == i)
                            continue;
                        const auto& W = st.clusters[el[j]];
                        long long free = 0;
                        for (int u : W)
                            free += !st.used[u];
                        bad = Rational(degree_into_unused(st, v, W)) < (cfg.d - cfg.eps) * free;
                    }
                    (bad ? moved : keep).push_back(v);
                }
                U = keep;
            }
        if (moved.empty())
            break;
        rep.cleanup_rounds = round;
        rep.cleanup_moved.insert(rep.cleanup_moved.end(), moved.begin(), moved.end());
        process(moved, round);
    }
    return rep;
}

ElementPlan best_element_plan(const std::vector<long long>& sizes, const HProfile& hp)
{
    const int k = hp.k;
    if (static_cast<int>(sizes.size()) != k)
        throw PreconditionError("element must have k clusters");
    for (long long s : sizes)
        if (s < 0)
            throw PreconditionError("negative cluster size");
    const bool uniform = std::all_of(hp.class_sizes.begin(), hp.class_sizes.end(),
                                     [&](int c) { return c == hp.class_sizes[0]; });
    if (uniform) {
        long long best = *std::min_element(sizes.begin(), sizes.end()) / hp.class_sizes[0];
        std::vector<long long> y(k, 0);
        y[0] = best;
        return finish_plan(sizes, hp, y);
    }
    std::vector<std::vector<long long>> use(k, std::vector<long long>(k, 0)); // use[p][position]
    for (int p = 0; p < k; ++p) {
        auto pos = class_positions(k, p);
        for (int c = 0; c < k; ++c)
            use[p][pos[c]] = hp.class_sizes[c];
    }
    const long long total = std::accumulate(sizes.begin(), sizes.end(), 0LL);
    for (long long N = total / hp.order(); N >= 0; --N) {
        std::optional<ElementPlan> best;
        std::vector<long long> y(k, 0), load(k, 0);
        // choose y[0..k-2]; y[k-1] is what remains
        auto rec = [&](auto&& self, int p, long long left) -> void {
            if (p == k - 1) {
                y[p] = left;
                for (int i = 0; i < k; ++i)
                    if (load[i] + left * use[p][i] > sizes[i])
                        return;
                ElementPlan plan = finish_plan(sizes, hp, y);
                if (!best || plan.imbalance < best->imbalance)
                    best = plan; // y is visited in lexicographically decreasing order
                return;
            }
            for (long long v = left; v >= 0; --v) {
                bool fits = true;
                for (int i = 0; i < k && fits; ++i)
                    fits = load[i] + v * use[p][i] <= sizes[i];
                if (!fits)
                    continue;
                y[p] = v;
                for (int i = 0; i < k; ++i)
                    load[i] += v * use[p][i];
                self(self, p + 1, left - v);
                for (int i = 0; i < k; ++i)
                    load[i] -= v * use[p][i];
            }
            y[p] = 0;
        };
        rec(rec, 0, N);
        if (best)
            return *best;
    }
    return finish_plan(sizes, hp, std::vector<long long>(k, 0));
}

namespace {

std::vector<long long> element_free_sizes(const TilingState& st, int e)
{
    std::vector<long long> sizes;
    for (int c : st.factor[e]) {
        long long free = 0;
        for (int v : st.clusters[c])
            free += !st.used[v];
        sizes.push_back(free);
    }
    return sizes;
}

// Realize a plan copy by copy, rotating through the patterns, then finish exactly on a small residual.
long long realize_element(TilingState& st, int e, const ElementPlan& plan, const HProfile& hp,
                          const PipelineConfig& cfg, std::mt19937_64& rng, long long& exact_copies)
{
    const int k = hp.k;
    std::vector<long long> left = plan.copies;
    std::vector<std::vector<const VertexSet*>> pools(k, std::vector<const VertexSet*>(k));
    for (int p = 0; p < k; ++p) {
        auto pos = class_positions(k, p);
        for (int c = 0; c < k; ++c)
            pools[p][c] = &st.clusters[st.factor[e][pos[c]]];
    }
    long long made = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int p = 0; p < k; ++p) {
            if (left[p] == 0)
                continue;
            auto copy = embed_copy(st, hp, pools[p], -1, -1, rng, cfg.embed_retries);
            if (!copy) {
                left[p] = 0;
                continue;
            }
            take_copy(st, *copy);
            --left[p];
            ++made;
            progress = true;
        }
    }
    VertexSet residual;
    for (int c : st.factor[e])
        for (int v : st.clusters[c])
            if (!st.used[v])
                residual.push_back(v);
    if (!residual.empty() && static_cast<int>(residual.size()) <= cfg.exact_cap) {
        std::sort(residual.begin(), residual.end());
        TilingResult t = max_tiling(st.g.induced(residual), hp.h, cfg.exact_budget);
        for (const auto& c : t.copies) {
            VertexSet copy;
            for (int x : c)
                copy.push_back(residual[x]);
            take_copy(st, copy);
            ++made;
            ++exact_copies;
        }
    }
    return made;
}

} // namespace

Phase2Report phase2_transfer(TilingState& st, const HProfile& hp, const PipelineConfig& cfg)
{
    const int k = hp.k;
    const int clusters = static_cast<int>(st.clusters.size());
    const int elements = static_cast<int>(st.factor.size());
    Phase2Report rep;
    std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);

    // Step 1: planned tilings give the extras of every cluster
    rep.extras.assign(clusters, 0);
    for (int e = 0; e < elements; ++e) {
        ElementPlan plan = best_element_plan(element_free_sizes(st, e), hp);
        for (int i = 0; i < k; ++i)
            rep.extras[st.factor[e][i]] = plan.leftover[i];
        rep.plans.push_back(plan);
    }

    // sink set: low-degree clusters plus a greedy sink set of the part that cannot reach them
    TransferDigraph t = build_digraph(st.reduced, st.factor);
    verify_digraph(st.reduced, t);
    std::vector<Rational> weights(clusters);
    for (int c = 0; c < clusters; ++c) {
        long long free = 0;
        for (int v : st.clusters[c])
            free += !st.used[v];
        weights[c] = free;
    }
    const OutDegreeParams params{gamma_param(k, hp.alpha), cfg.d, cfg.eps};
    const Rational threshold = degree_threshold(k, hp.balanced ? DegreeCase::balanced : DegreeCase::general, params);
    LowDegreeSplit split = split_low_degree(st.reduced, t, threshold, weights);
    rep.low_clusters = split.low;
    rep.low_is_clique = split.low_is_clique;
    Digraph high = induced_subdigraph(t.d, split.high_part);
    SinkSetResult sinks = sink_set_greedy(high);
    rep.sink_rounds = sinks.rounds;
    rep.sinks = split.low;
    for (int s : sinks.sinks)
        rep.sinks.push_back(split.high_part[s]);
    std::sort(rep.sinks.begin(), rep.sinks.end());
    rep.transfer = plan_transfers(t.d, rep.extras, rep.sinks);

    // Step 2: move extras along the paths; each arc (a, b) removes a copy with one vertex of a
    // in the smallest class, placed at b's position
    for (const auto& tr : rep.transfer.transfers)
        for (long long unit = 0; unit < tr.amount; ++unit)
            for (std::size_t i = 0; i + 1 < tr.path.size(); ++i) {
                const int a = tr.path[i], b = tr.path[i + 1];
                const int e = t.element_of[b];
                const int pb = static_cast<int>(std::find(st.factor[e].begin(), st.factor[e].end(), b) -
                                                st.factor[e].begin());
                auto pos = class_positions(k, pb);
                std::vector<const VertexSet*> pools(k);
                for (int c = 0; c < k; ++c)
                    pools[c] = &st.clusters[st.factor[e][pos[c]]];
                int pin_h = -1;
                for (int x = 0; x < hp.order() && pin_h < 0; ++x)
                    if (hp.coloring[x] == 0)
                        pin_h = x;
                bool done = false;
                for (int x : st.clusters[a]) {
                    if (st.used[x])
                        continue;
                    auto copy = embed_copy(st, hp, pools, pin_h, x, rng, cfg.embed_retries);
                    if (copy) {
                        take_copy(st, *copy);
                        ++rep.transfer_copies;
                        done = true;
                        break;
                    }
                }
                if (!done) {
                    ++rep.transfer_failures;
                    break;
                }
            }

    // Step 3: final tilings of what is left in every element
    for (int e = 0; e < elements; ++e) {
        ElementPlan plan = best_element_plan(element_free_sizes(st, e), hp);
        rep.planned_final_leftover += plan.total_leftover;
        realize_element(st, e, plan, hp, cfg, rng, rep.residual_exact_copies);
        rep.final_plans.push_back(plan);
    }

    rep.result.copies = st.copies;
    for (int v = 0; v < st.g.order(); ++v)
        if (!st.used[v])
            rep.result.leftover.push_back(v);
    rep.bound = pipeline_leftover_bound(hp);
    rep.within_bound = Integer(rep.result.leftover.size()) <= rep.bound;
    return rep;
}

bool verify_copies(const Graph& g, const Graph& h, const std::vector<VertexSet>& copies)
{
    std::vector<char> seen(g.order(), 0);
    for (const auto& c : copies) {
        for (int v : c) {
            if (v < 0 || v >= g.order() || seen[v])
                return false;
            seen[v] = 1;
        }
        if (!hosts_copy(g, c, h))
            return false;
    }
    return true;
}

PipelineReport run_pipeline(const BlowupInstance& inst, const HProfile& hp, const PipelineConfig& cfg)
{
    PipelineReport rep;
    TilingState st = initial_state(inst.g, inst.map, inst.factor);
    rep.phase1 = phase1_insert(st, inst.v0, hp, cfg);
    rep.phase2 = phase2_transfer(st, hp, cfg);
    rep.leftover = static_cast<long long>(rep.phase2.result.leftover.size());
    rep.bound = rep.phase2.bound;
    rep.copies_verified = verify_copies(inst.g, hp.h, rep.phase2.result.copies);
    rep.pass = rep.copies_verified && rep.phase2.within_bound;
    return rep;
}

std::string to_string(InstanceKind kind)
{
    switch (kind) {
    case InstanceKind::ore_random: return "ore-random";
    case InstanceKind::near_threshold: return "near-threshold";
    case InstanceKind::space_barrier: return "space-barrier";
    }
    return "?";
}

namespace {

// add edges between nonadjacent pairs of least degree sum until the margin is reached
void repair_ore(Graph& g, const Rational& chi_cr, long long margin)
{
    const int n = g.order();
    const Rational threshold = 2 * (1 - 1 / chi_cr) * n;
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v)
        deg[v] = g.degree(v);
    for (;;) {
        int bu = -1, bv = -1;
        long long best = 0;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (!g.adjacent(u, v) && (bu < 0 || deg[u] + deg[v] < best)) {
                    bu = u;
                    bv = v;
                    best = deg[u] + deg[v];
                }
        if (bu < 0 || Rational(best) - threshold >= margin)
            return;
        g.add_edge(bu, bv);
        ++deg[bu];
        ++deg[bv];
    }
}

} // namespace

Graph gen_ore_instance(const Graph& h, int n, long long margin, std::uint64_t seed)
{
    if (margin < 0)
        throw PreconditionError("margin must be nonnegative");
    const Rational chi_cr = chi_critical(h);
    Rational p = 1 - 1 / chi_cr - Rational(1, 10);
    if (p < 0)
        p = 0;
    Graph g = random_graph(n, p, seed);
    repair_ore(g, chi_cr, margin);
    return g;
}

Graph gen_extremal_instance(const Graph& h, int n, InstanceKind kind, std::uint64_t seed)
{
    if (n < h.order())
        throw PreconditionError("n must be at least |H|");
    if (kind == InstanceKind::ore_random)
        return gen_ore_instance(h, n, 0, seed);
    HProfile hp = h_profile(h);
    const int k = hp.k;
    const long long width = hp.sigma + static_cast<long long>(k - 1) * hp.omega;
    std::vector<int> parts(k);
    const int big = static_cast<int>(static_cast<long long>(hp.omega) * n / width);
    for (int i = 1; i < k; ++i)
        parts[i] = big;
    parts[0] = n - (k - 1) * big;
    if (kind == InstanceKind::space_barrier && parts[0] > 0) {
        --parts[0];
        ++parts[1];
    }
    Graph g = complete_multipartite(parts);
    if (kind == InstanceKind::near_threshold) {
        std::mt19937_64 rng(seed);
        std::vector<int> start(k, 0);
        for (int i = 1; i < k; ++i)
            start[i] = start[i - 1] + parts[i - 1];
        for (int t = 0; t < hp.order(); ++t) {
            int i = static_cast<int>(draw_below(rng, k));
            if (parts[i] < 2)
                continue;
            int a = start[i] + static_cast<int>(draw_below(rng, parts[i]));
            int b = start[i] + static_cast<int>(draw_below(rng, parts[i]));
            if (a != b)
                g.add_edge(a, b);
        }
    }
    repair_ore(g, chi_critical(h), 0);
    OreReport rep = ore_report(g, h);
    if (rep.margin && *rep.margin < 0)
        throw LemmaViolation("generated instance misses the Ore bound");
    return g;
}

Rational fitted_slope(const std::vector<std::pair<Rational, Rational>>& points)
{
    if (points.size() < 2)
        return 0;
    Rational mx = 0, my = 0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<long long>(points.size());
    my /= static_cast<long long>(points.size());
    Rational num = 0, den = 0;
    for (const auto& [x, y] : points) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    return den == 0 ? Rational(0) : num / den;
}

ExperimentReport run_theorem_experiment(const Graph& h, const std::string& name, const std::vector<int>& n_grid,
                                        int trials, std::uint64_t seed, long long budget)
{
    HProfile hp = h_profile(h);
    ExperimentReport rep;
    rep.pattern = name;
    rep.bound = pipeline_leftover_bound(hp);
    const bool is_k2 = h.order() == 2 && h.edge_count() == 1;
    if (is_k2)
        rep.matching_cap = 1;
    rep.pass = true;
    for (int n : n_grid)
        for (InstanceKind kind : {InstanceKind::ore_random, InstanceKind::near_threshold, InstanceKind::space_barrier})
            for (int t = 0; t < trials; ++t) {
                const std::uint64_t s = seed * 1'000'003ULL + static_cast<std::uint64_t>(n) * 101 +
                                        static_cast<std::uint64_t>(kind) * 7 + static_cast<std::uint64_t>(t);
                Graph g = gen_extremal_instance(h, n, kind, s);
                OreReport ore = ore_report(g, h);
                TilingResult res = max_tiling(g, h, budget);
                if (!verify_copies(g, h, res.copies))
                    throw LemmaViolation("tiling solver returned an invalid tiling");
                ExperimentRow row;
                row.kind = to_string(kind);
                row.n = n;
                row.seed = s;
                row.margin = ore.margin ? to_string(*ore.margin) : "inf";
                row.leftover = static_cast<long long>(res.leftover.size());
                row.optimal = res.optimal;
                row.pass = Integer(row.leftover) <= rep.bound && (!is_k2 || row.leftover <= 1);
                rep.pass = rep.pass && row.pass;
                auto& mx = rep.max_leftover[n];
                mx = std::max(mx, row.leftover);
                rep.rows.push_back(row);
            }
    std::vector<std::pair<Rational, Rational>> pts;
    for (const auto& [n, y] : rep.max_leftover)
        pts.emplace_back(Rational(n), Rational(y));
    rep.slope = fitted_slope(pts);
    rep.pass = rep.pass && rep.slope <= Rational(1, 100);
    return rep;
}

PipelineBatch run_pipeline_batch(const Graph& h, const std::string& name, const PipelineBatchSpec& spec)
{
    if (spec.runs < 1 || spec.L_min < 1 || spec.L_max < spec.L_min)
        throw PreconditionError("batch needs runs >= 1 and 1 <= L_min <= L_max");
    HProfile hp = h_profile(h);
    PipelineBatch batch;
    batch.pattern = name;
    batch.k = hp.k;
    batch.balanced = hp.balanced;
    batch.pass = true;
    const Rational ap = hp.balanced ? Rational(1) : alpha_prime(hp.alpha, hp.k, spec.mu).value;
    std::mt19937_64 rng(spec.seed);
    for (int r = 0; r < spec.runs; ++r) {
        PipelineRun run;
        run.seed = spec.seed * 7919 + static_cast<std::uint64_t>(r);
        run.L = static_cast<int>(draw_between(rng, spec.L_min, spec.L_max));
        run.alpha_prime = ap;
        run.exceptional = spec.exceptional;
        const long long per_element = static_cast<long long>(hp.k - 1) * run.L + static_cast<long long>(floor_rat(ap * run.L));
        const Integer need = ceil_rat(Rational(spec.exceptional) / spec.cfg.theta);
        run.elements = std::max<int>(1, static_cast<int>(ceil_rat(Rational(need - spec.exceptional) / per_element)));
        BlowupSpec bs;
        bs.k = hp.k;
        bs.elements = run.elements;
        bs.L = run.L;
        bs.alpha_prime = ap;
        bs.density = spec.density;
        bs.cross_drop = spec.cross_drop;
        bs.exceptional = spec.exceptional;
        bs.planted_bad = spec.planted_bad;
        bs.seed = run.seed;
        BlowupInstance inst = gen_blowup_instance(bs, hp);
        run.n = inst.g.order();
        run.min_pair_density = inst.min_pair_density;
        PipelineConfig cfg = spec.cfg;
        cfg.seed = run.seed;
        try {
            PipelineReport rep = run_pipeline(inst, hp, cfg);
            run.min_availability = rep.phase1.min_availability;
            run.availability_floor = rep.phase1.availability_floor;
            run.insertions = static_cast<int>(rep.phase1.steps.size());
            run.max_selections = rep.phase1.max_selections;
            run.cap = rep.phase1.cap;
            run.cleanup_moved = static_cast<int>(rep.phase1.cleanup_moved.size());
            run.transfer_copies = rep.phase2.transfer_copies;
            run.transfer_failures = rep.phase2.transfer_failures;
            run.leftover = rep.leftover;
            run.bound = rep.bound;
            run.pass = rep.pass && run.min_pair_density >= spec.density && run.max_selections <= run.cap &&
                       run.min_availability >= run.availability_floor;
        } catch (const LemmaViolation& e) {
            run.error = e.what();
            run.bound = pipeline_leftover_bound(hp);
        }
        batch.max_leftover = std::max(batch.max_leftover, run.leftover);
        batch.pass = batch.pass && run.pass;
        batch.runs.push_back(run);
    }
    return batch;
}

} // namespace oretile
