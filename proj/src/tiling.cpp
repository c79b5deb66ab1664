#include "oretile/tiling.hpp"

#include "oretile/chromatic.hpp"
#include "oretile/errors.hpp"
#include "oretile/packing.hpp"
#include "oretile/rng.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <random>
#include <set>

namespace oretile {

namespace {

// Injective edge-preserving maps H -> G restricted to allowed host vertices.
// Twin classes of H are mapped in increasing order, so each image set is produced
// by few maps (exactly one when H is complete multipartite up to part swaps).
class Embedder {
public:
    Embedder(const Graph& g, const Graph& h) : g_(g), h_(h), hn_(h.order())
    {
        twin_before_.assign(hn_, {});
        for (int a = 0; a < hn_; ++a)
            for (int b = a + 1; b < hn_; ++b)
                if (open_twins(a, b) || closed_twins(a, b))
                    twin_before_[b].push_back(a);
        image_.assign(hn_, -1);
        hdeg_.resize(hn_);
        for (int x = 0; x < hn_; ++x)
            hdeg_[x] = h.degree(x);
    }

    // Calls visit(image) for maps with root -> anchor and all images in `allowed`.
    // visit returns false to stop. Returns false if stopped.
    bool run(int root, int anchor, const std::vector<char>& allowed,
             const std::function<bool(const std::vector<int>&)>& visit)
    {
        allowed_ = &allowed;
        visit_ = &visit;
        order_ = search_order(root);
        used_.assign(g_.order(), 0);
        if (! fits(root, anchor))
            return true;
        image_[root] = anchor;
        used_[anchor] = 1;
        bool cont = extend(1);
        used_[anchor] = 0;
        image_[root] = -1;
        return cont;
    }

    const Graph& pattern() const { return h_; }

private:
    bool open_twins(int a, int b) const
    {
        if (h_.adjacent(a, b))
            return false;
        for (int x = 0; x < hn_; ++x)
            if (h_.adjacent(a, x) != h_.adjacent(b, x))
                return false;
        return true;
    }

    bool closed_twins(int a, int b) const
    {
        if (! h_.adjacent(a, b))
            return false;
        for (int x = 0; x < hn_; ++x)
            if (x != a && x != b && h_.adjacent(a, x) != h_.adjacent(b, x))
                return false;
        return true;
    }

    std::vector<int> search_order(int root) const
    {
        std::vector<int> order{root};
        std::vector<char> in(hn_, 0);
        in[root] = 1;
        while (static_cast<int>(order.size()) < hn_) {
            int pick = -1, best_links = -1, best_deg = -1;
            for (int x = 0; x < hn_; ++x) {
                if (in[x])
                    continue;
                int links = 0;
                for (int y : order)
                    links += h_.adjacent(x, y);
                if (links > best_links || (links == best_links && hdeg_[x] > best_deg)) {
                    pick = x;
                    best_links = links;
                    best_deg = hdeg_[x];
                }
            }
            in[pick] = 1;
            order.push_back(pick);
        }
        return order;
    }

    bool fits(int x, int v) const
    {
        if (! (*allowed_)[v] || used_[v] || g_.degree(v) < hdeg_[x])
            return false;
        for (int y = 0; y < hn_; ++y)
            if (image_[y] >= 0 && h_.adjacent(x, y) && ! g_.adjacent(v, image_[y]))
                return false;
        for (int a : twin_before_[x])
            if (image_[a] >= 0 && image_[a] > v)
                return false;
        for (int b = x + 1; b < hn_; ++b)
            if (image_[b] >= 0 && std::find(twin_before_[b].begin(), twin_before_[b].end(), x) !=
                                      twin_before_[b].end() &&
                image_[b] < v)
                return false;
        return true;
    }

    bool extend(int depth)
    {
        if (depth == hn_)
            return (*visit_)(image_);
        int x = order_[depth];
        // Candidates: neighbors of an embedded H-neighbor when one exists.
        int anchor_nb = -1;
        for (int y : order_) {
            if (image_[y] < 0)
                break;
            if (h_.adjacent(x, y)) {
                anchor_nb = image_[y];
                break;
            }
        }
        auto try_vertex = [&](int v) -> bool {
            if (! fits(x, v))
                return true;
            image_[x] = v;
            used_[v] = 1;
            bool cont = extend(depth + 1);
            used_[v] = 0;
            image_[x] = -1;
            return cont;
        };
        if (anchor_nb >= 0) {
            for (int v : g_.neighbors(anchor_nb))
                if (! try_vertex(v))
                    return false;
        }
        else {
            for (int v = 0; v < g_.order(); ++v)
                if (! try_vertex(v))
                    return false;
        }
        return true;
    }

    const Graph& g_;
    const Graph& h_;
    int hn_;
    std::vector<VertexSet> twin_before_;
    std::vector<int> image_, hdeg_, order_;
    std::vector<char> used_;
    const std::vector<char>* allowed_ = nullptr;
    const std::function<bool(const std::vector<int>&)>* visit_ = nullptr;
};

bool is_k2(const Graph& h) { return h.order() == 2 && h.edge_count() == 1; }

TilingResult finish(const Graph& g, std::vector<VertexSet> copies, bool optimal, long long nodes)
{
    TilingResult r;
    std::vector<char> covered(g.order(), 0);
    for (auto& c : copies) {
        std::sort(c.begin(), c.end());
        for (int v : c)
            covered[v] = 1;
    }
    std::sort(copies.begin(), copies.end());
    for (int v = 0; v < g.order(); ++v)
        if (! covered[v])
            r.leftover.push_back(v);
    r.copies = std::move(copies);
    r.optimal = optimal;
    r.nodes_explored = nodes;
    return r;
}

void check_pattern(const Graph& h)
{
    if (h.edge_count() == 0)
        throw PreconditionError("tiling pattern must have an edge");
}

// Copies containing `v` inside `allowed`, sorted lexicographically; capped at `cap`.
std::vector<VertexSet> copies_through(Embedder& emb, int v, const std::vector<char>& allowed,
                                      std::size_t cap, bool& truncated)
{
    std::set<VertexSet> found;
    const int hn = emb.pattern().order();
    for (int root = 0; root < hn && ! truncated; ++root)
        emb.run(root, v, allowed, [&](const std::vector<int>& img) {
            VertexSet s = img;
            std::sort(s.begin(), s.end());
            found.insert(std::move(s));
            if (found.size() >= cap) {
                truncated = true;
                return false;
            }
            return true;
        });
    return {found.begin(), found.end()};
}

constexpr std::size_t branch_cap = 4096;
constexpr std::uint64_t incumbent_seeds = 4;

} // namespace

bool contains_spanning(const Graph& g, const Graph& h)
{
    if (g.order() != h.order())
        return false;
    if (h.order() == 0)
        return true;
    if (g.edge_count() < h.edge_count())
        return false;
    Embedder emb(g, h);
    std::vector<char> allowed(g.order(), 1);
    bool found = false;
    // Vertex 0 of H has some image; trying all anchors for it covers every map.
    for (int v = 0; v < g.order() && ! found; ++v)
        emb.run(0, v, allowed, [&](const std::vector<int>&) {
            found = true;
            return false;
        });
    return found;
}

bool hosts_copy(const Graph& g, const VertexSet& s, const Graph& h)
{
    if (static_cast<int>(s.size()) != h.order())
        return false;
    std::set<int> distinct(s.begin(), s.end());
    if (distinct.size() != s.size())
        return false;
    return contains_spanning(g.induced(s), h);
}

CopyList enumerate_copies(const Graph& g, const Graph& h, long long limit)
{
    if (h.order() > copy_order_cap)
        throw PreconditionError("copy enumeration is capped at patterns of 12 vertices");
    CopyList out;
    if (h.order() == 0 || h.order() > g.order())
        return out;
    Embedder emb(g, h);
    std::vector<char> allowed(g.order(), 1);
    // Each set is reported once, from its smallest vertex.
    for (int v = 0; v < g.order() && ! out.truncated; ++v) {
        allowed.assign(g.order(), 0);
        for (int u = v; u < g.order(); ++u)
            allowed[u] = 1;
        bool trunc = false;
        auto local = copies_through(emb, v, allowed, static_cast<std::size_t>(-1), trunc);
        for (auto& s : local) {
            if (static_cast<long long>(out.copies.size()) >= limit) {
                out.truncated = true;
                break;
            }
            out.copies.push_back(std::move(s));
        }
    }
    return out;
}

namespace {

TilingResult exact_tiling(const Graph& g, const Graph& h, long long budget, bool incumbents)
{
    check_pattern(h);
    const int n = g.order(), hn = h.order();
    if (is_k2(h)) {
        long long phases = 0;
        auto mate = maximum_matching(g, &phases);
        std::vector<VertexSet> copies;
        for (int v = 0; v < n; ++v)
            if (mate[v] > v)
                copies.push_back({v, mate[v]});
        return finish(g, std::move(copies), true, phases);
    }

    const int ceiling = n / hn;
    std::vector<VertexSet> current, best;
    long long nodes = 0;
    // greedy incumbents; reaching the ceiling settles it
    for (std::uint64_t seed = 1; incumbents && seed <= incumbent_seeds; ++seed) {
        auto t = greedy_tiling(g, h, seed);
        if (t.copies.size() > best.size())
            best = std::move(t.copies);
        if (static_cast<int>(best.size()) == ceiling)
            return finish(g, std::move(best), true, nodes);
    }

    Embedder emb(g, h);
    std::vector<char> free(n, 1);
    bool exhausted = false, truncated_any = false;
    int free_count = n;

    std::function<void(int)> search = [&](int from) {
        if (exhausted || static_cast<int>(best.size()) == ceiling)
            return;
        if (++nodes > budget) {
            exhausted = true;
            return;
        }
        if (current.size() > best.size())
            best = current;
        if (static_cast<int>(current.size()) + free_count / hn <= static_cast<int>(best.size()))
            return;
        int v = from;
        while (v < n && ! free[v])
            ++v;
        if (v == n)
            return;

        bool trunc = false;
        auto options = copies_through(emb, v, free, branch_cap, trunc);
        truncated_any |= trunc;
        for (const auto& copy : options) {
            for (int u : copy)
                free[u] = 0;
            free_count -= hn;
            current.push_back(copy);
            search(v + 1);
            current.pop_back();
            free_count += hn;
            for (int u : copy)
                free[u] = 1;
            if (exhausted || static_cast<int>(best.size()) == ceiling)
                return;
        }
        // Discard branch: v stays uncovered.
        free[v] = 0;
        --free_count;
        search(v + 1);
        ++free_count;
        free[v] = 1;
    };
    search(0);
    if (current.size() > best.size())
        best = current;
    bool optimal = static_cast<int>(best.size()) == ceiling || (! exhausted && ! truncated_any);
    return finish(g, std::move(best), optimal, nodes);
}

} // namespace

TilingResult max_tiling(const Graph& g, const Graph& h, long long budget)
{
    return exact_tiling(g, h, budget, true);
}

TilingResult greedy_tiling(const Graph& g, const Graph& h, std::uint64_t seed)
{
    check_pattern(h);
    const int n = g.order(), hn = h.order();
    std::mt19937_64 rng(seed);
    Embedder emb(g, h);
    std::vector<char> free(n, 1), tried(n, 0);
    std::vector<int> rdeg(n);
    for (int v = 0; v < n; ++v)
        rdeg[v] = g.degree(v);
    std::vector<VertexSet> copies;
    long long nodes = 0;

    for (;;) {
        // Hardest residual vertex first: minimum residual degree, random tie.
        int min_deg = n + 1;
        VertexSet pool;
        for (int v = 0; v < n; ++v) {
            if (! free[v] || tried[v])
                continue;
            if (rdeg[v] < min_deg) {
                min_deg = rdeg[v];
                pool.clear();
            }
            if (rdeg[v] == min_deg)
                pool.push_back(v);
        }
        if (pool.empty())
            break;
        int v = pool[draw_below(rng, pool.size())];
        ++nodes;
        bool trunc = false;
        auto options = copies_through(emb, v, free, 512, trunc);
        if (options.empty()) {
            tried[v] = 1;
            continue;
        }
        // Damage: residual edges destroyed by removing the copy.
        long long best_damage = -1;
        std::vector<std::size_t> ties;
        for (std::size_t i = 0; i < options.size(); ++i) {
            long long dmg = 0;
            for (int u : options[i])
                dmg += rdeg[u];
            for (std::size_t a = 0; a < options[i].size(); ++a)
                for (std::size_t b = a + 1; b < options[i].size(); ++b)
                    dmg -= g.adjacent(options[i][a], options[i][b]);
            if (best_damage < 0 || dmg < best_damage) {
                best_damage = dmg;
                ties.clear();
            }
            if (dmg == best_damage)
                ties.push_back(i);
        }
        const auto& pick = options[ties[draw_below(rng, ties.size())]];
        for (int u : pick) {
            free[u] = 0;
            for (int w : g.neighbors(u))
                --rdeg[w];
        }
        copies.push_back(pick);
    }
    (void)hn;
    return finish(g, std::move(copies), false, nodes);
}

Verdict has_factor(const Graph& g, const Graph& h, long long budget)
{
    check_pattern(h);
    if (g.order() % h.order() != 0)
        throw PreconditionError("factor needs |H| to divide |G|");
    auto t = max_tiling(g, h, budget);
    if (t.leftover.empty())
        return Verdict::yes;
    return t.optimal ? Verdict::no : Verdict::unknown;
}

long long padded_leftover_bound(int k, int s)
{
    return static_cast<long long>(k) * (k - 1) * s + static_cast<long long>(k - 1) * (k - 1);
}

Rational padded_leftover_bound(int k, const Rational& s) { return k * (k - 1) * s + (k - 1) * (k - 1); }

TilingResult kk_tiling_padded(const Graph& g, int k, int s, long long budget)
{
    return kk_tiling_padded(g, k, Rational(s), budget);
}

TilingResult kk_tiling_padded(const Graph& g, int k, const Rational& s, long long budget)
{
    if (k < 2 || s < 0)
        throw PreconditionError("padding needs k >= 2 and s >= 0");
    const int n = g.order();
    const Rational need = 2 * (1 - Rational(1, k)) * n - 2 * s;
    auto ore = ore_report_for(g, Rational(k));
    if (ore.min_sum && Rational(*ore.min_sum) < need)
        throw PreconditionError("Ore-type hypothesis fails for pair (" +
                                std::to_string(ore.witness_pair->first) + ", " +
                                std::to_string(ore.witness_pair->second) + ")");

    // smallest pad >= ks making the order divisible by k
    int pad = static_cast<int>(ceil_rat(k * s));
    while ((n + pad) % k != 0)
        ++pad;
    Graph padded(n + pad);
    for (auto [u, v] : g.edges())
        padded.add_edge(u, v);
    for (int x = n; x < n + pad; ++x)
        for (int y = 0; y < x; ++y)
            padded.add_edge(x, y);

    // plain search: its vertex order tends to keep the pad vertices in few copies
    auto inner = exact_tiling(padded, complete_graph(k), budget, false);
    if (! inner.leftover.empty()) {
        if (! inner.optimal)
            throw BudgetExhausted("padded graph: K_k-factor search exceeded node budget");
        throw LemmaViolation("padded graph has no K_k-factor");
    }
    std::vector<VertexSet> kept;
    for (auto& c : inner.copies)
        if (c.back() < n)
            kept.push_back(std::move(c));
    auto res = finish(g, std::move(kept), false, inner.nodes_explored);
    if (Rational(static_cast<long long>(res.leftover.size())) > padded_leftover_bound(k, s))
        throw LemmaViolation("padded tiling leaves more than k(k-1)s + (k-1)^2 vertices");
    return res;
}

std::optional<VertexSet> embed_in_clusters(const Graph& g, const std::vector<VertexSet>& clusters,
                                           const Graph& h, int small_class_position,
                                           std::uint64_t seed, int retries)
{
    const int hn = h.order();
    const auto coloring = smallest_class_coloring(h);
    const int chi = hn == 0 ? 0 : *std::max_element(coloring.begin(), coloring.end()) + 1;
    if (static_cast<int>(clusters.size()) != chi)
        throw PreconditionError("embedding needs one cluster per color class");
    if (small_class_position < 0 || small_class_position >= chi)
        throw PreconditionError("small class position out of range");
    for (const auto& c : clusters)
        if (static_cast<int>(c.size()) < hn)
            throw PreconditionError("every cluster needs at least |H| vertices");

    // Color 0 (smallest class) goes to small_class_position, the rest in order.
    std::vector<int> target(chi);
    target[0] = small_class_position;
    for (int c = 1, slot = 0; c < chi; ++c, ++slot) {
        if (slot == small_class_position)
            ++slot;
        target[c] = slot;
    }

    // Embed in an order that keeps each new vertex attached to placed ones.
    std::vector<int> order;
    std::vector<char> in(hn, 0);
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

    std::mt19937_64 rng(seed);
    std::vector<char> used(g.order(), 0);
    for (int attempt = 0; attempt < retries; ++attempt) {
        VertexSet image(hn, -1);
        bool ok = true;
        for (int x : order) {
            const auto& cluster = clusters[target[coloring[x]]];
            VertexSet cand;
            for (int v : cluster) {
                if (used[v])
                    continue;
                bool fits = true;
                for (int y = 0; y < hn && fits; ++y)
                    if (image[y] >= 0 && h.adjacent(x, y) && ! g.adjacent(v, image[y]))
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
            used[v] = 1;
        }
        for (int v : image)
            if (v >= 0)
                used[v] = 0;
        if (ok)
            return image;
    }
    return std::nullopt;
}

} // namespace oretile
