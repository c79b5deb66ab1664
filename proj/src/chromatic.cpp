#include "oretile/chromatic.hpp"

#include "oretile/errors.hpp"
#include "oretile/tiling.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace oretile {

namespace {

void max_clique_rec(const Graph& g, VertexSet& current, VertexSet candidates, int& best)
{
    if (candidates.empty()) {
        best = std::max(best, static_cast<int>(current.size()));
        return;
    }
    while (! candidates.empty()) {
        if (static_cast<int>(current.size() + candidates.size()) <= best)
            return;
        int v = candidates.back();
        candidates.pop_back();
        VertexSet next;
        for (int u : candidates)
            if (g.adjacent(u, v))
                next.push_back(u);
        current.push_back(v);
        max_clique_rec(g, current, std::move(next), best);
        current.pop_back();
    }
}

class Colorer {
public:
    Colorer(const Graph& g, int k, long long& nodes, long long budget)
        : g_(g), k_(k), nodes_(nodes), budget_(budget), color_(g.order(), -1),
          forbidden_(g.order(), std::vector<int>(k, 0))
    {
    }

    bool run() { return extend(0, 0); }
    const std::vector<int>& coloring() const { return color_; }

private:
    int saturation(int v) const
    {
        int s = 0;
        for (int c = 0; c < k_; ++c)
            s += forbidden_[v][c] > 0;
        return s;
    }

    bool extend(int colored, int used)
    {
        if (++nodes_ > budget_)
            throw BudgetExhausted("chromatic search exceeded node budget");
        if (colored == g_.order())
            return true;
        int pick = -1, pick_sat = -1, pick_deg = -1;
        for (int v = 0; v < g_.order(); ++v) {
            if (color_[v] >= 0)
                continue;
            int sat = saturation(v), deg = g_.degree(v);
            if (sat > pick_sat || (sat == pick_sat && deg > pick_deg)) {
                pick = v;
                pick_sat = sat;
                pick_deg = deg;
            }
        }
        auto nbrs = g_.neighbors(pick);
        for (int c = 0; c < std::min(used + 1, k_); ++c) {
            if (forbidden_[pick][c])
                continue;
            color_[pick] = c;
            for (int u : nbrs)
                ++forbidden_[u][c];
            if (extend(colored + 1, std::max(used, c + 1)))
                return true;
            for (int u : nbrs)
                --forbidden_[u][c];
            color_[pick] = -1;
        }
        return false;
    }

    const Graph& g_;
    int k_;
    long long& nodes_;
    long long budget_;
    std::vector<int> color_;
    std::vector<std::vector<int>> forbidden_;
};

std::vector<VertexSet> components(const Graph& g)
{
    std::vector<VertexSet> out;
    std::vector<char> seen(g.order(), 0);
    for (int s = 0; s < g.order(); ++s) {
        if (seen[s])
            continue;
        VertexSet comp{s};
        seen[s] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (int u : g.neighbors(comp[i]))
                if (! seen[u]) {
                    seen[u] = 1;
                    comp.push_back(u);
                }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

// Class-size vectors of all colorings of a connected graph with at most chi colors,
// up to relabeling. Nonadjacent vertices with equal neighborhoods are merged and
// distributed over colors in bulk.
class ComponentSizes {
public:
    ComponentSizes(const Graph& c, int chi, long long& nodes, long long budget)
        : chi_(chi), nodes_(nodes), budget_(budget)
    {
        const int n = c.order();
        std::vector<std::uint32_t> mask(n, 0);
        for (int v = 0; v < n; ++v)
            for (int u : c.neighbors(v))
                mask[v] |= 1U << u;
        std::vector<int> cls(n, -1);
        for (int v = 0; v < n; ++v) {
            if (cls[v] >= 0)
                continue;
            cls[v] = static_cast<int>(count_.size());
            int m = 0;
            for (int u = v; u < n; ++u)
                if (mask[u] == mask[v]) {
                    cls[u] = cls[v];
                    ++m;
                }
            count_.push_back(m);
            rep_.push_back(v);
        }
        const int r = static_cast<int>(count_.size());
        earlier_nbrs_.assign(r, {});
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < i; ++j)
                if (c.adjacent(rep_[i], rep_[j]))
                    earlier_nbrs_[i].push_back(j);
        used_mask_.assign(r, 0);
        sizes_.assign(chi, 0);
    }

    std::set<std::vector<int>> run()
    {
        assign(0, 0);
        return std::move(found_);
    }

private:
    void assign(int i, int used)
    {
        if (++nodes_ > budget_)
            throw BudgetExhausted("coloring enumeration exceeded node budget");
        if (i == static_cast<int>(count_.size())) {
            auto v = sizes_;
            std::sort(v.begin(), v.end());
            found_.insert(std::move(v));
            return;
        }
        std::uint32_t forbidden = 0;
        for (int j : earlier_nbrs_[i])
            forbidden |= used_mask_[j];
        std::vector<int> existing;
        for (int c = 0; c < used; ++c)
            if (! ((forbidden >> c) & 1U))
                existing.push_back(c);
        const int m = count_[i];
        for (int fresh = 0; fresh <= std::min(chi_ - used, m); ++fresh) {
            std::vector<int> colors = existing;
            for (int f = 0; f < fresh; ++f)
                colors.push_back(used + f);
            if (colors.empty())
                continue;
            distribute(i, used + fresh, colors, static_cast<int>(existing.size()), 0, m, 0);
        }
    }

    // Spread `left` vertices of class i over colors[pos..]; fresh colors need at least one.
    void distribute(int i, int used, const std::vector<int>& colors, int first_fresh,
                    std::size_t pos, int left, std::uint32_t mask)
    {
        if (pos == colors.size()) {
            if (left != 0)
                return;
            used_mask_[i] = mask;
            assign(i + 1, used);
            used_mask_[i] = 0;
            return;
        }
        int lo = static_cast<int>(pos) >= first_fresh ? 1 : 0;
        int hi = left;
        if (pos + 1 == colors.size())
            lo = std::max(lo, left);
        for (int take = lo; take <= hi; ++take) {
            int c = colors[pos];
            sizes_[c] += take;
            distribute(i, used, colors, first_fresh, pos + 1, left - take,
                       take > 0 ? (mask | (1U << c)) : mask);
            sizes_[c] -= take;
        }
    }

    int chi_;
    long long& nodes_;
    long long budget_;
    std::vector<int> count_, rep_;
    std::vector<VertexSet> earlier_nbrs_;
    std::vector<std::uint32_t> used_mask_;
    std::vector<int> sizes_;
    std::set<std::vector<int>> found_;
};

void check_cap(const Graph& h)
{
    if (h.order() > coloring_order_cap)
        throw PreconditionError("coloring enumeration is capped at 24 vertices");
}

bool has_edge(const Graph& h) { return h.edge_count() > 0; }

} // namespace

int clique_number(const Graph& g)
{
    if (g.order() == 0)
        return 0;
    VertexSet cand(g.order());
    std::iota(cand.begin(), cand.end(), 0);
    // Low-degree vertices are popped first.
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        return g.degree(a) != g.degree(b) ? g.degree(a) > g.degree(b) : a > b;
    });
    VertexSet current;
    int best = 1;
    max_clique_rec(g, current, cand, best);
    return best;
}

std::vector<int> optimal_coloring(const Graph& h, long long budget)
{
    if (h.order() == 0)
        return {};
    long long nodes = 0;
    for (int k = clique_number(h);; ++k) {
        Colorer col(h, k, nodes, budget);
        if (col.run())
            return col.coloring();
    }
}

int chromatic_number(const Graph& h, long long budget)
{
    auto c = optimal_coloring(h, budget);
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
}

ColoringProfile smallest_color_class(const Graph& h, long long budget)
{
    check_cap(h);
    ColoringProfile prof;
    prof.chi = chromatic_number(h, budget);
    if (h.order() == 0)
        return prof;

    long long nodes = 0;
    std::set<std::vector<int>> acc{std::vector<int>(prof.chi, 0)};
    for (const auto& comp : components(h)) {
        ComponentSizes enumerator(h.induced(comp), prof.chi, nodes, budget);
        auto local = enumerator.run();
        std::set<std::vector<int>> next;
        for (const auto& a : acc)
            for (auto b : local) {
                std::sort(b.begin(), b.end());
                do {
                    std::vector<int> sum(prof.chi);
                    for (int c = 0; c < prof.chi; ++c)
                        sum[c] = a[c] + b[c];
                    std::sort(sum.begin(), sum.end());
                    next.insert(std::move(sum));
                    if (++nodes > budget)
                        throw BudgetExhausted("coloring enumeration exceeded node budget");
                } while (std::next_permutation(b.begin(), b.end()));
            }
        acc = std::move(next);
    }
    prof.sigma = h.order();
    for (const auto& v : acc) {
        if (v.front() == 0)
            continue; // fewer than chi classes used
        prof.optimal_class_size_multisets.push_back(v);
        prof.sigma = std::min(prof.sigma, v.front());
    }
    return prof;
}

std::vector<int> smallest_class_coloring(const Graph& h, long long budget)
{
    auto prof = smallest_color_class(h, budget);
    const int n = h.order(), chi = prof.chi, sigma = prof.sigma;
    if (n == 0)
        return {};
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return h.degree(a) > h.degree(b); });

    std::vector<int> color(n, -1), size(chi, 0);
    long long nodes = 0;
    // Color 0 is the designated smallest class; colors 1.. are interchangeable and
    // introduced in order.
    std::function<bool(int, int)> go = [&](int idx, int others) -> bool {
        if (++nodes > budget)
            throw BudgetExhausted("coloring search exceeded node budget");
        if (size[0] > sigma || size[0] + (n - idx) < sigma)
            return false;
        if (idx == n)
            return size[0] == sigma && others == chi - 1;
        int v = order[idx];
        for (int c = 0; c <= std::min(others + 1, chi - 1); ++c) {
            bool ok = true;
            for (int u : h.neighbors(v))
                if (color[u] == c) {
                    ok = false;
                    break;
                }
            if (! ok)
                continue;
            color[v] = c;
            ++size[c];
            if (go(idx + 1, std::max(others, c)))
                return true;
            --size[c];
            color[v] = -1;
        }
        return false;
    };
    if (! go(0, 0))
        throw LemmaViolation("no optimal coloring attains the smallest class size");
    return color;
}

Rational chi_critical(int chi, int sigma, int order)
{
    if (order <= sigma)
        throw PreconditionError("critical chromatic number needs sigma < |H|");
    return Rational(static_cast<long long>(chi - 1) * order, order - sigma);
}

Rational chi_critical(const Graph& h)
{
    if (! has_edge(h))
        throw PreconditionError("critical chromatic number needs a graph with an edge");
    auto prof = smallest_color_class(h);
    return chi_critical(prof.chi, prof.sigma, h.order());
}

BottleSpec bottle_spec(int k, int sigma, int omega)
{
    if (k < 2 || sigma < 1 || omega < sigma)
        throw PreconditionError("bottle graph needs k >= 2 and 1 <= sigma <= omega");
    BottleSpec b;
    b.k = k;
    b.sigma = sigma;
    b.omega = omega;
    b.alpha = Rational(sigma, omega);
    b.chi_cr = (k - 1) + b.alpha;
    b.color_vector.push_back(b.alpha / b.chi_cr);
    for (int i = 1; i < k; ++i)
        b.color_vector.push_back(1 / b.chi_cr);
    return b;
}

Graph bottle_graph(int k, int sigma, int omega)
{
    bottle_spec(k, sigma, omega);
    std::vector<int> sizes{sigma};
    sizes.insert(sizes.end(), k - 1, omega);
    return complete_multipartite(sizes);
}

BottleResult bottle_of(const Graph& h, long long tiling_budget)
{
    if (! has_edge(h))
        throw PreconditionError("bottle_of needs a graph with an edge");
    check_cap(h);
    const auto coloring = smallest_class_coloring(h);
    const int hn = h.order();
    const int k = *std::max_element(coloring.begin(), coloring.end()) + 1;
    const int sigma = static_cast<int>(std::count(coloring.begin(), coloring.end(), 0));

    // Bottles with color vector (s, t, ..., t) have neck:width = s:t = p:q.
    const Rational ratio(static_cast<long long>(k - 1) * sigma, hn - sigma);
    const int p = static_cast<int>(numer(ratio));
    const int q = static_cast<int>(denom(ratio));
    const int g = (k - 1) * sigma / p; // multiplier reaching order (k-1)h

    BottleResult res;
    for (int m = 1; m <= g; ++m) {
        const int order = m * (p + (k - 1) * q);
        if (order % hn != 0)
            continue;
        Graph b = bottle_graph(k, m * p, m * q);
        if (m == g) {
            // Cyclic shift: copy j sends the smallest class to the neck and class i >= 1
            // to width part 1 + (i - 1 + j) mod (k - 1).
            std::vector<int> next(k, 0);
            std::vector<int> base(k, 0);
            base[0] = 0;
            for (int part = 1; part < k; ++part)
                base[part] = m * p + (part - 1) * m * q;
            for (int j = 0; j < k - 1; ++j) {
                VertexSet copy;
                for (int v = 0; v < hn; ++v) {
                    int c = coloring[v];
                    int part = c == 0 ? 0 : 1 + (c - 1 + j) % (k - 1);
                    copy.push_back(base[part] + next[part]++);
                }
                std::sort(copy.begin(), copy.end());
                res.factor.push_back(std::move(copy));
            }
            for (const auto& copy : res.factor)
                if (! hosts_copy(b, copy, h))
                    throw LemmaViolation("cyclic-shift construction produced a non-copy");
            res.from_shift_construction = true;
        }
        else {
            TilingResult t = max_tiling(b, h, tiling_budget);
            if (! t.optimal && ! t.leftover.empty())
                throw BudgetExhausted("bottle search: factor solver exceeded node budget");
            if (! t.leftover.empty())
                continue;
            res.factor = std::move(t.copies);
        }
        res.spec = bottle_spec(k, m * p, m * q);
        res.graph = std::move(b);
        // One bottle per order carries the required vector, so this is the only candidate.
        res.minimal_candidates.push_back(res.spec);
        return res;
    }
    throw LemmaViolation("bottle search ended without reaching the shift construction");
}

Rational gamma_param(int k, const Rational& alpha)
{
    if (k < 2 || alpha <= 0 || alpha > 1)
        throw PreconditionError("gamma needs k >= 2 and 0 < alpha <= 1");
    return alpha / ((k - 1) * ((k - 1) + alpha));
}

Rational ore_threshold_for(const Rational& chi_cr, int n) { return 2 * (1 - 1 / chi_cr) * n; }

Rational ore_threshold(const Graph& h, int n) { return ore_threshold_for(chi_critical(h), n); }

} // namespace oretile
