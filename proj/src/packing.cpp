#include "oretile/packing.hpp"

#include "oretile/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>

namespace oretile {

// Edmonds' blossom algorithm; mate[v] = partner or -1.
std::vector<int> maximum_matching(const Graph& g, long long* phases)
{
    const int n = g.order();
    std::vector<int> mate(n, -1), parent(n), base(n);
    std::vector<char> used(n), blossom(n);
    std::vector<VertexSet> adj(n);
    for (int v = 0; v < n; ++v)
        adj[v] = g.neighbors(v);

    auto lca = [&](int a, int b) {
        std::vector<char> seen(n, 0);
        for (;;) {
            a = base[a];
            seen[a] = 1;
            if (mate[a] == -1)
                break;
            a = parent[mate[a]];
        }
        for (;;) {
            b = base[b];
            if (seen[b])
                return b;
            b = parent[mate[b]];
        }
    };
    auto mark_path = [&](int v, int b, int child) {
        while (base[v] != b) {
            blossom[base[v]] = blossom[base[mate[v]]] = 1;
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    };
    auto find_path = [&](int root) -> int {
        std::fill(used.begin(), used.end(), 0);
        std::fill(parent.begin(), parent.end(), -1);
        std::iota(base.begin(), base.end(), 0);
        used[root] = 1;
        std::queue<int> q;
        q.push(root);
        while (! q.empty()) {
            int v = q.front();
            q.pop();
            for (int to : adj[v]) {
                if (base[v] == base[to] || mate[v] == to)
                    continue;
                if (to == root || (mate[to] != -1 && parent[mate[to]] != -1)) {
                    int cur = lca(v, to);
                    std::fill(blossom.begin(), blossom.end(), 0);
                    mark_path(v, cur, to);
                    mark_path(to, cur, v);
                    for (int i = 0; i < n; ++i)
                        if (blossom[base[i]]) {
                            base[i] = cur;
                            if (! used[i]) {
                                used[i] = 1;
                                q.push(i);
                            }
                        }
                }
                else if (parent[to] == -1) {
                    parent[to] = v;
                    if (mate[to] == -1)
                        return to;
                    used[mate[to]] = 1;
                    q.push(mate[to]);
                }
            }
        }
        return -1;
    };

    for (int v = 0; v < n; ++v) {
        if (mate[v] != -1)
            continue;
        if (phases)
            ++*phases;
        int u = find_path(v);
        while (u != -1) {
            int pv = parent[u], ppv = mate[pv];
            mate[u] = pv;
            mate[pv] = u;
            u = ppv;
        }
    }
    return mate;
}

namespace {

// Calls visit(chosen) for every size-r subset of pool in lexicographic order; stops on false.
bool for_each_subset(const VertexSet& pool, int r, const std::function<bool(const VertexSet&)>& visit)
{
    VertexSet chosen;
    std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
        if (static_cast<int>(chosen.size()) == r)
            return visit(chosen);
        for (std::size_t i = from; i + (r - chosen.size()) <= pool.size(); ++i) {
            chosen.push_back(pool[i]);
            bool cont = rec(i + 1);
            chosen.pop_back();
            if (! cont)
                return false;
        }
        return true;
    };
    return rec(0);
}

} // namespace

StarPacking max_star_packing(const Graph& g, int t, long long budget)
{
    if (t < 1)
        throw PreconditionError("star size t must be positive");
    const int n = g.order();
    StarPacking out;
    out.t = t;
    if (t == 1) {
        long long phases = 0;
        auto mate = maximum_matching(g, &phases);
        for (int v = 0; v < n; ++v)
            if (mate[v] > v)
                out.stars.push_back({v, {mate[v]}});
        out.optimal = true;
        out.nodes_explored = phases;
        return out;
    }

    std::vector<char> free(n, 1);
    int free_count = n;
    std::vector<Star> current, best;
    long long nodes = 0;
    bool exhausted = false;
    const int ceiling = n / (t + 1);

    auto free_nbrs = [&](int v) {
        VertexSet out_nb;
        for (int u : g.neighbors(v))
            if (free[u])
                out_nb.push_back(u);
        return out_nb;
    };
    auto take = [&](const Star& s, char value) {
        free[s.center] = value;
        for (int u : s.leaves)
            free[u] = value;
        free_count += value ? (t + 1) : -(t + 1);
    };

    std::function<void(int)> search = [&](int from) {
        if (exhausted || static_cast<int>(best.size()) == ceiling)
            return;
        if (++nodes > budget) {
            exhausted = true;
            return;
        }
        if (current.size() > best.size())
            best = current;
        int centers = 0;
        for (int v = 0; v < n; ++v)
            if (free[v] && static_cast<int>(free_nbrs(v).size()) >= t)
                ++centers;
        int bound = std::min(free_count / (t + 1), centers);
        if (static_cast<int>(current.size()) + bound <= static_cast<int>(best.size()))
            return;
        int v = from;
        while (v < n && ! free[v])
            ++v;
        if (v == n)
            return;

        auto branch = [&](const Star& s) -> bool {
            take(s, 0);
            current.push_back(s);
            search(v + 1);
            current.pop_back();
            take(s, 1);
            return ! exhausted && static_cast<int>(best.size()) < ceiling;
        };
        // v as a center.
        VertexSet nv = free_nbrs(v);
        if (static_cast<int>(nv.size()) >= t &&
            ! for_each_subset(nv, t, [&](const VertexSet& leaves) { return branch({v, leaves}); }))
            return;
        // v as a leaf of a free neighbor.
        for (int c : nv) {
            VertexSet pool;
            for (int u : free_nbrs(c))
                if (u != v)
                    pool.push_back(u);
            if (static_cast<int>(pool.size()) < t - 1)
                continue;
            bool cont = for_each_subset(pool, t - 1, [&](const VertexSet& others) {
                VertexSet leaves = others;
                leaves.insert(std::lower_bound(leaves.begin(), leaves.end(), v), v);
                return branch({c, leaves});
            });
            if (! cont)
                return;
        }
        // v stays unused.
        free[v] = 0;
        --free_count;
        search(v + 1);
        ++free_count;
        free[v] = 1;
    };
    search(0);
    if (current.size() > best.size())
        best = current;
    out.stars = std::move(best);
    out.optimal = ! exhausted || static_cast<int>(out.stars.size()) == ceiling;
    out.nodes_explored = nodes;
    return out;
}

StarPacking greedy_star_packing(const Graph& g, int t)
{
    if (t < 1)
        throw PreconditionError("star size t must be positive");
    const int n = g.order();
    std::vector<char> free(n, 1);
    std::vector<int> fdeg(n);
    for (int v = 0; v < n; ++v)
        fdeg[v] = g.degree(v);
    StarPacking out;
    out.t = t;
    for (;;) {
        // Center: free vertex of least free degree that still supports a t-star.
        int center = -1;
        for (int v = 0; v < n; ++v)
            if (free[v] && fdeg[v] >= t && (center < 0 || fdeg[v] < fdeg[center]))
                center = v;
        if (center < 0)
            break;
        VertexSet cand;
        for (int u : g.neighbors(center))
            if (free[u])
                cand.push_back(u);
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return fdeg[a] < fdeg[b]; });
        cand.resize(t);
        std::sort(cand.begin(), cand.end());
        VertexSet members = cand;
        members.push_back(center);
        for (int v : members) {
            free[v] = 0;
            for (int w : g.neighbors(v))
                --fdeg[w];
        }
        out.stars.push_back({center, cand});
        ++out.nodes_explored;
    }
    return out;
}

Rational star_bound(long long u1_size, long long delta_h, long long max_degree, int t,
                    const Rational& eps1)
{
    if (max_degree < 1)
        throw PreconditionError("star bound needs maximum degree at least 1");
    return Rational(delta_h - t + 1) * (1 - 2 * eps1) * u1_size / (2 * (t + 1) * max_degree);
}

ComplementMatching complement_perfect_matching(const Graph& g, const VertexSet& a,
                                               const VertexSet& b)
{
    if (a.size() != b.size())
        throw PreconditionError("complement matching needs |A| = |B|");
    for (int x : a)
        if (std::find(b.begin(), b.end(), x) != b.end())
            throw PreconditionError("complement matching needs disjoint sides");
    const int m = static_cast<int>(a.size());
    std::vector<int> mate_a(m, -1), mate_b(m, -1);
    std::vector<char> seen_b;

    std::function<bool(int)> augment = [&](int i) -> bool {
        // A free partner is taken before any existing pair is disturbed.
        for (int j = 0; j < m; ++j)
            if (mate_b[j] < 0 && ! g.adjacent(a[i], b[j])) {
                mate_a[i] = j;
                mate_b[j] = i;
                return true;
            }
        for (int j = 0; j < m; ++j) {
            if (g.adjacent(a[i], b[j]) || seen_b[j])
                continue;
            seen_b[j] = 1;
            if (mate_b[j] < 0 || augment(mate_b[j])) {
                mate_a[i] = j;
                mate_b[j] = i;
                return true;
            }
        }
        return false;
    };

    ComplementMatching out;
    for (int i = 0; i < m; ++i) {
        seen_b.assign(m, 0);
        if (augment(i))
            continue;
        // Alternating tree from the unmatched vertex i gives the violator.
        std::vector<char> in_s(m, 0), in_t(m, 0);
        std::vector<int> queue{i};
        in_s[i] = 1;
        for (std::size_t q = 0; q < queue.size(); ++q)
            for (int j = 0; j < m; ++j)
                if (! g.adjacent(a[queue[q]], b[j]) && ! in_t[j]) {
                    in_t[j] = 1;
                    int partner = mate_b[j];
                    if (partner >= 0 && ! in_s[partner]) {
                        in_s[partner] = 1;
                        queue.push_back(partner);
                    }
                }
        for (int x = 0; x < m; ++x) {
            if (in_s[x])
                out.violator.push_back(a[x]);
            if (in_t[x])
                out.violator_neighbors.push_back(b[x]);
        }
        std::sort(out.violator.begin(), out.violator.end());
        std::sort(out.violator_neighbors.begin(), out.violator_neighbors.end());
        return out;
    }
    out.perfect = true;
    for (int i = 0; i < m; ++i)
        out.pairs.emplace_back(a[i], b[mate_a[i]]);
    return out;
}

CopyMatching match_copies(const std::vector<VertexSet>& left, const std::vector<VertexSet>& right,
                          const std::function<bool(const VertexSet&, const VertexSet&)>& compatible)
{
    const int nl = static_cast<int>(left.size()), nr = static_cast<int>(right.size());
    CopyMatching out;
    std::map<std::pair<int, int>, bool> memo;
    auto ok = [&](int i, int j) {
        auto [it, inserted] = memo.try_emplace({i, j}, false);
        if (inserted) {
            ++out.predicate_calls;
            it->second = compatible(left[i], right[j]);
        }
        return it->second;
    };
    std::vector<int> mate_l(nl, -1), mate_r(nr, -1);
    std::vector<char> seen;
    std::function<bool(int)> augment = [&](int i) -> bool {
        for (int j = 0; j < nr; ++j)
            if (mate_r[j] < 0 && ok(i, j)) {
                mate_l[i] = j;
                mate_r[j] = i;
                return true;
            }
        for (int j = 0; j < nr; ++j) {
            if (seen[j] || ! ok(i, j))
                continue;
            seen[j] = 1;
            if (mate_r[j] < 0 || augment(mate_r[j])) {
                mate_l[i] = j;
                mate_r[j] = i;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < nl; ++i) {
        seen.assign(nr, 0);
        augment(i);
    }
    for (int i = 0; i < nl; ++i) {
        if (mate_l[i] >= 0)
            out.pairs.emplace_back(i, mate_l[i]);
        else
            out.unmatched_left.push_back(i);
    }
    for (int j = 0; j < nr; ++j)
        if (mate_r[j] < 0)
            out.unmatched_right.push_back(j);
    return out;
}

} // namespace oretile
