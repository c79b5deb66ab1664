#include "oretile/transfer.hpp"

#include "oretile/errors.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <deque>

namespace oretile {

namespace {

using Bits = boost::dynamic_bitset<>;

// reverse breadth-first search; bit u set iff u reaches v
Bits reverse_reach(const std::vector<VertexSet>& pred, int v)
{
    Bits seen(pred.size());
    std::vector<int> stack{v};
    seen.set(v);
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int u : pred[x])
            if (!seen.test(u)) {
                seen.set(u);
                stack.push_back(u);
            }
    }
    return seen;
}

std::vector<VertexSet> predecessors(const Digraph& d)
{
    std::vector<VertexSet> pred(d.order());
    for (int u = 0; u < d.order(); ++u)
        for (int v : d.out_neighbors(u))
            pred[v].push_back(u);
    return pred;
}

Rational weighted_fraction(const Graph& r, int u, const std::vector<Rational>& weights)
{
    const int n = r.order();
    if (weights.empty())
        return n == 0 ? Rational(0) : Rational(r.degree(u)) / n;
    if (static_cast<int>(weights.size()) != n)
        throw PreconditionError("weight vector has the wrong length");
    Rational total = 0, near = 0;
    for (int v = 0; v < n; ++v) {
        total += weights[v];
        if (r.adjacent(u, v))
            near += weights[v];
    }
    return total == 0 ? Rational(0) : near / total;
}

} // namespace

TransferDigraph build_digraph(const Graph& r, const std::vector<VertexSet>& factor)
{
    const int n = r.order();
    TransferDigraph t;
    t.d = Digraph(n);
    t.factor = factor;
    t.element_of.assign(n, -1);
    t.self_arc.assign(n, 0);
    for (int e = 0; e < static_cast<int>(factor.size()); ++e)
        for (int c : factor[e]) {
            if (c < 0 || c >= n)
                throw PreconditionError("factor cluster " + std::to_string(c) + " out of range");
            if (t.element_of[c] != -1)
                throw PreconditionError("cluster " + std::to_string(c) + " lies in two factor elements");
            t.element_of[c] = e;
        }
    for (int u = 0; u < n; ++u)
        for (int e = 0; e < static_cast<int>(factor.size()); ++e) {
            const VertexSet& el = factor[e];
            // clusters of the element not adjacent to u (u itself counts as not adjacent)
            int missing = 0, miss_at = -1;
            for (int c : el)
                if (c == u || !r.adjacent(u, c)) {
                    ++missing;
                    miss_at = c;
                }
            if (missing > 1)
                continue;
            for (int to : el) {
                if (missing == 1 && to != miss_at)
                    continue;
                ArcWitness w;
                w.from = u;
                w.to = to;
                w.element = e;
                for (int c : el)
                    if (c != to)
                        w.adjacent.push_back(c);
                if (to == u)
                    t.self_arc[u] = 1;
                else
                    t.d.add_arc(u, to);
                t.witnesses[{u, to}] = std::move(w);
            }
        }
    return t;
}

void verify_digraph(const Graph& r, const TransferDigraph& t)
{
    const int n = r.order();
    if (t.order() != n)
        throw LemmaViolation("digraph order differs from the reduced graph");
    std::size_t expected = 0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            int e = t.element_of[v];
            bool arc = e >= 0;
            if (arc)
                for (int c : t.factor[e])
                    if (c != v && (c == u || !r.adjacent(u, c)))
                        arc = false;
            bool have = u == v ? t.self_arc[u] != 0 : t.d.has_arc(u, v);
            if (arc != have)
                throw LemmaViolation("arc (" + std::to_string(u) + ", " + std::to_string(v) + ") disagrees with R");
            if (!arc)
                continue;
            ++expected;
            auto it = t.witnesses.find({u, v});
            if (it == t.witnesses.end() || it->second.element != e)
                throw LemmaViolation("arc without a witness");
            for (int c : it->second.adjacent)
                if (!r.adjacent(u, c))
                    throw LemmaViolation("witness pair is not an edge of R");
        }
    if (expected != t.witnesses.size())
        throw LemmaViolation("stray witnesses");
}

VertexSet source_set(const Digraph& d, int v)
{
    if (v < 0 || v >= d.order())
        throw PreconditionError("vertex out of range");
    Bits b = reverse_reach(predecessors(d), v);
    VertexSet out;
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i))
        out.push_back(static_cast<int>(i));
    return out;
}

SinkSetResult sink_set_greedy(const Digraph& d)
{
    const int n = d.order();
    SinkSetResult res;
    res.min_out_degree = d.min_out_degree();
    const auto pred = predecessors(d);
    std::vector<Bits> w;
    w.reserve(n);
    for (int v = 0; v < n; ++v)
        w.push_back(reverse_reach(pred, v));
    // after deleting a source set, the source sets of the survivors only lose the deleted vertices
    Bits alive(n);
    alive.set();
    while (alive.any()) {
        int best = -1;
        std::size_t best_size = 0;
        int min_out = n;
        for (auto v = alive.find_first(); v != Bits::npos; v = alive.find_next(v)) {
            std::size_t size = (w[v] & alive).count();
            if (best < 0 || size > best_size) {
                best = static_cast<int>(v);
                best_size = size;
            }
            int out = 0;
            for (int x : d.out_neighbors(static_cast<int>(v)))
                out += alive.test(x);
            min_out = std::min(min_out, out);
        }
        SinkRound round{best, static_cast<int>(best_size), min_out};
        if (round.removed < min_out + 1 || round.removed < res.min_out_degree + 1)
            throw LemmaViolation("sink round at vertex " + std::to_string(best) + " removed only " +
                                 std::to_string(round.removed) + " vertices");
        alive -= w[best];
        res.sinks.push_back(best);
        res.rounds.push_back(round);
    }
    return res;
}

Digraph induced_subdigraph(const Digraph& d, const VertexSet& keep)
{
    std::vector<int> index(d.order(), -1);
    for (int i = 0; i < static_cast<int>(keep.size()); ++i)
        index[keep[i]] = i;
    Digraph sub(static_cast<int>(keep.size()));
    for (int i = 0; i < static_cast<int>(keep.size()); ++i)
        for (int v : d.out_neighbors(keep[i]))
            if (index[v] >= 0)
                sub.add_arc(i, index[v]);
    return sub;
}

Rational degree_threshold(int k, DegreeCase c, const OutDegreeParams& params)
{
    if (c == DegreeCase::general) {
        if (k < 2)
            throw PreconditionError("the general degree threshold needs k >= 2");
        return 1 - Rational(1, k - 1) + params.gamma - params.d - 2 * params.eps;
    }
    return 1 - Rational(1, k) - params.d - 2 * params.eps;
}

std::vector<Rational> factor_weights(int n, const std::vector<VertexSet>& factor, const Rational& alpha_prime)
{
    std::vector<Rational> w(n, Rational(0));
    for (const auto& el : factor)
        for (std::size_t i = 0; i < el.size(); ++i)
            w[el[i]] = i + 1 == el.size() ? alpha_prime : Rational(1);
    return w;
}

OutDegreeCheck out_degree_check(const Graph& r, const TransferDigraph& t, int u, const OutDegreeParams& params,
                                DegreeCase c, const std::vector<Rational>& weights)
{
    if (t.factor.empty())
        throw PreconditionError("empty factor");
    const int k = static_cast<int>(t.factor.front().size());
    const int n = t.order();
    OutDegreeCheck out;
    out.degree_fraction = weighted_fraction(r, u, weights);
    out.threshold = degree_threshold(k, c, params);
    out.out_degree = t.out_degree_with_self(u);
    bool covers = true;
    for (int e : t.element_of)
        covers = covers && e >= 0;
    out.hypothesis = covers && out.degree_fraction >= out.threshold;
    if (c == DegreeCase::general)
        out.bound = Rational((k - 1) * (k - 1)) * params.gamma / k * n;
    else {
        out.bound = Rational(n, 2 * k);
        out.hypothesis = out.hypothesis && k * (params.d + 2 * params.eps) <= Rational(1, 2);
    }
    out.holds = Rational(out.out_degree) >= out.bound;
    return out;
}

LowDegreeSplit split_low_degree(const Graph& r, const TransferDigraph& t, const Rational& threshold,
                                const std::vector<Rational>& weights)
{
    const int n = t.order();
    LowDegreeSplit s;
    for (int u = 0; u < n; ++u)
        if (weighted_fraction(r, u, weights) < threshold)
            s.low.push_back(u);
    s.low_is_clique = r.is_clique(s.low);
    const auto pred = predecessors(t.d);
    Bits reach(n);
    for (int u : s.low)
        reach |= reverse_reach(pred, u);
    for (int u = 0; u < n; ++u)
        (reach.test(u) ? s.reach_low : s.high_part).push_back(u);
    return s;
}

TransferPlan plan_transfers(const Digraph& d, const std::vector<long long>& extras, const VertexSet& sinks,
                            long long max_per_path)
{
    const int n = d.order();
    if (static_cast<int>(extras.size()) != n)
        throw PreconditionError("extras vector has the wrong length");
    for (long long x : extras)
        if (x < 0)
            throw PreconditionError("negative extras");
    TransferPlan plan;
    plan.residual = extras;
    std::vector<int> dist(n, -1), next(n, -1);
    std::deque<int> queue;
    for (int s : sinks) {
        if (s < 0 || s >= n)
            throw PreconditionError("sink out of range");
        if (dist[s] < 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    const auto pred = predecessors(d);
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : pred[v])
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    for (int u = 0; u < n; ++u)
        if (dist[u] > 0)
            for (int v : d.out_neighbors(u)) // ascending, so the first hit is the smallest id
                if (dist[v] == dist[u] - 1) {
                    next[u] = v;
                    break;
                }
    for (int u = 0; u < n; ++u) {
        if (extras[u] == 0 || dist[u] == 0)
            continue;
        if (dist[u] < 0) {
            plan.unreachable.push_back(u);
            continue;
        }
        VertexSet path{u};
        while (dist[path.back()] > 0)
            path.push_back(next[path.back()]);
        long long left = extras[u];
        while (left > 0) {
            long long chunk = max_per_path > 0 ? std::min(left, max_per_path) : left;
            plan.transfers.push_back({path, chunk});
            for (std::size_t i = 0; i + 1 < path.size(); ++i)
                plan.arc_load[{path[i], path[i + 1]}] += chunk;
            left -= chunk;
        }
        plan.residual[u] = 0;
        plan.residual[path.back()] += extras[u];
    }
    return plan;
}

} // namespace oretile
