#include "oretile/graph.hpp"

#include "oretile/chromatic.hpp"
#include "oretile/rng.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <functional>
#include <unordered_set>
#include <random>
#include <sstream>
#include <stdexcept>

namespace oretile {

Graph::Graph(int n) : n_(n), words_((n + 63) / 64)
{
    if (n < 0 || n > max_order)
        throw std::invalid_argument("graph order out of range [0, 4096]: " + std::to_string(n));
    rows_.assign(static_cast<std::size_t>(n) * words_, 0);
}

void Graph::check_vertex(int v) const
{
    if (v < 0 || v >= n_)
        throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
}

void Graph::add_edge(int u, int v)
{
    check_vertex(u);
    check_vertex(v);
    if (u == v)
        throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    rows_[idx(u) + (v >> 6)] |= std::uint64_t{1} << (v & 63);
    rows_[idx(v) + (u >> 6)] |= std::uint64_t{1} << (u & 63);
}

void Graph::remove_edge(int u, int v)
{
    check_vertex(u);
    check_vertex(v);
    rows_[idx(u) + (v >> 6)] &= ~(std::uint64_t{1} << (v & 63));
    rows_[idx(v) + (u >> 6)] &= ~(std::uint64_t{1} << (u & 63));
}

std::size_t Graph::edge_count() const
{
    std::size_t twice = 0;
    for (auto w : rows_)
        twice += std::popcount(w);
    return twice / 2;
}

int Graph::degree(int v) const
{
    int d = 0;
    for (int w = 0; w < words_; ++w)
        d += std::popcount(rows_[idx(v) + w]);
    return d;
}

int Graph::degree_into(int v, const VertexSet& set) const
{
    int d = 0;
    for (int u : set)
        d += adjacent(v, u);
    return d;
}

VertexSet Graph::neighbors(int v) const
{
    VertexSet out;
    for (int w = 0; w < words_; ++w) {
        auto bits = rows_[idx(v) + w];
        while (bits) {
            out.push_back(w * 64 + std::countr_zero(bits));
            bits &= bits - 1;
        }
    }
    return out;
}

std::vector<std::pair<int, int>> Graph::edges() const
{
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u)
        for (int v : neighbors(u))
            if (u < v)
                out.emplace_back(u, v);
    return out;
}

Graph Graph::induced(const VertexSet& vertices) const
{
    Graph sub(static_cast<int>(vertices.size()));
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            if (adjacent(vertices[i], vertices[j]))
                sub.add_edge(static_cast<int>(i), static_cast<int>(j));
    return sub;
}

bool Graph::is_clique(const VertexSet& vertices) const
{
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            if (! adjacent(vertices[i], vertices[j]))
                return false;
    return true;
}

Digraph::Digraph(int n) : n_(n)
{
    if (n < 0 || n > max_order)
        throw std::invalid_argument("digraph order out of range [0, 4096]: " + std::to_string(n));
    out_.assign(n, std::vector<char>(n, 0));
    succ_.assign(n, {});
}

void Digraph::add_arc(int u, int v)
{
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
        throw std::out_of_range("arc endpoint out of range");
    if (u == v)
        throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    if (out_[u][v])
        return;
    out_[u][v] = 1;
    auto& s = succ_[u];
    s.insert(std::lower_bound(s.begin(), s.end(), v), v);
}

VertexSet Digraph::in_neighbors(int v) const
{
    VertexSet in;
    for (int u = 0; u < n_; ++u)
        if (out_[u][v])
            in.push_back(u);
    return in;
}

int Digraph::min_out_degree() const
{
    int best = n_ == 0 ? 0 : n_;
    for (int v = 0; v < n_; ++v)
        best = std::min(best, out_degree(v));
    return best;
}

std::size_t Digraph::arc_count() const
{
    std::size_t m = 0;
    for (const auto& s : succ_)
        m += s.size();
    return m;
}

Graph complement(const Graph& g)
{
    Graph c(g.order());
    for (int u = 0; u < g.order(); ++u)
        for (int v = u + 1; v < g.order(); ++v)
            if (! g.adjacent(u, v))
                c.add_edge(u, v);
    return c;
}

Graph complete_multipartite(const std::vector<int>& sizes)
{
    if (sizes.empty())
        throw std::invalid_argument("complete_multipartite: empty part list");
    int n = 0;
    std::vector<int> part;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1)
            throw std::invalid_argument("complete_multipartite: part sizes must be positive");
        n += sizes[i];
        part.insert(part.end(), sizes[i], static_cast<int>(i));
    }
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (part[u] != part[v])
                g.add_edge(u, v);
    return g;
}

Graph complete_graph(int n)
{
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            g.add_edge(u, v);
    return g;
}

Graph cycle_graph(int n)
{
    if (n < 3)
        throw std::invalid_argument("cycle_graph: need n >= 3");
    Graph g(n);
    for (int v = 0; v < n; ++v)
        g.add_edge(v, (v + 1) % n);
    return g;
}

Graph path_graph(int n)
{
    Graph g(n);
    for (int v = 0; v + 1 < n; ++v)
        g.add_edge(v, v + 1);
    return g;
}

Graph petersen_graph()
{
    Graph g(10);
    for (int i = 0; i < 5; ++i) {
        g.add_edge(i, (i + 1) % 5);
        g.add_edge(i, i + 5);
        g.add_edge(5 + i, 5 + (i + 2) % 5);
    }
    return g;
}

Graph disjoint_union(const Graph& a, const Graph& b)
{
    Graph g(a.order() + b.order());
    for (auto [u, v] : a.edges())
        g.add_edge(u, v);
    for (auto [u, v] : b.edges())
        g.add_edge(a.order() + u, a.order() + v);
    return g;
}

namespace {

// Bernoulli trial with exact rational probability (denominator must fit in 64 bits).
class RationalCoin {
public:
    explicit RationalCoin(const Rational& p)
    {
        if (p < 0 || p > 1)
            throw std::invalid_argument("probability outside [0, 1]: " + to_string(p));
        if (denom(p) > Integer(std::numeric_limits<std::uint64_t>::max()))
            throw std::invalid_argument("probability denominator too large");
        num_ = numer(p).convert_to<std::uint64_t>();
        den_ = denom(p).convert_to<std::uint64_t>();
    }

    bool operator()(std::mt19937_64& rng) const
    {
        if (num_ == 0)
            return false;
        if (num_ == den_)
            return true;
        return draw_below(rng, den_) < num_;
    }

private:
    std::uint64_t num_ = 0, den_ = 1;
};

} // namespace

Graph random_graph(int n, const Rational& p, std::uint64_t seed)
{
    RationalCoin coin(p);
    std::mt19937_64 rng(seed);
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng))
                g.add_edge(u, v);
    return g;
}

std::pair<Graph, ClusterMap> blowup_instance(const Graph& reduced, int cluster_size,
                                             const Rational& d_lo, std::uint64_t seed)
{
    if (cluster_size < 1)
        throw std::invalid_argument("blowup_instance: cluster size must be positive");
    if (d_lo <= 0 || d_lo > 1)
        throw std::invalid_argument("blowup_instance: density must lie in (0, 1]");

    const int r = reduced.order();
    const int L = cluster_size;
    Graph g(r * L);
    ClusterMap map;
    map.reduced = reduced;
    map.clusters.resize(r);
    for (int i = 0; i < r; ++i)
        for (int x = 0; x < L; ++x)
            map.clusters[i].push_back(i * L + x);
    map.densities.assign(r, std::vector<Rational>(r, Rational(0)));

    // Each cross pair is kept with probability (1 + d_lo)/2, then topped up to reach d_lo.
    RationalCoin coin((1 + d_lo) / 2);
    std::mt19937_64 rng(seed);
    const long long need = static_cast<long long>(ceil_rat(d_lo * L * L));
    for (auto [i, j] : reduced.edges()) {
        std::vector<std::pair<int, int>> missing;
        long long present = 0;
        for (int x = 0; x < L; ++x)
            for (int y = 0; y < L; ++y) {
                if (coin(rng)) {
                    g.add_edge(i * L + x, j * L + y);
                    ++present;
                }
                else
                    missing.emplace_back(x, y);
            }
        portable_shuffle(missing, rng);
        for (std::size_t m = 0; present < need && m < missing.size(); ++m, ++present)
            g.add_edge(i * L + missing[m].first, j * L + missing[m].second);
        Rational dens(present, static_cast<long long>(L) * L);
        map.densities[i][j] = map.densities[j][i] = dens;
    }
    return {std::move(g), std::move(map)};
}

OreReport ore_report_for(const Graph& g, const Rational& chi_cr)
{
    const int n = g.order();
    OreReport rep;
    rep.threshold = 2 * (1 - 1 / chi_cr) * n;
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v)
        deg[v] = g.degree(v);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (! g.adjacent(u, v)) {
                long long s = deg[u] + deg[v];
                if (! rep.min_sum || s < *rep.min_sum) {
                    rep.min_sum = s;
                    rep.witness_pair = std::make_pair(u, v);
                }
            }
    if (rep.min_sum)
        rep.margin = Rational(*rep.min_sum) - rep.threshold;
    return rep;
}

OreReport ore_report(const Graph& g, const Graph& h) { return ore_report_for(g, chi_critical(h)); }

namespace {

void check_pair(const Graph& g, const VertexSet& a, const VertexSet& b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("vertex sets must be nonempty");
    std::vector<char> seen(g.order(), 0);
    for (int v : a) {
        if (v < 0 || v >= g.order())
            throw std::out_of_range("vertex out of range");
        seen[v] = 1;
    }
    for (int v : b) {
        if (v < 0 || v >= g.order())
            throw std::out_of_range("vertex out of range");
        if (seen[v])
            throw std::invalid_argument("vertex sets must be disjoint");
    }
}

} // namespace

long long edges_between(const Graph& g, const VertexSet& a, const VertexSet& b)
{
    long long e = 0;
    for (int u : a)
        e += g.degree_into(u, b);
    return e;
}

Rational density(const Graph& g, const VertexSet& a, const VertexSet& b)
{
    check_pair(g, a, b);
    return Rational(edges_between(g, a, b), static_cast<long long>(a.size() * b.size()));
}

std::optional<RegularityWitness> refute_regularity(const Graph& g, const VertexSet& a,
                                                   const VertexSet& b, const Rational& eps,
                                                   long long budget, std::uint64_t seed)
{
    check_pair(g, a, b);
    const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
    const long long total = edges_between(g, a, b);
    // Smallest admissible sizes: |X| > eps|A|, |Y| > eps|B|.
    const int min_x = static_cast<int>(floor_rat(eps * na)) + 1;
    const int min_y = static_cast<int>(floor_rat(eps * nb)) + 1;
    if (min_x > na || min_y > nb)
        return std::nullopt;

    // |e(X,Y)/(|X||Y|) - total/(|A||B|)| >= eps, compared over integers.
    const Integer ab = Integer(na) * nb;
    auto deviation = [&](long long exy, long long sx, long long sy) {
        Rational d = Rational(exy, sx * sy) - Rational(total) / Rational(ab);
        return d < 0 ? Rational(-d) : d;
    };

    std::optional<RegularityWitness> best;
    auto consider = [&](const VertexSet& x, const VertexSet& y, long long exy) {
        Rational dev = deviation(exy, static_cast<long long>(x.size()),
                                 static_cast<long long>(y.size()));
        if (dev >= eps && (! best || dev > best->deviation))
            best = RegularityWitness{x, y, dev};
    };

    if (na + nb <= refute_exhaustive_cap) {
        std::vector<std::uint32_t> nbr(na, 0);
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < nb; ++j)
                if (g.adjacent(a[i], b[j]))
                    nbr[i] |= 1U << j;
        for (std::uint32_t xm = 1; xm < (1U << na); ++xm) {
            int sx = std::popcount(xm);
            if (sx < min_x)
                continue;
            for (std::uint32_t ym = 1; ym < (1U << nb); ++ym) {
                int sy = std::popcount(ym);
                if (sy < min_y)
                    continue;
                long long exy = 0;
                for (int i = 0; i < na; ++i)
                    if ((xm >> i) & 1U)
                        exy += std::popcount(nbr[i] & ym);
                // Integer pre-filter before building rationals.
                Integer lhs = Integer(exy) * ab - Integer(total) * sx * sy;
                if (lhs < 0)
                    lhs = -lhs;
                if (Rational(lhs) < eps * Rational(ab * sx * sy))
                    continue;
                VertexSet x, y;
                for (int i = 0; i < na; ++i)
                    if ((xm >> i) & 1U)
                        x.push_back(a[i]);
                for (int j = 0; j < nb; ++j)
                    if ((ym >> j) & 1U)
                        y.push_back(b[j]);
                consider(x, y, exy);
            }
        }
        return best;
    }

    std::mt19937_64 rng(seed);
    VertexSet pa = a, pb = b;
    for (long long round = 0; round < budget; ++round) {
        int sx = static_cast<int>(draw_between(rng, min_x, na));
        int sy = static_cast<int>(draw_between(rng, min_y, nb));
        portable_shuffle(pa, rng);
        portable_shuffle(pb, rng);
        VertexSet x(pa.begin(), pa.begin() + sx), y(pb.begin(), pb.begin() + sy);
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        consider(x, y, edges_between(g, x, y));
    }
    return best;
}

DegreeViolations super_regular_degree_check(const Graph& g, const VertexSet& a,
                                            const VertexSet& b, const Rational& d)
{
    check_pair(g, a, b);
    DegreeViolations out;
    for (int v : a)
        if (Rational(g.degree_into(v, b)) <= d * static_cast<long long>(b.size()))
            out.in_a.push_back(v);
    for (int v : b)
        if (Rational(g.degree_into(v, a)) <= d * static_cast<long long>(a.size()))
            out.in_b.push_back(v);
    return out;
}

namespace {

// Colour refinement; the resulting ordered partition is isomorphism invariant.
std::vector<int> refined_colors(const Graph& g)
{
    const int n = g.order();
    std::vector<int> color(n, 0);
    for (int round = 0; round <= n; ++round) {
        std::vector<std::pair<std::vector<int>, int>> sig(n);
        for (int v = 0; v < n; ++v) {
            std::vector<int> s{color[v]};
            std::vector<int> nb;
            for (int u : g.neighbors(v))
                nb.push_back(color[u]);
            std::sort(nb.begin(), nb.end());
            s.insert(s.end(), nb.begin(), nb.end());
            sig[v] = {std::move(s), v};
        }
        std::vector<std::vector<int>> keys;
        for (auto& [s, v] : sig)
            keys.push_back(s);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::vector<int> next(n);
        for (int v = 0; v < n; ++v)
            next[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), sig[v].first) -
                                       keys.begin());
        bool same = next == color;
        color = std::move(next);
        if (same)
            break;
    }
    return color;
}

} // namespace

std::uint64_t canonical_code(const Graph& g)
{
    const int n = g.order();
    if (n > 11)
        throw std::invalid_argument("canonical_code supports at most 11 vertices");
    auto color = refined_colors(g);
    // Position p of the labeling is filled from the cell colour assigned to p.
    std::vector<int> slot_color(n);
    {
        std::vector<int> sorted = color;
        std::sort(sorted.begin(), sorted.end());
        slot_color = sorted;
    }
    std::vector<int> label(n, -1);
    std::vector<char> used(n, 0);
    std::uint64_t best = ~std::uint64_t{0};
    // Bits are laid out so that earlier positions dominate the comparison.
    auto bit_index = [n](int i, int j) { // i < j
        return static_cast<unsigned>(i * n - i * (i + 1) / 2 + (j - i - 1));
    };
    const unsigned total = static_cast<unsigned>(n * (n - 1) / 2);
    std::function<void(int, std::uint64_t)> place = [&](int pos, std::uint64_t code) {
        if (pos == n) {
            best = std::min(best, code);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (used[v] || color[v] != slot_color[pos])
                continue;
            std::uint64_t c = code;
            for (int q = 0; q < pos; ++q)
                if (g.adjacent(label[q], v))
                    c |= std::uint64_t{1} << (total - 1 - bit_index(q, pos));
            used[v] = 1;
            label[pos] = v;
            place(pos + 1, c);
            used[v] = 0;
        }
    };
    place(0, 0);
    return best;
}

std::vector<Graph> nonisomorphic_graphs(int n)
{
    if (n < 0 || n > enumeration_order_cap)
        throw std::invalid_argument("nonisomorphic_graphs supports 0 <= n <= 9");
    std::vector<Graph> level{Graph(0)};
    for (int m = 1; m <= n; ++m) {
        std::vector<Graph> next;
        std::unordered_set<std::uint64_t> seen;
        for (const auto& base : level)
            for (std::uint32_t mask = 0; mask < (1U << (m - 1)); ++mask) {
                Graph g(m);
                for (auto [u, v] : base.edges())
                    g.add_edge(u, v);
                for (int u = 0; u < m - 1; ++u)
                    if ((mask >> u) & 1U)
                        g.add_edge(u, m - 1);
                if (seen.insert(canonical_code(g)).second)
                    next.push_back(std::move(g));
            }
        level = std::move(next);
    }
    return level;
}

namespace {

// Next non-comment, non-blank line; false at end of input.
bool next_line(std::istream& in, std::string& line)
{
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            return true;
    }
    return false;
}

template <typename Sink>
int read_edge_list(std::istream& in, Sink&& add, const char* what)
{
    std::string line;
    if (! next_line(in, line))
        throw std::runtime_error(std::string(what) + ": missing header line");
    std::istringstream head(line);
    long long n = -1, m = -1;
    if (! (head >> n >> m) || n < 0 || m < 0)
        throw std::runtime_error(std::string(what) + ": malformed header '" + line + "'");
    add(static_cast<int>(n), -1, -1);
    for (long long i = 0; i < m; ++i) {
        if (! next_line(in, line))
            throw std::runtime_error(std::string(what) + ": expected " + std::to_string(m) +
                                     " edges, got " + std::to_string(i));
        std::istringstream ls(line);
        int u, v;
        if (! (ls >> u >> v))
            throw std::runtime_error(std::string(what) + ": malformed edge '" + line + "'");
        add(static_cast<int>(n), u, v);
    }
    return static_cast<int>(n);
}

} // namespace

Graph read_graph(std::istream& in)
{
    Graph g;
    read_edge_list(in, [&](int n, int u, int v) {
        if (u < 0)
            g = Graph(n);
        else
            g.add_edge(u, v);
    }, "graph");
    return g;
}

Graph read_graph_file(const std::string& path)
{
    std::ifstream in(path);
    if (! in)
        throw std::runtime_error("cannot open graph file '" + path + "'");
    return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g)
{
    auto es = g.edges();
    out << g.order() << ' ' << es.size() << '\n';
    for (auto [u, v] : es)
        out << u << ' ' << v << '\n';
}

Digraph read_digraph(std::istream& in)
{
    Digraph d;
    read_edge_list(in, [&](int n, int u, int v) {
        if (u < 0)
            d = Digraph(n);
        else
            d.add_arc(u, v);
    }, "digraph");
    return d;
}

Digraph read_digraph_file(const std::string& path)
{
    std::ifstream in(path);
    if (! in)
        throw std::runtime_error("cannot open digraph file '" + path + "'");
    return read_digraph(in);
}

void write_digraph(std::ostream& out, const Digraph& d)
{
    out << d.order() << ' ' << d.arc_count() << '\n';
    for (int u = 0; u < d.order(); ++u)
        for (int v : d.out_neighbors(u))
            out << u << ' ' << v << '\n';
}

} // namespace oretile
