#include "oretile/report.hpp"

#include "oretile/chromatic.hpp"
#include "oretile/errors.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace oretile {

namespace {

std::string connection_name(Connection c)
{
    switch (c) {
    case Connection::well: return "well";
    case Connection::over: return "over";
    case Connection::under: return "under";
    }
    return "?";
}

Connection parse_connection(const std::string& s)
{
    if (s == "well")
        return Connection::well;
    if (s == "over")
        return Connection::over;
    if (s == "under")
        return Connection::under;
    throw PreconditionError("unknown connection kind '" + s + "'");
}

Json rationals(const std::vector<Rational>& v)
{
    Json a = Json::array();
    for (const auto& x : v)
        a.push_back(json_rational(x));
    return a;
}

Json profile(const TileProfile& p)
{
    return Json{{"width", json_integer(p.width)}, {"small", json_integer(p.small)}, {"count", json_integer(p.count)}};
}

std::string scalar_text(const Json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_null())
        return "";
    return v.dump();
}

bool all_scalars(const Json& a)
{
    return std::all_of(a.begin(), a.end(), [](const Json& x) { return !x.is_structured(); });
}

void flatten(const Json& v, const std::string& key, std::vector<std::pair<std::string, std::string>>& out)
{
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            flatten(it.value(), key.empty() ? it.key() : key + "." + it.key(), out);
    } else if (v.is_array() && all_scalars(v)) {
        std::string joined;
        for (const auto& x : v)
            joined += (joined.empty() ? "" : " ") + scalar_text(x);
        out.emplace_back(key, joined);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i)
            flatten(v[i], key + "[" + std::to_string(i) + "]", out);
    } else
        out.emplace_back(key, scalar_text(v));
}

std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

} // namespace

Format parse_format(const std::string& name)
{
    if (name == "json")
        return Format::json;
    if (name == "csv")
        return Format::csv;
    if (name == "text")
        return Format::text;
    throw PreconditionError("unknown format '" + name + "'");
}

Json json_integer(const Integer& x)
{
    if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(x);
    return x.str();
}

Json json_rational(const Rational& x) { return to_string(x); }

Json to_json(const TilingResult& t)
{
    return Json{{"copy_count", t.copies.size()},
                {"leftover_count", t.leftover.size()},
                {"optimal", t.optimal},
                {"nodes_explored", t.nodes_explored},
                {"copies", t.copies},
                {"leftover", t.leftover}};
}

Json to_json(const CliqueCover& cover)
{
    Json fam = Json::object();
    for (int i = cover.k; i >= 1; --i)
        fam[std::to_string(i)] = cover.families[i];
    return Json{{"k", cover.k},
                {"certified", cover.certified},
                {"signature", cover.signature()},
                {"phi", rationals(phi_vector(cover, cover.vertex_count()))},
                {"families", fam}};
}

Json to_json(const DecompositionCertificate& c)
{
    Json elim = Json::array();
    for (const auto& e : c.eliminations)
        elim.push_back(Json{{"clique", e.clique},
                            {"i", e.i},
                            {"mode", e.mode == ElimMode::typical ? "typical" : "atypical"},
                            {"used", e.used},
                            {"l_prime", json_integer(e.l_prime)},
                            {"t1", json_integer(e.t1)},
                            {"t2", json_integer(e.t2)},
                            {"per_round", json_integer(e.per_round)},
                            {"rounds", json_integer(e.rounds)},
                            {"large_size", json_integer(e.large_size)},
                            {"small_size", json_integer(e.small_size)},
                            {"consumed_mass", json_integer(e.consumed_mass)},
                            {"produced_mass", json_integer(e.produced_mass)},
                            {"availability_slack", json_rational(e.availability_slack)},
                            {"pool_margin", json_integer(e.pool_margin)}});
    Json inter = Json::array();
    for (const auto& p : c.intermediate)
        inter.push_back(profile(p));
    Json ledger = Json::array();
    for (const auto& l : c.ledger)
        ledger.push_back(Json{{"step", l.step},
                              {"clique", l.clique},
                              {"consumed", json_integer(l.consumed)},
                              {"produced", json_integer(l.produced)},
                              {"note", l.note}});
    return Json{{"k", c.k},
                {"alpha", json_rational(c.alpha)},
                {"mu", json_rational(c.mu)},
                {"s", json_rational(c.s)},
                {"alpha_prime", Json{{"value", json_rational(c.alpha_prime.value)},
                                     {"p", json_integer(c.alpha_prime.p)},
                                     {"q", json_integer(c.alpha_prime.q)}}},
                {"c_t", c.c_t},
                {"L", json_integer(c.L)},
                {"L_prime", json_integer(c.L_prime)},
                {"L1", json_integer(c.L1)},
                {"min_valid_L", json_integer(c.min_valid_L)},
                {"realized_c", json_rational(c.realized_c)},
                {"phi", rationals(c.phi)},
                {"lambda", rationals(c.lambda)},
                {"availability_slack", rationals(c.availability_slack)},
                {"bound_slack", rationals(c.bound_slack)},
                {"eliminations", elim},
                {"exceptional_cliques", c.exceptional_cliques},
                {"exceptional_mass", json_integer(c.exceptional_mass)},
                {"intermediate", inter},
                {"tiles", profile(c.tiles)},
                {"ledger", ledger},
                {"input_mass", json_integer(c.input_mass)},
                {"output_mass", json_integer(c.output_mass)},
                {"residue", json_integer(c.residue)}};
}

Json to_json(const SinkSetResult& s)
{
    Json rounds = Json::array();
    for (const auto& r : s.rounds)
        rounds.push_back(Json{{"chosen", r.chosen}, {"removed", r.removed}, {"remaining_min_out", r.remaining_min_out}});
    return Json{{"min_out_degree", s.min_out_degree}, {"sink_count", s.sinks.size()}, {"sinks", s.sinks},
                {"rounds", rounds}};
}

Json to_json(const ExperimentReport& rep)
{
    Json rows = Json::array();
    for (const auto& r : rep.rows)
        rows.push_back(Json{{"kind", r.kind},
                            {"n", r.n},
                            {"seed", r.seed},
                            {"ore_margin", r.margin},
                            {"leftover", r.leftover},
                            {"optimal", r.optimal},
                            {"pass", r.pass}});
    Json mx = Json::object();
    for (const auto& [n, y] : rep.max_leftover)
        mx[std::to_string(n)] = y;
    return Json{{"pattern", rep.pattern},
                {"bound", json_integer(rep.bound)},
                {"matching_cap", rep.matching_cap},
                {"slope", json_rational(rep.slope)},
                {"max_leftover", mx},
                {"pass", rep.pass},
                {"rows", rows}};
}

Json to_json(const PipelineBatch& b)
{
    Json rows = Json::array();
    for (const auto& r : b.runs)
        rows.push_back(Json{{"seed", r.seed},
                            {"L", r.L},
                            {"elements", r.elements},
                            {"n", r.n},
                            {"exceptional", r.exceptional},
                            {"alpha_prime", json_rational(r.alpha_prime)},
                            {"min_pair_density", json_rational(r.min_pair_density)},
                            {"min_availability", json_rational(r.min_availability)},
                            {"availability_floor", json_rational(r.availability_floor)},
                            {"insertions", r.insertions},
                            {"max_selections", r.max_selections},
                            {"cap", r.cap},
                            {"cleanup_moved", r.cleanup_moved},
                            {"transfer_copies", r.transfer_copies},
                            {"transfer_failures", r.transfer_failures},
                            {"leftover", r.leftover},
                            {"bound", json_integer(r.bound)},
                            {"pass", r.pass},
                            {"error", r.error}});
    return Json{{"pattern", b.pattern},
                {"k", b.k},
                {"balanced", b.balanced},
                {"max_leftover", b.max_leftover},
                {"pass", b.pass},
                {"rows", rows}};
}

Json to_json(const BoundsTable& table)
{
    Json values = Json::object();
    for (const auto& [k, v] : table.rows)
        values[k] = v;
    return Json{{"values", values}, {"violations", table.violations}};
}

Json chromatic_json(const Graph& h, bool with_bottle)
{
    ColoringProfile prof = smallest_color_class(h);
    std::vector<int> coloring = smallest_class_coloring(h);
    std::vector<int> sizes(prof.chi, 0);
    for (int c : coloring)
        ++sizes[c];
    Json j{{"order", h.order()},
           {"edges", h.edge_count()},
           {"chi", prof.chi},
           {"sigma", prof.sigma},
           {"chi_cr", json_rational(chi_critical(h))},
           {"coloring", coloring},
           {"class_sizes", sizes},
           {"optimal_class_size_multisets", prof.optimal_class_size_multisets}};
    if (with_bottle) {
        BottleResult b = bottle_of(h);
        j["bottle"] = Json{{"k", b.spec.k},
                           {"sigma", b.spec.sigma},
                           {"omega", b.spec.omega},
                           {"order", b.graph.order()},
                           {"chi_cr", json_rational(b.spec.chi_cr)},
                           {"color_vector", rationals(b.spec.color_vector)},
                           {"from_shift_construction", b.from_shift_construction},
                           {"factor", b.factor}};
    }
    return j;
}

ClusterSystem system_from_json(const Json& j, const Integer& L)
{
    ClusterSystem sys;
    if (!j.contains("k") || !j.contains("cliques"))
        throw PreconditionError("system needs \"k\" and \"cliques\"");
    sys.k = j.at("k").get<int>();
    for (const auto& c : j.at("cliques")) {
        RegularClique rc;
        rc.id = c.value("id", -1);
        if (c.contains("sizes")) {
            for (const auto& s : c.at("sizes"))
                rc.sizes.push_back(s.is_string() ? Integer(s.get<std::string>()) : Integer(s.get<std::int64_t>()));
        } else {
            rc.sizes.assign(c.at("order").get<int>(), L);
        }
        if (rc.sizes.empty() || rc.order() > sys.k)
            throw PreconditionError("clique order must lie in [1, k]");
        rc.multiplicity = c.value("multiplicity", 1);
        if (c.contains("links"))
            for (auto it = c.at("links").begin(); it != c.at("links").end(); ++it) {
                ConnectionEntry e;
                e.kind = parse_connection(it.value().value("kind", std::string("well")));
                e.b_positions = it.value().value("b_positions", std::vector<int>{});
                rc.links[std::stoi(it.key())] = e;
            }
        sys.add(std::move(rc));
    }
    return sys;
}

void render(std::ostream& out, const Json& report, Format format)
{
    if (format == Format::json) {
        out << report.dump(2) << "\n";
        return;
    }
    if (format == Format::csv) {
        if (report.contains("rows") && report.at("rows").is_array()) {
            std::vector<std::string> cols;
            std::vector<std::vector<std::pair<std::string, std::string>>> rows;
            for (const auto& r : report.at("rows")) {
                rows.emplace_back();
                flatten(r, "", rows.back());
                for (const auto& [k, v] : rows.back())
                    if (std::find(cols.begin(), cols.end(), k) == cols.end())
                        cols.push_back(k);
            }
            for (std::size_t i = 0; i < cols.size(); ++i)
                out << (i ? "," : "") << csv_cell(cols[i]);
            out << "\n";
            for (const auto& r : rows) {
                for (std::size_t i = 0; i < cols.size(); ++i) {
                    auto it = std::find_if(r.begin(), r.end(), [&](const auto& p) { return p.first == cols[i]; });
                    out << (i ? "," : "") << (it == r.end() ? "" : csv_cell(it->second));
                }
                out << "\n";
            }
            return;
        }
        std::vector<std::pair<std::string, std::string>> flat;
        flatten(report, "", flat);
        out << "key,value\n";
        for (const auto& [k, v] : flat)
            out << csv_cell(k) << "," << csv_cell(v) << "\n";
        return;
    }
    std::vector<std::pair<std::string, std::string>> flat;
    flatten(report, "", flat);
    std::size_t width = 0;
    for (const auto& [k, v] : flat)
        width = std::max(width, k.size());
    for (const auto& [k, v] : flat)
        out << k << std::string(width - k.size() + 2, ' ') << v << "\n";
}

} // namespace oretile
