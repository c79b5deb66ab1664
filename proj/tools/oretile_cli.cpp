#include "oretile/bounds.hpp"
#include "oretile/chromatic.hpp"
#include "oretile/cover.hpp"
#include "oretile/decomposition.hpp"
#include "oretile/errors.hpp"
#include "oretile/graph.hpp"
#include "oretile/pipeline.hpp"
#include "oretile/report.hpp"
#include "oretile/tiling.hpp"
#include "oretile/transfer.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace oretile;

namespace {

constexpr int exit_io = 1;
constexpr int exit_precondition = 2;
constexpr int exit_budget = 3;
constexpr int exit_lemma = 4;

struct Globals {
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string format = "json";
    std::string out;
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        parts.push_back(item);
    return parts;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// "K3" is a complete graph, "K1,2,2" complete multipartite; anything else is a graph file
Graph parse_pattern(const std::string& spec)
{
    if (spec.size() > 1 && spec[0] == 'K' && spec.find_first_not_of("0123456789,", 1) == std::string::npos) {
        std::vector<int> parts;
        for (const auto& p : split(spec.substr(1), ','))
            parts.push_back(std::stoi(p));
        return parts.size() == 1 ? complete_graph(parts[0]) : complete_multipartite(parts);
    }
    return read_graph_file(spec);
}

std::map<std::string, std::string> read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError(path + ":" + std::to_string(no) + ": expected key = value");
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        kv[trim(line.substr(0, eq))] = value;
    }
    return kv;
}

std::string take(std::map<std::string, std::string>& kv, const std::string& key, const std::string& fallback)
{
    auto it = kv.find(key);
    if (it == kv.end())
        return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
}

void reject_unknown(const std::map<std::string, std::string>& kv)
{
    if (!kv.empty())
        throw PreconditionError("unknown config key '" + kv.begin()->first + "'");
}

Json experiment(const std::string& path, const Globals& g)
{
    auto kv = read_config(path);
    const std::string mode = take(kv, "mode", "theorem");
    const std::string pattern = take(kv, "pattern", "K3");
    Graph h = parse_pattern(pattern);
    std::uint64_t seed = std::stoull(take(kv, "seed", std::to_string(g.seed)));
    if (g.seed_given)
        seed = g.seed;
    Json rep;
    if (mode == "theorem") {
        std::vector<int> grid;
        for (const auto& n : split(take(kv, "grid", "9,18,27"), ','))
            grid.push_back(std::stoi(trim(n)));
        const int trials = std::stoi(take(kv, "trials", "3"));
        const long long budget = std::stoll(take(kv, "budget", "2000000"));
        reject_unknown(kv);
        rep = to_json(run_theorem_experiment(h, pattern, grid, trials, seed, budget));
    } else if (mode == "pipeline") {
        PipelineBatchSpec spec;
        spec.runs = std::stoi(take(kv, "runs", "20"));
        spec.L_min = std::stoi(take(kv, "L_min", "100"));
        spec.L_max = std::stoi(take(kv, "L_max", "300"));
        spec.mu = parse_rational(take(kv, "mu", "1/10"));
        spec.density = parse_rational(take(kv, "density", "9/10"));
        spec.cross_drop = parse_rational(take(kv, "cross_drop", "1/5"));
        spec.exceptional = std::stoi(take(kv, "exceptional", "1"));
        spec.planted_bad = std::stoi(take(kv, "planted_bad", "2"));
        spec.cfg.d = parse_rational(take(kv, "d", "1/10"));
        spec.cfg.eps = parse_rational(take(kv, "eps", "1/100"));
        spec.cfg.theta = parse_rational(take(kv, "theta", "1/1000"));
        spec.seed = seed;
        reject_unknown(kv);
        rep = to_json(run_pipeline_batch(h, pattern, spec));
    } else
        throw PreconditionError("unknown experiment mode '" + mode + "'");
    return rep;
}

int emit(const Json& report, const Globals& g)
{
    const Format f = parse_format(g.format);
    if (g.out.empty()) {
        render(std::cout, report, f);
        return 0;
    }
    std::ofstream out(g.out);
    if (!out)
        throw std::runtime_error("cannot write '" + g.out + "'");
    render(out, report, f);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"oretile: H-tiling laboratory"};
    app.require_subcommand(1);
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "random seed");
    app.add_option("--format", g.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--out", g.out, "write the report here instead of stdout");
    app.fallthrough();

    std::string graph_path, pattern, system_path, config_path;
    long long budget = 2'000'000;
    int k = 3, sigma = 1, omega = 1;
    std::string mu = "1/10", alpha_s, L_s, orders;
    std::string bmu = "1/20", bd = "1/2000", beps = "1/20000";
    bool exact = false, greedy = false, bottle = false;

    auto* chrom = app.add_subcommand("chromatic", "chromatic number, smallest class and critical chromatic number");
    chrom->add_option("graph", graph_path)->required();
    chrom->add_flag("--bottle", bottle, "also build the bottle graph");

    auto* tile = app.add_subcommand("tile", "largest H-tiling");
    tile->add_option("graph", graph_path)->required();
    tile->add_option("--pattern", pattern, "pattern graph file, or K3 / K1,2,2")->required();
    auto* ex = tile->add_flag("--exact", exact, "branch and bound (default)");
    tile->add_flag("--greedy", greedy, "greedy only")->excludes(ex);
    tile->add_option("--budget", budget, "node budget");

    auto* cover = app.add_subcommand("cover", "maximal k-clique cover");
    cover->add_option("graph", graph_path)->required();
    cover->add_option("-k", k)->required();
    cover->add_flag("--exact", exact, "certified exhaustive search");

    auto* bounds = app.add_subcommand("bounds", "parameter table");
    bounds->add_option("-k", k)->required();
    bounds->add_option("--sigma", sigma)->required();
    bounds->add_option("--omega", omega)->required();
    bounds->add_option("--mu", bmu);
    bounds->add_option("--d", bd);
    bounds->add_option("--eps", beps);
    bounds->add_option("--orders", orders, "orders i with a (k-i)-clique present, for the minimal L (default all)");

    auto* dec = app.add_subcommand("decompose", "cluster-system decomposition certificate");
    dec->add_option("system", system_path)->required();
    dec->add_option("--alpha", alpha_s);
    dec->add_option("--mu", mu);
    dec->add_option("--L", L_s, "common cluster size (default: the minimal valid L)");

    auto* sink = app.add_subcommand("sinkset", "greedy sink set of a digraph");
    sink->add_option("digraph", graph_path)->required();

    auto* exp = app.add_subcommand("experiment", "theorem or pipeline experiment from a key=value file");
    exp->add_option("config", config_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_precondition;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (*chrom)
            return emit(chromatic_json(read_graph_file(graph_path), bottle), g);

        if (*tile) {
            Graph gr = read_graph_file(graph_path);
            Graph h = parse_pattern(pattern);
            TilingResult t = greedy ? greedy_tiling(gr, h, g.seed) : max_tiling(gr, h, budget);
            Json rep = to_json(t);
            auto ore = ore_report(gr, h);
            rep["mode"] = greedy ? "greedy" : "exact";
            rep["ore_margin"] = ore.margin ? json_rational(*ore.margin) : Json("inf");
            emit(rep, g);
            if (!greedy && !t.optimal) {
                std::cerr << "budget exhausted; the tiling is the best found\n";
                return exit_budget;
            }
            return 0;
        }

        if (*cover) {
            Graph gr = read_graph_file(graph_path);
            CliqueCover c = maximal_clique_cover(gr, k, exact ? CoverMode::exact : CoverMode::heuristic);
            validate_cover(gr, c);
            return emit(to_json(c), g);
        }

        if (*bounds) {
            const Rational m = parse_rational(bmu);
            Json rep = to_json(bounds_table(k, sigma, omega, m, parse_rational(bd), parse_rational(beps)));
            if (sigma < omega) {
                std::vector<int> is;
                if (orders.empty())
                    for (int i = 1; i < k; ++i)
                        is.push_back(i);
                else
                    for (const auto& x : split(orders, ','))
                        is.push_back(std::stoi(x));
                rep["values"]["min_valid_L"] = json_integer(minimal_valid_L(Rational(sigma, omega), k, m, is));
            }
            emit(rep, g);
            if (!rep["violations"].empty()) {
                for (const auto& v : rep["violations"])
                    std::cerr << "violated: " << v.get<std::string>() << "\n";
                return exit_precondition;
            }
            return 0;
        }

        if (*dec) {
            std::ifstream in(system_path);
            if (!in)
                throw std::runtime_error("cannot open system file '" + system_path + "'");
            Json j;
            try {
                j = Json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw PreconditionError(std::string("bad system JSON: ") + e.what());
            }
            if (alpha_s.empty())
                alpha_s = j.value("alpha", std::string("1/2"));
            if (!dec->get_option("--mu")->count() && j.contains("mu"))
                mu = j.at("mu").get<std::string>();
            const Rational alpha = parse_rational(alpha_s), m = parse_rational(mu);
            const int kk = j.at("k").get<int>();
            if (L_s.empty() && j.contains("L"))
                L_s = j.at("L").is_string() ? j.at("L").get<std::string>() : std::to_string(j.at("L").get<long long>());
            Integer L;
            if (L_s.empty()) {
                std::set<int> is;
                for (const auto& c : j.at("cliques")) {
                    int order = c.contains("sizes") ? static_cast<int>(c.at("sizes").size()) : c.at("order").get<int>();
                    if (order < kk)
                        is.insert(kk - order);
                }
                L = minimal_valid_L(alpha, kk, m, std::vector<int>(is.begin(), is.end()));
            } else
                L = Integer(L_s);
            ClusterSystem sys = system_from_json(j, L);
            return emit(to_json(run_decomposition(sys, alpha, m, L)), g);
        }

        if (*sink) {
            Digraph dg = read_digraph_file(graph_path);
            SinkSetResult s = sink_set_greedy(dg);
            Json rep = to_json(s);
            const int n = dg.order();
            rep["order"] = n;
            rep["arcs"] = dg.arc_count();
            rep["bound"] = n / (s.min_out_degree + 1);
            std::vector<char> hit(n, 0);
            for (int v : s.sinks)
                for (int u : source_set(dg, v))
                    hit[u] = 1;
            rep["covers"] = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
            return emit(rep, g);
        }

        if (*exp) {
            Json rep = experiment(config_path, g);
            emit(rep, g);
            return rep.value("pass", false) ? 0 : exit_lemma;
        }
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return exit_precondition;
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return exit_budget;
    } catch (const LemmaViolation& e) {
        std::cerr << "lemma violated: " << e.what() << "\n";
        return exit_lemma;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad argument: " << e.what() << "\n";
        return exit_precondition;
    } catch (const std::out_of_range& e) {
        std::cerr << "bad argument: " << e.what() << "\n";
        return exit_precondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    return 0;
}
