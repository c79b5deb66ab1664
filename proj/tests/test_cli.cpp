#include "doctest.h"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

std::string cli()
{
    const char* p = std::getenv("ORETILE_CLI");
    REQUIRE_MESSAGE(p != nullptr, "ORETILE_CLI is not set");
    return p;
}

Run run(const std::string& args)
{
    const std::string cmd = cli() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Run r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct Scratch {
    fs::path dir;
    Scratch()
    {
        dir = fs::temp_directory_path() / ("oretile_cli_" + std::to_string(getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    }
};

const char* c5 = "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n";
const char* k33 = "6 9\n0 3\n0 4\n0 5\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n";

} // namespace

TEST_CASE("chromatic and tile")
{
    Scratch s;
    auto g = s.write("c5.txt", c5);
    auto r = run("chromatic " + g);
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["chi"] == 3);
    CHECK(j["sigma"] == 1);
    CHECK(j["chi_cr"] == "5/2");

    auto b = s.write("k33.txt", k33);
    r = run("tile " + b + " --pattern K2");
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(j["copy_count"] == 3);
    CHECK(j["leftover_count"] == 0);
    CHECK(j["optimal"] == true);
    CHECK(j["ore_margin"] == "0");

    r = run("tile " + b + " --pattern K1,2 --format csv");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("key,value\n", 0) == 0);
    CHECK(r.out.find("copy_count,2") != std::string::npos);

    r = run("--seed 5 tile " + b + " --pattern K2 --greedy --format text");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("mode") != std::string::npos);

    // no triangle, budget of one node: the search cannot finish
    r = run("tile " + g + " --pattern K3 --budget 1");
    CHECK(r.code == 3);
    CHECK(json::parse(r.out)["optimal"] == false);
}

TEST_CASE("cover, bounds and sinkset")
{
    Scratch s;
    auto g = s.write("c5.txt", c5);
    auto r = run("cover " + g + " -k 3 --exact");
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["certified"] == true);
    CHECK(j["signature"] == json::array({0, 2, 1}));

    r = run("bounds -k 3 --sigma 1 --omega 2");
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(j["values"]["leftover_general"] == "230");
    CHECK(j["values"]["min_valid_L"] == 363331916235360LL);
    CHECK(j["violations"].empty());

    // mu too large for alpha = 1/2
    CHECK(run("bounds -k 3 --sigma 1 --omega 2 --mu 1/10").code == 2);

    // beyond 64 bits the integer is a string
    r = run("bounds -k 4 --sigma 1 --omega 3 --mu 1/40 --d 1/100000 --eps 1/1000000");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["values"]["min_valid_L"] == "7898357239437717486720");

    auto d = s.write("d.txt", "4 4\n0 1\n1 0\n2 3\n3 2\n");
    r = run("sinkset " + d);
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(j["sinks"] == json::array({0, 2}));
    CHECK(j["covers"] == true);
    CHECK(j["bound"] == 2);
}

TEST_CASE("decompose")
{
    Scratch s;
    json sys{{"k", 3}, {"alpha", "1/2"}, {"mu", "1/10"}, {"cliques", json::array()}};
    for (int i = 0; i < 20; ++i)
        sys["cliques"].push_back({{"order", 3}});
    json links = json::object();
    for (int i = 0; i < 20; ++i)
        links[std::to_string(i)] = {{"kind", "well"}, {"b_positions", {0}}};
    sys["cliques"].push_back({{"order", 2}, {"links", links}});
    auto path = s.write("sys.json", sys.dump());
    auto r = run("decompose " + path);
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["residue"] == 0);
    CHECK(j["s"] == "19/155");
    CHECK(j["eliminations"].size() == 1);
    CHECK(j["tiles"]["width"] == 360);
    CHECK(j["tiles"]["small"] == 181);

    CHECK(run("decompose " + path + " --L 7").code == 2);
    CHECK(run("decompose " + s.write("bad.json", "{nope")).code == 2);
}

TEST_CASE("experiment and global flags")
{
    Scratch s;
    auto cfg = s.write("t.cfg", "mode = theorem\npattern = K2\ngrid = 10, 12\ntrials = 1\n");
    auto r = run("experiment " + cfg + " --format csv");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("kind,n,seed,ore_margin,leftover,optimal,pass\n", 0) == 0);
    CHECK(run("experiment " + cfg + " --format csv").out == r.out);

    auto out = (s.dir / "rep.json").string();
    r = run("--out " + out + " experiment " + cfg);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(out);
    auto j = json::parse(in);
    CHECK(j["pass"] == true);
    CHECK(j["rows"].size() == 6);

    auto pcfg = s.write("p.cfg", "mode = pipeline\npattern = K2\nruns = 1\nL_min = 100\nL_max = 120\n");
    r = run("--seed 4 experiment " + pcfg);
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(j["rows"][0]["pass"] == true);

    CHECK(run("experiment " + s.write("bad.cfg", "bogus = 1\n")).code == 2);
    CHECK(run("experiment " + s.write("bad2.cfg", "trials = x\n")).code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("chromatic /nonexistent/graph.txt").code == 1);
}
