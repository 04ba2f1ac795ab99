#include "../tools/cli.hpp"
#include "bivirus/csv.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <sstream>

using namespace bivirus;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "bivirus");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("bivirus_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

csv::Table table(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return csv::read(f);
}

const std::string kC6 = testing_support::data_file("c6.txt");
const std::string kW6 = testing_support::data_file("wheel6.txt");

}  // namespace

TEST_CASE("rate specs") {
    const auto g = testing_support::share(generators::cycle(4));
    const auto [f, q] = cli::parse_rates("linear:beta=0.5,delta=2", g);
    CHECK(f.role() == RateRole::Infection);
    CHECK(q.role() == RateRole::Recovery);
    CHECK(f.describe() == "LinearInfection(beta=0.5)");
    CHECK_NOTHROW(cli::parse_rates("case2:alpha=2,delta=1", g));
    CHECK_NOTHROW(cli::parse_rates("case3:k=2,alpha=2", g));
    CHECK_THROWS_AS(cli::parse_rates("case3:alpha=2,k=2,delta=1", g), cli::ConfigError);
}

TEST_CASE("rate spec errors") {
    const auto g = testing_support::share(generators::cycle(4));
    CHECK_THROWS_WITH(cli::parse_rates("linear", g), ContainsSubstring("kind:key=value"));
    CHECK_THROWS_WITH(cli::parse_rates("quadratic:beta=1", g), ContainsSubstring("unknown rate kind"));
    CHECK_THROWS_WITH(cli::parse_rates("linear:beta=1", g), ContainsSubstring("missing 'delta'"));
    CHECK_THROWS_WITH(cli::parse_rates("linear:beta=1,delta=1,gamma=3", g), ContainsSubstring("unknown key"));
    CHECK_THROWS_WITH(cli::parse_rates("linear:beta=x,delta=1", g), ContainsSubstring("bad value"));
    CHECK_THROWS_AS(cli::parse_rates("linear:beta=-1,delta=1", g), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_rates("linear:beta,delta=1", g), cli::ConfigError);
}

TEST_CASE("spectra") {
    const auto r = invoke({"spectra", "--graph-a", kC6, "--graph-b", kW6});
    CHECK(r.code == cli::kOk);
    CHECK_THAT(r.out, ContainsSubstring("lambda_A=2\n"));
    CHECK_THAT(r.out, ContainsSubstring("edges_B=10\n"));
    CHECK_THAT(r.out, ContainsSubstring("dmax_B=5\n"));
}

TEST_CASE("classify writes a verdict") {
    TempDir dir;
    const auto r = invoke({"classify", "--graph-a", kC6, "--graph-b", kC6, "--rates1", "linear:beta=0.4,delta=1",
                           "--rates2", "linear:beta=0.4,delta=1", "--out", dir.str()});
    CHECK(r.code == cli::kOk);
    CHECK_THAT(r.out, ContainsSubstring("outcome=VirusFree"));
    const auto t = table(dir.path / "verdict.csv");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "VirusFree");
    CHECK(csv::parse_double(t.rows[0][t.column("avg_xstar")]) == 0.0);
}

TEST_CASE("simulate from zero stays at zero") {
    TempDir dir;
    const auto r = invoke({"simulate", "--graph-a", kC6, "--graph-b", kW6, "--init", "zero", "--t-max", "5",
                           "--conv-tol", "0", "--seed", "9", "--out", dir.str()});
    CHECK(r.code == cli::kOk);
    const auto t = table(dir.path / "trajectory_0.csv");
    REQUIRE(t.rows.size() >= 2);
    for (const auto& row : t.rows) {
        for (std::size_t k = 1; k < row.size(); ++k) {
            CHECK(csv::parse_double(row[k]) == 0.0);
        }
    }
    CHECK(csv::parse_double(t.rows.back()[0]) == 5.0);
    const auto s = table(dir.path / "summary.csv");
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0][s.column("terminal_reason")] == "max_time");
    const auto meta = slurp(dir.path / "metadata.txt");
    CHECK_THAT(meta, ContainsSubstring("seed=9"));
    CHECK_THAT(meta, ContainsSubstring("prng=mt19937_64"));
}

TEST_CASE("simulate: several random starts are reproducible") {
    TempDir d1, d2;
    const std::vector<std::string> base{"simulate", "--graph-a", kC6, "--graph-b", kW6, "--rates1",
                                        "case2:alpha=2,delta=1", "--rates2", "case3:alpha=2,k=2",
                                        "--starts", "3", "--seed", "4", "--t-max", "50"};
    auto a1 = base, a2 = base;
    a1.insert(a1.end(), {"--out", d1.str()});
    a2.insert(a2.end(), {"--out", d2.str()});
    REQUIRE(invoke(a1).code == cli::kOk);
    REQUIRE(invoke(a2).code == cli::kOk);
    CHECK(table(d1.path / "summary.csv").rows.size() == 3);
    for (int k = 0; k < 3; ++k) {
        const auto name = "trajectory_" + std::to_string(k) + ".csv";
        CHECK(slurp(d1.path / name) == slurp(d2.path / name));
    }
}

TEST_CASE("simulate: explicit initial state") {
    TempDir dir;
    CHECK(invoke({"simulate", "--graph-a", kC6, "--graph-b", kW6, "--init", "x=0.3,y=0.2", "--out", dir.str()})
              .code == cli::kOk);
    const auto t = table(dir.path / "trajectory_0.csv");
    CHECK(csv::parse_double(t.rows[0][t.column("x_3")]) == 0.3);
    CHECK(invoke({"simulate", "--graph-a", kC6, "--graph-b", kW6, "--init", "x=0.8,y=0.4", "--out", dir.str()})
              .code == cli::kConfigError);
}

TEST_CASE("sweep output does not depend on the worker count") {
    TempDir d1, d2;
    const std::vector<std::string> base{"sweep", "--graph-a", kC6, "--graph-b", kW6, "--grid1", "7", "--grid2", "5"};
    auto a1 = base, a2 = base;
    a1.insert(a1.end(), {"--out", d1.str(), "--threads", "1"});
    a2.insert(a2.end(), {"--out", d2.str(), "--threads", "3"});
    const auto r1 = invoke(a1);
    const auto r2 = invoke(a2);
    REQUIRE(r1.code == cli::kOk);
    REQUIRE(r2.code == cli::kOk);
    CHECK(r1.out == r2.out);
    CHECK(slurp(d1.path / "regions.csv") == slurp(d2.path / "regions.csv"));
    CHECK(slurp(d1.path / "curves.csv") == slurp(d2.path / "curves.csv"));
    CHECK(table(d1.path / "regions.csv").rows.size() == 35);
    CHECK(table(d1.path / "curves.csv").rows.size() == 5);
}

TEST_CASE("bracket writes both endpoints") {
    TempDir dir;
    const auto r = invoke({"bracket", "--graph-a", kC6, "--graph-b", kW6, "--rates1", "linear:beta=0.85,delta=1",
                           "--rates2", "linear:beta=0.5,delta=1", "--out", dir.str()});
    REQUIRE(r.code == cli::kOk);
    CHECK_THAT(r.out, ContainsSubstring("outcome=Coexistence"));
    const auto t = table(dir.path / "bracket.csv");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "lower");
    CHECK(t.header.size() == 3 + 12);
}

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(invoke({}).code == cli::kConfigError);
    CHECK(invoke({"frobnicate"}).code == cli::kConfigError);
    CHECK(invoke({"spectra", "--graph-a", "/nonexistent.txt"}).code == cli::kConfigError);
    CHECK(invoke({"classify", "--graph-a", kC6}).code == cli::kConfigError);
    const auto bad_rates = invoke({"classify", "--graph-a", kC6, "--graph-b", kW6, "--rates1", "linear:beta=1",
                                   "--out", dir.str()});
    CHECK(bad_rates.code == cli::kConfigError);
    CHECK_THAT(bad_rates.err, ContainsSubstring("missing 'delta'"));
    CHECK(invoke({"sweep", "--graph-a", kC6, "--graph-b", kW6, "--tau1-range", "2:1", "--out", dir.str()}).code ==
          cli::kConfigError);

    // Module failures: bracket of a virus-free system, and a disconnected graph.
    const auto vf = invoke({"bracket", "--graph-a", kC6, "--graph-b", kC6, "--rates1", "linear:beta=0.4,delta=1",
                            "--rates2", "linear:beta=0.4,delta=1", "--out", dir.str()});
    CHECK(vf.code == cli::kModuleError);
    CHECK_FALSE(vf.err.empty());
    const auto split = dir.path / "split.txt";
    std::ofstream(split) << "0 1\n2 3\n";
    const auto disc = invoke({"spectra", "--graph-a", split.string()});
    CHECK(disc.code == cli::kModuleError);
    CHECK_THAT(disc.err, ContainsSubstring("disconnected"));
}

TEST_CASE("check-assumptions reports every assumption") {
    const auto r = invoke({"check-assumptions", "--graph-a", kC6, "--graph-b", kW6, "--rates1",
                           "case2:alpha=2,delta=1", "--rates2", "case3:alpha=2,k=2", "--samples", "8"});
    CHECK(r.code == cli::kOk);
    CHECK_THAT(r.out, ContainsSubstring("virus1:"));
    CHECK_THAT(r.out, ContainsSubstring("virus2: dfr=satisfied"));
    CHECK_THAT(r.out, !ContainsSubstring("FAIL"));
}
