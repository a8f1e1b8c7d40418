#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pdpent/entropy.hpp"
#include "pdpent/functionals.hpp"
#include "pdpent/records.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "pdpent_cli_tests";
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = scratch_dir();
    const fs::path out = dir / ("stdout." + std::to_string(counter));
    const fs::path err = dir / ("stderr." + std::to_string(counter));
    ++counter;
    const std::string cmd = std::string("\"") + PDPENT_CLI_PATH + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    for (const std::string& line : split(text, '\n')) {
        if (!line.empty()) rows.push_back(split(line, ','));
    }
    return rows;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("simulate --no-such-flag 1").code == 2);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("simulate --help").code == 0);
}

TEST_CASE("invalid parameter values exit with code 2") {
    const auto r = run_cli("simulate --alpha 1.5 --theta 1 --length 5 --replicas 1 --seed 1");
    CHECK(r.code == 2);
    CHECK(r.err.find("alpha") != std::string::npos);
    CHECK(run_cli("simulate --alpha 0.5 --theta -0.6 --length 5 --replicas 1 --seed 1").code ==
          2);
    CHECK(run_cli("bounds --alpha 0 --theta 1").code == 2);  // no ell given
}

TEST_CASE("simulate writes schema-stable deterministic CSV") {
    const std::string args =
        "simulate --alpha 0 --theta 1 --length 100 --replicas 10 --seed 5";
    const auto r1 = run_cli(args);
    REQUIRE(r1.code == 0);
    const auto rows = parse_csv(r1.out);
    REQUIRE(rows.size() == 1001);  // header + 100 x 10
    CHECK(rows[0] == split(pdpent::kStepRecordHeader, ','));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 14);
        const std::uint64_t replica = std::stoull(rows[i][0]);
        const std::uint64_t ell = std::stoull(rows[i][1]);
        const std::uint64_t k = std::stoull(rows[i][2]);
        const std::uint64_t last_count = std::stoull(rows[i][3]);
        REQUIRE(replica < 10);
        REQUIRE(ell == (i - 1) % 100 + 1);
        REQUIRE(k >= 1);
        REQUIRE(k <= ell);
        REQUIRE(last_count >= 1);
        REQUIRE((rows[i][4] == "0" || rows[i][4] == "1"));
        REQUIRE((rows[i][4] == "1") == (last_count == 1));
        const double delta = std::stod(rows[i][10]);
        REQUIRE(delta >= -1e-12);
        const double eta = std::stod(rows[i][11]);
        REQUIRE(eta > 0.0);
    }
    // bitwise replay with the same seed, divergence with another
    const auto r2 = run_cli(args);
    CHECK(r1.out == r2.out);
    const auto r3 = run_cli("simulate --alpha 0 --theta 1 --length 100 --replicas 10 --seed 6");
    CHECK(r1.out != r3.out);
}

TEST_CASE("simulate --out matches stdout output") {
    const fs::path file = scratch_dir() / "sim.csv";
    fs::remove(file);
    const std::string base = "simulate --alpha 0.5 --theta 0.5 --length 40 --replicas 3 --seed 11";
    const auto direct = run_cli(base);
    REQUIRE(direct.code == 0);
    const auto to_file = run_cli(base + " --out \"" + file.string() + "\"");
    REQUIRE(to_file.code == 0);
    CHECK(slurp(file) == direct.out);
}

TEST_CASE("simulate rejects unwritable output with exit 1") {
    const auto r = run_cli(
        "simulate --alpha 0 --theta 1 --length 5 --replicas 1 --seed 1 "
        "--out /nonexistent-dir/x.csv");
    CHECK(r.code == 1);
    CHECK(!r.err.empty());
}

TEST_CASE("config file supplies defaults and flags override it") {
    const fs::path cfg = scratch_dir() / "sim.ini";
    {
        std::ofstream f(cfg);
        f << "alpha=0.5\n"
          << "theta=1\n"
          << "length=50\n"
          << "replicas=2\n"
          << "seed=9\n";
    }
    const auto from_cfg = run_cli("simulate --config \"" + cfg.string() + "\"");
    REQUIRE(from_cfg.code == 0);
    CHECK(parse_csv(from_cfg.out).size() == 101);  // header + 50 x 2

    const auto overridden =
        run_cli("simulate --config \"" + cfg.string() + "\" --length 10");
    REQUIRE(overridden.code == 0);
    CHECK(parse_csv(overridden.out).size() == 21);

    const auto same = run_cli("simulate --alpha 0.5 --theta 1 --length 50 --replicas 2 --seed 9");
    CHECK(from_cfg.out == same.out);
}

TEST_CASE("bounds tabulates extremes that round-trip to library values") {
    const auto r = run_cli("bounds --alpha 0.5 --theta 1 --grid 1,10,100,100000");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"ell", "h_max", "h_min", "max_step_bayes",
                                              "max_step_freq", "weighted_min", "step_lower",
                                              "step_upper", "step_asymptotic",
                                              "freq_asymptotic", "flagged"});
    const pdpent::PdpParams params(0.5, 1.0);
    const std::uint64_t ells[] = {1, 10, 100, 100000};
    for (int i = 0; i < 4; ++i) {
        const auto& row = rows[i + 1];
        REQUIRE(std::stoull(row[0]) == ells[i]);
        // 17 significant digits round-trip exactly
        CHECK(std::stod(row[1]) == pdpent::global_max_entropy(ells[i], params));
        CHECK(std::stod(row[2]) == pdpent::global_min_entropy(ells[i], params));
        CHECK(std::stod(row[3]) ==
              pdpent::max_entropy_weighted_step(ells[i], params).bayes);
        CHECK(std::stod(row[4]) == pdpent::max_entropy_weighted_step(ells[i], params).freq);
        CHECK(std::stod(row[1]) >= std::stod(row[2]));
        // the maximal step sits inside its log bounds, so no row is flagged
        CHECK(std::stod(row[6]) <= std::stod(row[3]));
        CHECK(std::stod(row[3]) <= std::stod(row[7]));
        CHECK(row[10] == "0");
    }
    // weighted minimum increases with ell
    CHECK(std::stod(rows[2][5]) > std::stod(rows[1][5]));
    CHECK(std::stod(rows[3][5]) > std::stod(rows[2][5]));
    // large-ell approximations: log(ell) - psi(1-alpha) and log(ell) + 1
    CHECK(std::abs(std::stod(rows[4][3]) - std::stod(rows[4][8])) <= 2e-4);
    CHECK(std::abs(std::stod(rows[4][4]) - std::stod(rows[4][9])) <= 2e-4);

    const auto single = run_cli("bounds --alpha 0.5 --theta 1 --length 10");
    REQUIRE(single.code == 0);
    CHECK(parse_csv(single.out).size() == 2);
}

TEST_CASE("prior-mc reports a summary near the closed-form target") {
    const fs::path draws = scratch_dir() / "draws.csv";
    fs::remove(draws);
    const auto r = run_cli("prior-mc --alpha 0 --theta 1 --replicas 400 --truncation 400 "
                           "--seed 3 --out \"" +
                           draws.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("target=1") != std::string::npos);
    CHECK(r.out.find("mean=") != std::string::npos);
    const auto rows = parse_csv(slurp(draws));
    REQUIRE(rows.size() == 401);
    CHECK(rows[0] == std::vector<std::string>{"draw", "entropy", "remainder"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(std::stod(rows[i][1]) > 0.0);
        REQUIRE(std::stod(rows[i][2]) >= 0.0);
        REQUIRE(std::stod(rows[i][2]) < 1.0);
    }
}

TEST_CASE("verify runs the scaled-down battery cleanly") {
    const auto r = run_cli(
        "verify --replicas 2 --length 50 --prior-replicas 250 --truncation 250 "
        "--bruteforce-max-ell 5 --consistency-replicas 6 --seed 7");
    INFO(r.out);
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("checks passed") != std::string::npos);
    CHECK(r.out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("verify accepts a restricted parameter grid") {
    const auto r = run_cli(
        "verify --replicas 2 --length 40 --prior-replicas 250 --truncation 250 "
        "--bruteforce-max-ell 4 --consistency-replicas 6 --seed 8 --grid \"0,1;0.5,0.5\"");
    INFO(r.out);
    REQUIRE(r.code == 0);
    const auto bad = run_cli("verify --grid \"2,1\" --replicas 2 --length 10");
    CHECK(bad.code == 2);
}
