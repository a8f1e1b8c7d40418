#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdpent/pdpent.hpp"

namespace {

/// Writes to --out when given, else to stdout.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw std::runtime_error("cannot open output file: " + path);
            }
        }
    }

    std::ostream& stream() { return file_ ? *file_ : std::cout; }

    void finish() {
        if (file_) {
            file_->flush();
            if (!*file_) {
                throw std::runtime_error("failed writing output file");
            }
        } else {
            std::cout.flush();
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<pdpent::PdpParams> parse_param_grid(const std::string& text) {
    std::vector<pdpent::PdpParams> grid;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ';')) {
        if (cell.empty()) continue;
        const auto comma = cell.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("grid cell must be alpha,theta: " + cell);
        }
        const double alpha = std::stod(cell.substr(0, comma));
        const double theta = std::stod(cell.substr(comma + 1));
        grid.emplace_back(alpha, theta);
    }
    if (grid.empty()) {
        throw std::invalid_argument("grid is empty");
    }
    return grid;
}

/// CLI11 expands config files only for the command parse() ran on, never for
/// subcommands, so each subcommand applies its own key=value file here.
/// Explicit command-line flags win over file values.
void apply_config(CLI::App& cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw CLI::FileError(path + ": cannot open config file");
    }
    const auto strip = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = strip(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        const std::string at = path + ":" + std::to_string(lineno);
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw CLI::FileError(at + ": expected key=value");
        }
        const std::string key = strip(text.substr(0, eq));
        std::string value = strip(text.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        CLI::Option* opt = key == "config" ? nullptr : cmd.get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw CLI::FileError(at + ": unknown option '" + key + "'");
        }
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

struct SimulateArgs {
    double alpha = 0.0;
    double theta = 1.0;
    std::uint64_t length = 100;
    std::uint64_t replicas = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
};

int cmd_simulate(const SimulateArgs& a) {
    const pdpent::PdpParams params(a.alpha, a.theta);
    OutputTarget target(a.out);
    std::ostream& os = target.stream();
    os << pdpent::kStepRecordHeader << '\n';
    for (std::uint64_t rep = 0; rep < a.replicas; ++rep) {
        pdpent::RandomEngine rng({a.seed, rep});
        const auto traj = pdpent::simulate_trajectory(params, a.length, rng);
        const auto recs = pdpent::evaluate_trajectory(traj, params, rep);
        // Reuse the row writer without repeating the header.
        std::ostringstream block;
        pdpent::write_step_records_csv(block, recs);
        const std::string text = block.str();
        os << text.substr(text.find('\n') + 1);
    }
    target.finish();
    return 0;
}

struct PriorMcArgs {
    double alpha = 0.0;
    double theta = 1.0;
    std::uint64_t replicas = 1000;
    std::uint64_t truncation = 1000;
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
};

int cmd_prior_mc(const PriorMcArgs& a) {
    const pdpent::PdpParams params(a.alpha, a.theta);
    if (!a.out.empty()) {
        // Per-draw output, replayed with the same stream layout as the
        // summary statistics below.
        OutputTarget target(a.out);
        std::ostream& os = target.stream();
        os << "draw,entropy,remainder\n";
        pdpent::RandomEngine rng({a.seed, 0});
        for (std::uint64_t r = 0; r < a.replicas; ++r) {
            const auto w = pdpent::sample_gem_weights(params, a.truncation, rng);
            double h = 0.0;
            for (const double p : w.weights) {
                if (p > 0.0) h -= p * std::log(p);
            }
            os << r << ',' << format17(h) << ',' << format17(w.remainder) << '\n';
        }
        target.finish();
    }
    const auto st = pdpent::verify::run_prior_mc(params, a.replicas, a.truncation, a.seed);
    std::cout << "mean=" << format17(st.mean) << " target=" << format17(st.target)
              << " se=" << format17(st.std_error)
              << " median_remainder=" << format17(st.median_remainder)
              << " draws=" << st.replicas << " truncation=" << st.truncation << '\n';
    if (!st.within_three_se()) {
        std::cerr << "prior-mc: sample mean off target beyond three standard errors\n";
        return 1;
    }
    return 0;
}

struct BoundsArgs {
    double alpha = 0.0;
    double theta = 1.0;
    std::uint64_t length = 0;
    std::string grid;
    std::string out;
    std::string config;
};

int cmd_bounds(const BoundsArgs& a) {
    const pdpent::PdpParams params(a.alpha, a.theta);
    std::vector<std::uint64_t> ells;
    if (!a.grid.empty()) {
        std::stringstream ss(a.grid);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const long long v = std::stoll(item);
            if (v < 1) throw std::invalid_argument("bounds: ell must be >= 1");
            ells.push_back(static_cast<std::uint64_t>(v));
        }
    }
    if (a.length > 0) ells.push_back(a.length);
    if (ells.empty()) {
        throw std::invalid_argument("bounds: give --length or --grid with at least one ell");
    }
    OutputTarget target(a.out);
    std::ostream& os = target.stream();
    os << "ell,h_max,h_min,max_step_bayes,max_step_freq,weighted_min,"
          "step_lower,step_upper,step_asymptotic,freq_asymptotic,flagged\n";
    const double psi_one = pdpent::digamma(1.0 - params.alpha);
    for (const std::uint64_t ell : ells) {
        const double hmax = pdpent::global_max_entropy(ell, params);
        const double hmin = pdpent::global_min_entropy(ell, params);
        const auto step = pdpent::max_entropy_weighted_step(ell, params);
        const double wmin = (params.theta + static_cast<double>(ell)) * hmin;
        // The maximal weighted step is psi(theta+ell+1) - psi(1-alpha); its
        // log bounds bracket it and log(ell) approximations take over for
        // large ell.  A flagged row means the exact value escaped its bounds,
        // which must never happen.
        const auto [psi_lo, psi_hi] =
            pdpent::digamma_log_bounds(params.theta + static_cast<double>(ell) + 1.0);
        const double step_lower = psi_lo - psi_one;
        const double step_upper = psi_hi - psi_one;
        const double step_asym = std::log(static_cast<double>(ell)) - psi_one;
        const double freq_asym = std::log(static_cast<double>(ell)) + 1.0;
        const bool flagged = step.bayes < step_lower || step.bayes > step_upper;
        os << ell << ',' << format17(hmax) << ',' << format17(hmin) << ','
           << format17(step.bayes) << ',' << format17(step.freq) << ',' << format17(wmin)
           << ',' << format17(step_lower) << ',' << format17(step_upper) << ','
           << format17(step_asym) << ',' << format17(freq_asym) << ',' << (flagged ? 1 : 0)
           << '\n';
    }
    target.finish();
    return 0;
}

struct VerifyArgs {
    std::uint64_t replicas = 625;
    std::uint64_t length = 1000;
    std::uint64_t prior_replicas = 10000;
    std::uint64_t truncation = 10000;
    std::uint64_t bruteforce_max_ell = 12;
    std::uint64_t consistency_replicas = 100;
    std::uint64_t seed = 20250614;
    std::string grid;
    std::string config;
};

int cmd_verify(const VerifyArgs& a) {
    pdpent::verify::Options opt;
    opt.replicas_per_cell = a.replicas;
    opt.length = a.length;
    opt.prior_replicas = a.prior_replicas;
    opt.truncation = a.truncation;
    opt.bruteforce_max_ell = a.bruteforce_max_ell;
    opt.consistency_replicas = a.consistency_replicas;
    opt.seed = a.seed;
    if (!a.grid.empty()) opt.grid = parse_param_grid(a.grid);
    const auto results = pdpent::verify::run_all(opt, &std::cout);
    std::size_t failed = 0;
    std::string first_failed;
    for (const auto& r : results) {
        if (!r.pass) {
            if (failed == 0) first_failed = r.name;
            ++failed;
        }
    }
    if (failed > 0) {
        std::cout << failed << " of " << results.size()
                  << " checks failed; first failure: " << first_failed << '\n';
        return 1;
    }
    std::cout << "all " << results.size() << " checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy estimation under two-parameter Poisson-Dirichlet sampling"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Sample trajectories and write per-step records as CSV");
    sim_cmd->add_option("--alpha", sim.alpha, "Discount, 0 <= alpha < 1");
    sim_cmd->add_option("--theta", sim.theta, "Concentration, theta > -alpha");
    sim_cmd->add_option("--length", sim.length, "Steps per trajectory")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--replicas", sim.replicas, "Number of trajectories")
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Base seed; replica r uses stream r");
    sim_cmd->add_option("--out", sim.out, "Output CSV path (stdout when omitted)");
    sim_cmd->add_option("--config", sim.config, "Key=value file with defaults for these options");

    PriorMcArgs mc;
    CLI::App* mc_cmd = app.add_subcommand(
        "prior-mc", "Estimate the prior mean entropy from truncated stick-breaking draws");
    mc_cmd->add_option("--alpha", mc.alpha, "Discount, 0 <= alpha < 1");
    mc_cmd->add_option("--theta", mc.theta, "Concentration, theta > -alpha");
    mc_cmd->add_option("--replicas", mc.replicas, "Number of draws")->check(CLI::PositiveNumber);
    mc_cmd->add_option("--truncation", mc.truncation, "Sticks per draw")
        ->check(CLI::PositiveNumber);
    mc_cmd->add_option("--seed", mc.seed, "Seed");
    mc_cmd->add_option("--out", mc.out, "Optional per-draw CSV path");
    mc_cmd->add_option("--config", mc.config, "Key=value file with defaults for these options");

    BoundsArgs bounds;
    CLI::App* bounds_cmd = app.add_subcommand(
        "bounds", "Tabulate entropy extremes and weighted steps over sample sizes");
    bounds_cmd->add_option("--alpha", bounds.alpha, "Discount, 0 <= alpha < 1");
    bounds_cmd->add_option("--theta", bounds.theta, "Concentration, theta > -alpha");
    bounds_cmd->add_option("--length", bounds.length, "Single sample size ell");
    bounds_cmd->add_option("--grid", bounds.grid, "Comma-separated sample sizes");
    bounds_cmd->add_option("--out", bounds.out, "Output CSV path (stdout when omitted)");
    bounds_cmd->add_option("--config", bounds.config, "Key=value file with defaults for these options");

    VerifyArgs ver;
    CLI::App* ver_cmd =
        app.add_subcommand("verify", "Run the full identity and bound check battery");
    ver_cmd->add_option("--replicas", ver.replicas, "Trajectories per grid cell")
        ->check(CLI::PositiveNumber);
    ver_cmd->add_option("--length", ver.length, "Steps per trajectory")
        ->check(CLI::PositiveNumber);
    ver_cmd->add_option("--prior-replicas", ver.prior_replicas, "Stick-breaking draws")
        ->check(CLI::PositiveNumber);
    ver_cmd->add_option("--truncation", ver.truncation, "Sticks per draw")
        ->check(CLI::PositiveNumber);
    ver_cmd->add_option("--bruteforce-max-ell", ver.bruteforce_max_ell,
                        "Largest sample size for exhaustive enumeration")
        ->check(CLI::PositiveNumber);
    ver_cmd->add_option("--consistency-replicas", ver.consistency_replicas,
                        "Replicas for the consistency trend")
        ->check(CLI::PositiveNumber);
    ver_cmd->add_option("--seed", ver.seed, "Seed");
    ver_cmd->add_option("--grid", ver.grid,
                        "Parameter grid as alpha,theta pairs separated by ';'");
    ver_cmd->add_option("--config", ver.config, "Key=value file with defaults for these options");

    try {
        app.parse(argc, argv);
        if (sim_cmd->parsed() && !sim.config.empty()) apply_config(*sim_cmd, sim.config);
        if (mc_cmd->parsed() && !mc.config.empty()) apply_config(*mc_cmd, mc.config);
        if (bounds_cmd->parsed() && !bounds.config.empty()) apply_config(*bounds_cmd, bounds.config);
        if (ver_cmd->parsed() && !ver.config.empty()) apply_config(*ver_cmd, ver.config);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (mc_cmd->parsed()) return cmd_prior_mc(mc);
        if (bounds_cmd->parsed()) return cmd_bounds(bounds);
        if (ver_cmd->parsed()) return cmd_verify(ver);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
