// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Shares a single full-scale trajectory sweep across the criteria
// that grade per-step laws so the expensive sampling runs once.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdpent/pdpent.hpp"
#include "support/digamma_reference.hpp"

namespace {

using pdpent::verify::CheckResult;

int g_failed = 0;

void report(int index, const std::string& title, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %02d: %s | %s\n", pass ? "PASS" : "FAIL", index, title.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failed;
}

const CheckResult& find_check(const std::vector<CheckResult>& checks, const std::string& name) {
    for (const CheckResult& c : checks) {
        if (c.name == name) return c;
    }
    throw std::runtime_error("missing check: " + name);
}

bool all_pass(std::initializer_list<const CheckResult*> parts) {
    for (const CheckResult* c : parts) {
        if (!c->pass) return false;
    }
    return true;
}

std::string describe(std::initializer_list<const CheckResult*> parts) {
    std::string d;
    for (const CheckResult* c : parts) {
        if (!d.empty()) d += "; ";
        d += c->name + (c->pass ? " ok: " : " FAIL: ") + c->detail;
    }
    return d;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    using namespace pdpent;
    try {
        const std::uint64_t seed = 20250614;

        // Criteria 1, 2, 3 and 7 grade the same simulated trajectories.
        verify::TrajectorySweepOptions sweep;
        sweep.seed = seed;
        const verify::TrajectorySweepStats stats = verify::run_trajectory_sweep(sweep);
        const std::vector<CheckResult> sweep_checks = verify::trajectory_sweep_checks(stats);
        const CheckResult& gap = find_check(sweep_checks, "gap-increment-positivity");
        const CheckResult& two_way = find_check(sweep_checks, "two-way-agreement");
        const CheckResult& sandwich = find_check(sweep_checks, "entropy-sandwich");
        const CheckResult& additivity = find_check(sweep_checks, "step-additivity");
        const CheckResult& eta = find_check(sweep_checks, "eta-positivity-and-bounds");
        const CheckResult& plugin = find_check(sweep_checks, "plugin-step-laws");
        const CheckResult& decomp = find_check(sweep_checks, "discovery-decomposition");

        char budget[96];
        std::snprintf(budget, sizeof budget, "sweep took %.1fs of the 120s budget",
                      stats.elapsed_seconds);
        report(1,
               "per-step gap increments stay nonnegative and closed forms match recomputation",
               all_pass({&gap, &two_way}) && stats.elapsed_seconds <= 120.0,
               describe({&gap, &two_way}) + "; " + budget);

        report(2, "weighted entropy steps are positive and bounded inside the extremes",
               all_pass({&sandwich, &additivity, &eta}),
               describe({&sandwich, &additivity, &eta}));

        report(3, "weighted posterior entropy decomposes into discovery terms", decomp.pass,
               describe({&decomp}));

        const auto bf_t0 = std::chrono::steady_clock::now();
        const CheckResult bruteforce = verify::run_bruteforce_extremality({});
        const double bf_elapsed = seconds_since(bf_t0);
        std::snprintf(budget, sizeof budget, "enumeration took %.1fs of the 30s budget",
                      bf_elapsed);
        report(4, "exhaustive enumeration confirms the extremal configurations",
               bruteforce.pass && bf_elapsed <= 30.0,
               describe({&bruteforce}) + "; " + budget);

        const CheckResult nlogn = verify::check_nlogn_increment_bounds();
        report(5, "plug-in step laws hold and the increment excess obeys its envelope",
               all_pass({&plugin, &nlogn}), describe({&plugin, &nlogn}));

        const PdpParams dp(0.0, 1.0);
        const CheckResult mc_dp =
            verify::prior_mc_check(dp, verify::run_prior_mc(dp, 10000, 10000, seed), 1e-3);
        const PdpParams py(0.5, 0.5);
        const CheckResult mc_py = verify::prior_mc_check(
            py, verify::run_prior_mc(py, 10000, 10000, seed + 1), std::nullopt);
        report(6, "stick-breaking Monte Carlo hits the prior mean", all_pass({&mc_dp, &mc_py}),
               describe({&mc_dp, &mc_py}));

        const CheckResult plug_ce = verify::check_plugin_counterexample();
        const CheckResult post_ce = verify::check_posterior_counterexample();
        report(7, "monotonicity counterexamples reproduce", all_pass({&plug_ce, &post_ce}),
               describe({&plug_ce, &post_ce}));

        verify::GeneralSpecializationOptions gen;
        gen.seed = seed + 2;
        const CheckResult general = verify::run_general_specialization(gen);
        report(8, "the general family specializes to both entropies", general.pass,
               describe({&general}));

        verify::ConsistencyOptions con;
        con.seed = seed + 3;
        const CheckResult trend = verify::consistency_check(con);
        report(9, "posterior mean and plug-in converge together", trend.pass,
               describe({&trend}));

        double worst_rel = 0.0;
        const double lo = std::log(1e-3);
        const double hi = std::log(1e6);
        for (int i = 0; i < 1000; ++i) {
            const double x = std::exp(lo + (hi - lo) * static_cast<double>(i) / 999.0);
            const double got = digamma(x);
            const double want = pdpent_test::digamma_reference(x);
            worst_rel = std::max(worst_rel, std::abs(got - want) / std::max(1.0, std::abs(want)));
        }
        char dg[128];
        std::snprintf(dg, sizeof dg,
                      "worst error %.3e against a long double series over [1e-3, 1e6] "
                      "(tolerance 1e-12)",
                      worst_rel);
        report(10, "digamma matches a high-precision reference", worst_rel <= 1e-12, dg);

        if (g_failed == 0) {
            std::printf("acceptance: all 10 criteria passed\n");
            return 0;
        }
        std::printf("acceptance: %d of 10 criteria failed\n", g_failed);
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: aborted: %s\n", e.what());
        return 2;
    }
}
