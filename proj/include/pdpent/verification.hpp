#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdpent/compensated.hpp"
#include "pdpent/entropy.hpp"
#include "pdpent/functionals.hpp"
#include "pdpent/general_entropy.hpp"
#include "pdpent/pdp_sampler.hpp"
#include "pdpent/records.hpp"
#include "pdpent/special_fn.hpp"

namespace pdpent::verify {

/// Outcome of one named check; detail carries the worst observed values.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Discount/concentration cells covering the sparse and dense regimes,
/// including negative concentrations.
inline std::vector<PdpParams> default_grid() {
    std::vector<PdpParams> grid;
    for (const double alpha : {0.0, 0.25, 0.5, 0.9}) {
        for (const double theta : {-alpha + 0.1, 0.5, 1.0, 10.0}) {
            grid.emplace_back(alpha, theta);
        }
    }
    return grid;
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

inline double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trajectory sweep: every per-step identity, checked in one pass.

struct TrajectorySweepOptions {
    std::vector<PdpParams> grid = default_grid();
    std::uint64_t replicas_per_cell = 625;
    std::uint64_t length = 1000;
    std::uint64_t seed = 20250614;
};

struct TrajectorySweepStats {
    std::uint64_t trajectories = 0;
    std::uint64_t steps = 0;
    std::uint64_t discoveries = 0;

    double min_delta = std::numeric_limits<double>::infinity();
    double max_abs_delta_discovery = 0.0;
    double min_delta_gap_nondiscovery = std::numeric_limits<double>::infinity();
    double max_delta_two_way_err = 0.0;

    double min_eta = std::numeric_limits<double>::infinity();
    double max_eta_two_way_err = 0.0;
    double max_eta_bound_violation = 0.0;

    double max_additivity_err = 0.0;
    double max_d_two_way_err = 0.0;

    double max_sandwich_low_violation = 0.0;   // h_min - h_pdp
    double max_sandwich_high_violation = 0.0;  // h_pdp - h_max

    double min_delta_f = std::numeric_limits<double>::infinity();
    double max_abs_delta_f_discovery = 0.0;
    double min_delta_f_nondiscovery = std::numeric_limits<double>::infinity();
    double max_delta_f_two_way_err = 0.0;

    double min_wf = std::numeric_limits<double>::infinity();
    double max_abs_wf_single_class = 0.0;
    double min_wf_multi_class = std::numeric_limits<double>::infinity();
    double max_wf_two_way_err = 0.0;

    double max_decomposition_entropy_err = 0.0;
    double max_decomposition_reward_err = 0.0;

    double elapsed_seconds = 0.0;
};

namespace detail {

inline void sweep_cell(const PdpParams& params, const TrajectorySweepOptions& opt,
                       std::uint64_t cell_index, TrajectorySweepStats& st) {
    using pdpent::detail::TrajectoryTables;
    const TrajectoryTables tab(params, opt.length);
    const double psi_one = tab.psi_shifted(1);
    const double prior = tab.psi_total(0) - psi_one;
    const double decomp_base = params.theta * (tab.psi_total(0) - psi_one);
    const double nondiscovery_floor = tab.psi_shifted(2) - psi_one;

    for (std::uint64_t rep = 0; rep < opt.replicas_per_cell; ++rep) {
        RandomEngine rng({opt.seed, cell_index * 1000000ull + rep});
        const std::vector<SampleState> traj = simulate_trajectory(params, opt.length, rng);
        const std::vector<StepRecord> recs = evaluate_trajectory(traj, params, rep);
        st.trajectories += 1;

        double a_prev = 0.0;
        double af_prev = 0.0;
        double wh_prev = params.theta * prior;
        double whmax_prev = params.theta * prior;
        double wmle_prev = 0.0;
        CompensatedSum c_run;
        CompensatedSum psi_run;
        CompensatedSum reward_run;

        for (const StepRecord& r : recs) {
            const double m = static_cast<double>(r.ell);
            const double wm = params.theta + m;
            st.steps += 1;
            if (r.is_discovery) st.discoveries += 1;

            st.min_delta = std::min(st.min_delta, r.delta);
            if (r.is_discovery) {
                st.max_abs_delta_discovery =
                    std::max(st.max_abs_delta_discovery, std::abs(r.delta));
            } else {
                st.min_delta_gap_nondiscovery =
                    std::min(st.min_delta_gap_nondiscovery, r.delta - nondiscovery_floor);
            }
            st.max_delta_two_way_err =
                std::max(st.max_delta_two_way_err, std::abs(r.delta - (r.a_value - a_prev)));

            const double eta_two_way = wm * r.h_pdp - wh_prev;
            st.max_eta_two_way_err =
                std::max(st.max_eta_two_way_err, std::abs(r.eta - eta_two_way));
            st.min_eta = std::min(st.min_eta, r.eta);
            const auto [eta_lo, eta_hi] = eta_step_bounds(r.ell - 1, r.last_count, params);
            st.max_eta_bound_violation = std::max(
                {st.max_eta_bound_violation, eta_lo - r.eta, r.eta - eta_hi});

            const double d_closed = tab.psi_total(r.ell - 1) - psi_one;
            st.max_additivity_err =
                std::max(st.max_additivity_err, std::abs(r.delta + r.eta - d_closed));
            const double d_two_way = wm * r.h_max - whmax_prev;
            st.max_d_two_way_err =
                std::max(st.max_d_two_way_err, std::abs(d_closed - d_two_way));

            st.max_sandwich_low_violation =
                std::max(st.max_sandwich_low_violation, r.h_min - r.h_pdp);
            st.max_sandwich_high_violation =
                std::max(st.max_sandwich_high_violation, r.h_pdp - r.h_max);

            st.min_delta_f = std::min(st.min_delta_f, r.delta_f);
            if (r.is_discovery) {
                st.max_abs_delta_f_discovery =
                    std::max(st.max_abs_delta_f_discovery, std::abs(r.delta_f));
            } else {
                st.min_delta_f_nondiscovery = std::min(st.min_delta_f_nondiscovery, r.delta_f);
            }
            st.max_delta_f_two_way_err = std::max(st.max_delta_f_two_way_err,
                                                  std::abs(r.delta_f - (r.a_f - af_prev)));

            const double wf_closed =
                (tab.nlogn(r.ell) - tab.nlogn(r.ell - 1)) - r.delta_f;
            const double wf_two_way = m * r.h_mle - wmle_prev;
            st.max_wf_two_way_err =
                std::max(st.max_wf_two_way_err, std::abs(wf_closed - wf_two_way));
            st.min_wf = std::min(st.min_wf, wf_closed);
            if (r.k == 1) {
                st.max_abs_wf_single_class =
                    std::max(st.max_abs_wf_single_class, std::abs(wf_closed));
            } else {
                st.min_wf_multi_class = std::min(st.min_wf_multi_class, wf_closed);
            }

            c_run.add(tab.psi_total(r.ell - 1));
            psi_run.add(tab.psi_shifted(r.last_count));
            reward_run.add(r.delta);
            st.max_decomposition_entropy_err = std::max(
                st.max_decomposition_entropy_err,
                std::abs(wm * r.h_pdp - (c_run.value() + decomp_base - psi_run.value())));
            st.max_decomposition_reward_err = std::max(
                st.max_decomposition_reward_err, std::abs(r.a_value - reward_run.value()));

            a_prev = r.a_value;
            af_prev = r.a_f;
            wh_prev = wm * r.h_pdp;
            whmax_prev = wm * r.h_max;
            wmle_prev = m * r.h_mle;
        }
    }
}

}  // namespace detail

inline TrajectorySweepStats run_trajectory_sweep(const TrajectorySweepOptions& opt) {
    TrajectorySweepStats st;
    const double t0 = detail::now_seconds();
    for (std::size_t cell = 0; cell < opt.grid.size(); ++cell) {
        detail::sweep_cell(opt.grid[cell], opt, cell, st);
    }
    st.elapsed_seconds = detail::now_seconds() - t0;
    return st;
}

/// Applies the pinned tolerances to sweep statistics.
inline std::vector<CheckResult> trajectory_sweep_checks(const TrajectorySweepStats& st) {
    using detail::fmt;
    std::vector<CheckResult> out;
    const std::string scale = " (" + std::to_string(st.trajectories) + " trajectories, " +
                              std::to_string(st.steps) + " steps)";

    out.push_back({"gap-increment-positivity",
                   st.min_delta >= -1e-12 && st.max_abs_delta_discovery <= 1e-12 &&
                       st.min_delta_gap_nondiscovery >= -1e-10,
                   "min delta=" + fmt(st.min_delta) +
                       ", discovery |delta|max=" + fmt(st.max_abs_delta_discovery) +
                       ", floor gap=" + fmt(st.min_delta_gap_nondiscovery) + scale});

    out.push_back(
        {"two-way-agreement",
         st.max_delta_two_way_err <= 1e-10 && st.max_eta_two_way_err <= 1e-10 &&
             st.max_delta_f_two_way_err <= 1e-10 && st.max_wf_two_way_err <= 1e-10 &&
             st.max_d_two_way_err <= 1e-10,
         "closed vs recomputed: delta=" + fmt(st.max_delta_two_way_err) +
             ", eta=" + fmt(st.max_eta_two_way_err) +
             ", delta_f=" + fmt(st.max_delta_f_two_way_err) +
             ", weighted-step=" + fmt(st.max_wf_two_way_err) +
             ", max-step=" + fmt(st.max_d_two_way_err) + scale});

    out.push_back({"entropy-sandwich",
                   st.max_sandwich_low_violation <= 1e-10 &&
                       st.max_sandwich_high_violation <= 1e-10,
                   "violations: low=" + fmt(st.max_sandwich_low_violation) +
                       ", high=" + fmt(st.max_sandwich_high_violation) + scale});

    out.push_back({"step-additivity", st.max_additivity_err <= 1e-12,
                   "max |delta + eta - d| = " + fmt(st.max_additivity_err) + scale});

    out.push_back({"eta-positivity-and-bounds",
                   st.min_eta > 0.0 && st.max_eta_bound_violation <= 1e-12,
                   "min eta=" + fmt(st.min_eta) +
                       ", bound violation=" + fmt(st.max_eta_bound_violation) + scale});

    out.push_back(
        {"plugin-step-laws",
         st.min_delta_f >= 0.0 && st.max_abs_delta_f_discovery <= 1e-15 &&
             st.min_delta_f_nondiscovery > 1.0 && st.min_wf >= -1e-12 &&
             st.max_abs_wf_single_class <= 1e-15 && st.min_wf_multi_class > 1e-6,
         "min delta_f=" + fmt(st.min_delta_f) +
             ", nondiscovery min=" + fmt(st.min_delta_f_nondiscovery) +
             ", min weighted step=" + fmt(st.min_wf) +
             ", single-class |step|max=" + fmt(st.max_abs_wf_single_class) +
             ", multi-class min=" + fmt(st.min_wf_multi_class) + scale});

    out.push_back({"discovery-decomposition",
                   st.max_decomposition_entropy_err <= 1e-9 &&
                       st.max_decomposition_reward_err <= 1e-9,
                   "max entropy residual=" + fmt(st.max_decomposition_entropy_err) +
                       ", max reward residual=" + fmt(st.max_decomposition_reward_err) + scale});
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force extremality over all compositions.

/// Calls fn(parts) for every ordered tuple of k positive integers summing
/// to ell.
template <typename Fn>
inline void for_each_composition(std::uint64_t ell, std::uint64_t k, Fn&& fn) {
    if (k < 1 || k > ell) return;
    std::vector<std::uint64_t> parts(k, 1);
    const auto assign = [&](auto&& self, std::size_t pos, std::uint64_t remaining) -> void {
        if (pos + 1 == parts.size()) {
            parts[pos] = remaining;
            fn(std::as_const(parts));
            return;
        }
        const std::uint64_t slack = remaining - (parts.size() - pos - 1);
        for (std::uint64_t v = 1; v <= slack; ++v) {
            parts[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    assign(assign, 0, ell);
}

struct BruteForceOptions {
    std::vector<PdpParams> grid = default_grid();
    std::uint64_t max_ell = 12;
};

/// Enumerates every composition of ell into k parts for ell up to max_ell,
/// and confirms that extremal_config attains the enumerated extremes, and
/// that the global formulas match the extremes over all k.
inline CheckResult run_bruteforce_extremality(const BruteForceOptions& opt) {
    using detail::fmt;
    double worst_value_err = 0.0;
    double worst_global_err = 0.0;
    std::string failure;

    for (const PdpParams& params : opt.grid) {
        for (std::uint64_t ell = 1; ell <= opt.max_ell && failure.empty(); ++ell) {
            double best_over_k = -std::numeric_limits<double>::infinity();
            double worst_over_k = std::numeric_limits<double>::infinity();
            std::uint64_t best_k = 0;
            std::uint64_t worst_k = 0;
            for (std::uint64_t k = 1; k <= ell; ++k) {
                double best = -std::numeric_limits<double>::infinity();
                double worst = std::numeric_limits<double>::infinity();
                std::vector<std::uint64_t> arg_best;
                std::vector<std::uint64_t> arg_worst;
                for_each_composition(ell, k, [&](const std::vector<std::uint64_t>& parts) {
                    const double h = posterior_mean_entropy(
                        std::span<const std::uint64_t>(parts), ell, params);
                    if (h > best) {
                        best = h;
                        arg_best = parts;
                    }
                    if (h < worst) {
                        worst = h;
                        arg_worst = parts;
                    }
                });
                const ExtremalConfig cmax = extremal_config(ell, k, ExtremalKind::kMax);
                const ExtremalConfig cmin = extremal_config(ell, k, ExtremalKind::kMin);
                const double hmax = posterior_mean_entropy(
                    std::span<const std::uint64_t>(cmax.counts), ell, params);
                const double hmin = posterior_mean_entropy(
                    std::span<const std::uint64_t>(cmin.counts), ell, params);
                worst_value_err = std::max(
                    {worst_value_err, std::abs(hmax - best), std::abs(hmin - worst)});
                std::sort(arg_best.begin(), arg_best.end());
                std::sort(arg_worst.begin(), arg_worst.end());
                std::vector<std::uint64_t> emax = cmax.counts;
                std::vector<std::uint64_t> emin = cmin.counts;
                std::sort(emax.begin(), emax.end());
                std::sort(emin.begin(), emin.end());
                if (arg_best != emax || arg_worst != emin) {
                    failure = "configuration mismatch at alpha=" + fmt(params.alpha) +
                              " theta=" + fmt(params.theta) + " ell=" + std::to_string(ell) +
                              " k=" + std::to_string(k);
                    break;
                }
                if (best > best_over_k) {
                    best_over_k = best;
                    best_k = k;
                }
                if (worst < worst_over_k) {
                    worst_over_k = worst;
                    worst_k = k;
                }
            }
            if (!failure.empty()) break;
            worst_global_err = std::max(
                {worst_global_err, std::abs(best_over_k - global_max_entropy(ell, params)),
                 std::abs(worst_over_k - global_min_entropy(ell, params))});
            if (best_k != ell || worst_k != 1) {
                failure = "global extreme attained at unexpected k, alpha=" +
                          fmt(params.alpha) + " theta=" + fmt(params.theta) +
                          " ell=" + std::to_string(ell);
            }
        }
        if (!failure.empty()) break;
    }

    CheckResult res;
    res.name = "bruteforce-extremality";
    res.pass = failure.empty() && worst_value_err <= 1e-9 && worst_global_err <= 1e-10;
    res.detail = failure.empty()
                     ? "max value err=" + fmt(worst_value_err) +
                           ", max global err=" + fmt(worst_global_err) +
                           " (ell <= " + std::to_string(opt.max_ell) + ")"
                     : failure;
    return res;
}

// ---------------------------------------------------------------------------
// Counterexamples to monotonicity of the unweighted entropies.

/// Pattern a, b, a, b: the plug-in entropy returns to its ell = 2 value at
/// ell = 4 after dipping at ell = 3, so it is not monotone in ell.
inline CheckResult check_plugin_counterexample() {
    const std::vector<std::uint64_t> c2{1, 1};
    const std::vector<std::uint64_t> c3{2, 1};
    const std::vector<std::uint64_t> c4{2, 2};
    const double h2 = mle_entropy(std::span<const std::uint64_t>(c2), 2);
    const double h3 = mle_entropy(std::span<const std::uint64_t>(c3), 3);
    const double h4 = mle_entropy(std::span<const std::uint64_t>(c4), 4);
    CheckResult res;
    res.name = "plugin-counterexample";
    res.pass = h2 == h4 && std::abs(h2 - std::log(2.0)) <= 1e-15 && h3 < h2 - 1e-3;
    res.detail = "H2=" + detail::fmt(h2) + " H3=" + detail::fmt(h3) + " H4=" + detail::fmt(h4);
    return res;
}

/// The same pattern drops the posterior mean entropy at ell = 3 below both
/// neighbours for small theta, so the posterior mean is not monotone
/// either.
inline CheckResult check_posterior_counterexample() {
    const PdpParams params(0.25, 0.1);
    const std::vector<std::uint64_t> c2{1, 1};
    const std::vector<std::uint64_t> c3{2, 1};
    const std::vector<std::uint64_t> c4{2, 2};
    const double h2 = posterior_mean_entropy(std::span<const std::uint64_t>(c2), 2, params);
    const double h3 = posterior_mean_entropy(std::span<const std::uint64_t>(c3), 3, params);
    const double h4 = posterior_mean_entropy(std::span<const std::uint64_t>(c4), 4, params);
    CheckResult res;
    res.name = "posterior-counterexample";
    res.pass = h2 > h3 + 1e-6 && h4 > h3 + 1e-6;
    res.detail = "H2=" + detail::fmt(h2) + " H3=" + detail::fmt(h3) + " H4=" + detail::fmt(h4);
    return res;
}

// ---------------------------------------------------------------------------
// Monte Carlo check of the prior mean entropy.

struct PriorMcStats {
    double mean = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double median_remainder = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t truncation = 0;

    /// Truncation bias allowance: the missing tail mass r can contribute at
    /// most about r (|log r| + log T) of entropy.
    double bias_allowance() const {
        if (median_remainder <= 0.0) return 0.0;
        return median_remainder *
               (std::abs(std::log(median_remainder)) + std::log(static_cast<double>(truncation)));
    }

    bool within_three_se() const {
        return std::abs(mean - target) <= 3.0 * std_error + bias_allowance();
    }
};

inline PriorMcStats run_prior_mc(const PdpParams& params, std::uint64_t replicas,
                                 std::uint64_t truncation, std::uint64_t seed) {
    if (replicas < 2) {
        throw std::invalid_argument("run_prior_mc: require replicas >= 2");
    }
    PriorMcStats st;
    st.replicas = replicas;
    st.truncation = truncation;
    st.target = prior_mean_entropy(params);
    std::vector<double> remainders;
    remainders.reserve(replicas);
    double sum = 0.0;
    double sumsq = 0.0;
    RandomEngine rng({seed, 0});
    for (std::uint64_t r = 0; r < replicas; ++r) {
        const PriorWeights w = sample_gem_weights(params, truncation, rng);
        double h = 0.0;
        for (const double p : w.weights) {
            if (p > 0.0) h -= p * std::log(p);
        }
        sum += h;
        sumsq += h * h;
        remainders.push_back(w.remainder);
    }
    const double n = static_cast<double>(replicas);
    st.mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * st.mean * st.mean) / (n - 1.0));
    st.std_error = std::sqrt(var / n);
    auto mid = remainders.begin() + static_cast<std::ptrdiff_t>(replicas / 2);
    std::nth_element(remainders.begin(), mid, remainders.end());
    st.median_remainder = *mid;
    return st;
}

inline CheckResult prior_mc_check(const PdpParams& params, const PriorMcStats& st,
                                  std::optional<double> max_median_remainder) {
    using detail::fmt;
    CheckResult res;
    res.name = "prior-mean-mc alpha=" + fmt(params.alpha) + " theta=" + fmt(params.theta);
    const bool remainder_ok =
        !max_median_remainder || st.median_remainder < *max_median_remainder;
    res.pass = st.within_three_se() && remainder_ok;
    res.detail = "mean=" + fmt(st.mean) + " target=" + fmt(st.target) +
                 " se=" + fmt(st.std_error) + " median remainder=" + fmt(st.median_remainder);
    return res;
}

// ---------------------------------------------------------------------------
// Stable bounds for the n log n increment.

/// Checks (l+1) log1p(1/l) - 1, the excess of the increment over
/// log l + 1, against its 1/(2l) - 1/(2l^2) and 1/l envelope for every
/// l up to max_ell, and ties the stable form to the direct increment on a
/// subsample.
inline CheckResult check_nlogn_increment_bounds(std::uint64_t max_ell = 100000) {
    using detail::fmt;
    double worst_low = std::numeric_limits<double>::infinity();
    double worst_high = std::numeric_limits<double>::infinity();
    double worst_tie = 0.0;
    for (std::uint64_t ell = 1; ell <= max_ell; ++ell) {
        const double l = static_cast<double>(ell);
        const double excess = nlogn_increment_excess(ell);
        const double lo = 0.5 / l - 0.5 / (l * l);
        const double hi = 1.0 / l;
        worst_low = std::min(worst_low, excess - lo);
        worst_high = std::min(worst_high, hi - excess);
        if (ell % 97 == 1 || ell == max_ell) {
            const double direct = nlogn_increment(ell + 1) - (std::log(l) + 1.0);
            worst_tie = std::max(worst_tie, std::abs(direct - excess));
        }
    }
    CheckResult res;
    res.name = "nlogn-increment-bounds";
    res.pass = worst_low >= 0.0 && worst_high >= 0.0 && worst_tie <= 5e-9;
    res.detail = "min slack: low=" + fmt(worst_low) + ", high=" + fmt(worst_high) +
                 ", stable-vs-direct=" + fmt(worst_tie);
    return res;
}

// ---------------------------------------------------------------------------
// Divergence of the weighted minimum entropy.

/// (theta + ell) times the minimum entropy must increase strictly in ell
/// and grow without bound; checked on a grid reaching ell = 10^6.
inline CheckResult check_weighted_min_divergence(const std::vector<PdpParams>& grid) {
    using detail::fmt;
    CheckResult res;
    res.name = "weighted-min-divergence";
    double min_growth_ratio = std::numeric_limits<double>::infinity();
    for (const PdpParams& params : grid) {
        std::vector<std::uint64_t> ells;
        for (std::uint64_t l = 1; l <= 100; ++l) ells.push_back(l);
        for (std::uint64_t l = 115; l <= 1000000; l = static_cast<std::uint64_t>(l * 1.15) + 1) {
            ells.push_back(l);
        }
        if (ells.back() < 1000000) ells.push_back(1000000);
        double prev = -std::numeric_limits<double>::infinity();
        for (const std::uint64_t ell : ells) {
            const double v = (params.theta + static_cast<double>(ell)) *
                             global_min_entropy(ell, params);
            if (!(v > prev)) {
                res.pass = false;
                res.detail = "not increasing at ell=" + std::to_string(ell) +
                             " alpha=" + fmt(params.alpha) + " theta=" + fmt(params.theta);
                return res;
            }
            prev = v;
        }
        const double first = (params.theta + 1.0) * global_min_entropy(1, params);
        const double growth = (prev - first) / (params.theta + params.alpha);
        min_growth_ratio = std::min(min_growth_ratio, growth);
    }
    res.pass = min_growth_ratio >= 8.0;
    res.detail = "min growth over (theta+alpha) = " + fmt(min_growth_ratio) + " at ell=1e6";
    return res;
}

// ---------------------------------------------------------------------------
// Consistency: the posterior mean approaches the plug-in estimate.

struct ConsistencyOptions {
    PdpParams params{0.5, 1.0};
    std::uint64_t replicas = 100;
    std::vector<std::uint64_t> checkpoints{100, 1000, 10000};
    std::uint64_t seed = 77001;
};

/// Median over replicas of |posterior mean - plug-in| at each checkpoint.
inline std::vector<double> run_consistency_trend(const ConsistencyOptions& opt) {
    if (opt.checkpoints.empty()) {
        throw std::invalid_argument("run_consistency_trend: no checkpoints");
    }
    std::vector<std::vector<double>> gaps(opt.checkpoints.size());
    const std::uint64_t horizon =
        *std::max_element(opt.checkpoints.begin(), opt.checkpoints.end());
    for (std::uint64_t rep = 0; rep < opt.replicas; ++rep) {
        RandomEngine rng({opt.seed, rep});
        SampleState state;
        for (std::uint64_t i = 1; i <= horizon; ++i) {
            pdpent::detail::advance_state(state, opt.params, rng);
            for (std::size_t c = 0; c < opt.checkpoints.size(); ++c) {
                if (opt.checkpoints[c] == i) {
                    gaps[c].push_back(std::abs(posterior_mean_entropy(state, opt.params) -
                                               mle_entropy(state)));
                }
            }
        }
    }
    std::vector<double> medians;
    for (std::vector<double>& g : gaps) {
        auto mid = g.begin() + static_cast<std::ptrdiff_t>(g.size() / 2);
        std::nth_element(g.begin(), mid, g.end());
        medians.push_back(*mid);
    }
    return medians;
}

inline CheckResult consistency_check(const ConsistencyOptions& opt) {
    const std::vector<double> medians = run_consistency_trend(opt);
    CheckResult res;
    res.name = "posterior-consistency-trend";
    res.pass = true;
    std::string d = "medians:";
    for (std::size_t i = 0; i < medians.size(); ++i) {
        d += " " + detail::fmt(medians[i]);
        if (i > 0 && !(medians[i] < medians[i - 1])) res.pass = false;
    }
    res.detail = d;
    return res;
}

// ---------------------------------------------------------------------------
// The general family specializes to the two concrete entropies.

struct GeneralSpecializationOptions {
    std::vector<PdpParams> grid = default_grid();
    std::uint64_t replicas_per_cell = 5;
    std::uint64_t length = 125;
    std::uint64_t seed = 424242;
};

inline CheckResult run_general_specialization(const GeneralSpecializationOptions& opt) {
    using detail::fmt;
    const GeneralEntropySpec freq = frequentist_spec();
    double worst_freq_h = 0.0;
    double worst_pdp_h = 0.0;
    double worst_freq_delta = 0.0;
    double worst_pdp_delta = 0.0;
    double worst_freq_step = 0.0;
    double worst_pdp_step = 0.0;
    double worst_max = 0.0;
    std::uint64_t states = 0;
    std::string failure;

    for (std::size_t cell = 0; cell < opt.grid.size(); ++cell) {
        const PdpParams& params = opt.grid[cell];
        const GeneralEntropySpec pdp = pdp_spec(params);
        const AdmissibilityReport fr = check_admissibility(freq);
        const AdmissibilityReport pr = check_admissibility(pdp);
        if (!fr.admissible() || !fr.cross_increments || !pr.admissible() ||
            !pr.cross_increments) {
            failure = "built-in family member rejected: " + fr.diagnostics + pr.diagnostics;
            break;
        }
        for (std::uint64_t rep = 0; rep < opt.replicas_per_cell; ++rep) {
            RandomEngine rng({opt.seed, cell * 1000ull + rep});
            const std::vector<SampleState> traj =
                simulate_trajectory(params, opt.length, rng);
            SampleState prev;
            for (const SampleState& s : traj) {
                states += 1;
                worst_freq_h =
                    std::max(worst_freq_h, std::abs(general_entropy(freq, s) - mle_entropy(s)));
                worst_pdp_h = std::max(worst_pdp_h, std::abs(general_entropy(pdp, s) -
                                                             posterior_mean_entropy(s, params)));
                worst_freq_delta =
                    std::max(worst_freq_delta,
                             std::abs(general_delta(freq, prev, s) - frequentist_delta(prev, s)));
                worst_pdp_delta =
                    std::max(worst_pdp_delta,
                             std::abs(general_delta(pdp, prev, s) - delta_step(prev, s, params)));
                worst_freq_step =
                    std::max(worst_freq_step,
                             std::abs(general_weighted_entropy_step(freq, prev, s) -
                                      frequentist_weighted_entropy_step(prev, s)));
                worst_pdp_step = std::max(worst_pdp_step,
                                          std::abs(general_weighted_entropy_step(pdp, prev, s) -
                                                   eta_step(prev, s, params)));
                worst_max = std::max(
                    {worst_max,
                     std::abs(general_max_entropy(freq, s.ell) -
                              std::log(static_cast<double>(s.ell))),
                     std::abs(general_max_entropy(pdp, s.ell) -
                              global_max_entropy(s.ell, params))});
                prev = s;
            }
        }
        if (!failure.empty()) break;
    }

    CheckResult res;
    res.name = "general-entropy-specialization";
    res.pass = failure.empty() && worst_freq_h <= 1e-12 && worst_pdp_h <= 1e-10 &&
               worst_freq_delta <= 1e-12 && worst_pdp_delta <= 1e-10 &&
               worst_freq_step <= 1e-10 && worst_pdp_step <= 1e-10 && worst_max <= 1e-10;
    res.detail = !failure.empty()
                     ? failure
                     : "errs: H_f=" + fmt(worst_freq_h) + " H_p=" + fmt(worst_pdp_h) +
                           " d_f=" + fmt(worst_freq_delta) + " d_p=" + fmt(worst_pdp_delta) +
                           " s_f=" + fmt(worst_freq_step) + " s_p=" + fmt(worst_pdp_step) +
                           " max=" + fmt(worst_max) + " (" + std::to_string(states) + " states)";
    return res;
}

// ---------------------------------------------------------------------------
// Digamma internal-consistency checks (oracle-free).

inline CheckResult check_digamma_identities() {
    using detail::fmt;
    double worst_recurrence = 0.0;
    double worst_bound = std::numeric_limits<double>::infinity();
    double worst_weighted = 0.0;
    bool monotone = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const double t = static_cast<double>(i) / 999.0;
        const double x = std::pow(10.0, -3.0 + 9.0 * t);
        const double lhs = digamma(x + 1.0);
        const double rhs = digamma(x) + 1.0 / x;
        worst_recurrence =
            std::max(worst_recurrence, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        if (x > 0.6) {
            const auto [lo, hi] = digamma_log_bounds(x);
            const double p = digamma(x);
            worst_bound = std::min({worst_bound, p - lo, hi - p});
        }
        const double v = digamma(x);
        if (!(v > prev)) monotone = false;
        prev = v;
        // The raw product form x psi(x+1) - (x-1) psi(x) cancels terms of
        // size x log x, so grade the residual relative to that scale.
        const double raw = digamma_weighted_step_raw(x);
        const double scale = std::max(1.0, std::abs(x * lhs));
        worst_weighted = std::max(worst_weighted, std::abs(raw - (digamma(x) + 1.0)) / scale);
    }
    CheckResult res;
    res.name = "digamma-identities";
    res.pass = worst_recurrence <= 1e-12 && worst_bound >= 0.0 && monotone &&
               worst_weighted <= 1e-12;
    res.detail = "recurrence=" + fmt(worst_recurrence) + ", bound slack=" + fmt(worst_bound) +
                 ", weighted-step residual=" + fmt(worst_weighted) +
                 (monotone ? "" : ", NOT monotone");
    return res;
}

// ---------------------------------------------------------------------------
// Full battery.

struct Options {
    std::vector<PdpParams> grid = default_grid();
    std::uint64_t replicas_per_cell = 625;
    std::uint64_t length = 1000;
    std::uint64_t prior_replicas = 10000;
    std::uint64_t truncation = 10000;
    std::uint64_t bruteforce_max_ell = 12;
    std::uint64_t consistency_replicas = 100;
    std::uint64_t seed = 20250614;
};

inline std::vector<CheckResult> run_all(const Options& opt, std::ostream* progress = nullptr) {
    std::vector<CheckResult> results;
    const auto emit = [&](CheckResult r) {
        if (progress) {
            *progress << (r.pass ? "[ ok ] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
            progress->flush();
        }
        results.push_back(std::move(r));
    };

    emit(check_digamma_identities());

    TrajectorySweepOptions sweep;
    sweep.grid = opt.grid;
    sweep.replicas_per_cell = opt.replicas_per_cell;
    sweep.length = opt.length;
    sweep.seed = opt.seed;
    for (CheckResult& r : trajectory_sweep_checks(run_trajectory_sweep(sweep))) {
        emit(std::move(r));
    }

    emit(check_nlogn_increment_bounds());

    BruteForceOptions bf;
    bf.grid = opt.grid;
    bf.max_ell = opt.bruteforce_max_ell;
    emit(run_bruteforce_extremality(bf));

    emit(check_plugin_counterexample());
    emit(check_posterior_counterexample());

    {
        const PdpParams dp(0.0, 1.0);
        emit(prior_mc_check(dp, run_prior_mc(dp, opt.prior_replicas, opt.truncation, opt.seed),
                            1e-3));
        const PdpParams py(0.5, 0.5);
        emit(prior_mc_check(
            py, run_prior_mc(py, opt.prior_replicas, opt.truncation, opt.seed + 1),
            std::nullopt));
    }

    GeneralSpecializationOptions gen;
    gen.grid = opt.grid;
    gen.seed = opt.seed + 2;
    emit(run_general_specialization(gen));

    ConsistencyOptions con;
    con.replicas = opt.consistency_replicas;
    con.seed = opt.seed + 3;
    emit(consistency_check(con));

    emit(check_weighted_min_divergence(opt.grid));

    return results;
}

}  // namespace pdpent::verify
