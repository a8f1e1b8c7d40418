#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pdpent/compensated.hpp"
#include "pdpent/entropy.hpp"
#include "pdpent/pdp_sampler.hpp"
#include "pdpent/special_fn.hpp"

namespace pdpent {

namespace detail {

/// Checks that next is prev plus exactly one observation and returns the
/// index of the species that absorbed it. Throws std::invalid_argument on
/// any inconsistency.
inline std::size_t verify_successor(const SampleState& prev, const SampleState& next) {
    auto fail = [](const char* what) {
        throw std::invalid_argument(std::string("successor mismatch: ") + what);
    };
    if (next.ell != prev.ell + 1) fail("sample sizes are not consecutive");
    if (!next.last_species) fail("successor does not record last_species");
    const std::size_t j = *next.last_species;
    if (next.counts.size() == prev.counts.size() + 1) {
        if (j != prev.counts.size()) fail("a new species must take the next index");
        if (next.counts.back() != 1) fail("a new species must have count one");
        for (std::size_t i = 0; i < prev.counts.size(); ++i) {
            if (next.counts[i] != prev.counts[i]) fail("old counts changed on discovery");
        }
    } else if (next.counts.size() == prev.counts.size()) {
        if (j >= next.counts.size()) fail("last_species out of range");
        for (std::size_t i = 0; i < next.counts.size(); ++i) {
            const std::uint64_t expect = prev.counts[i] + (i == j ? 1 : 0);
            if (next.counts[i] != expect) fail("exactly one count must grow by one");
        }
    } else {
        fail("species counts must grow by at most one");
    }
    if (next.last_count != next.counts[j]) fail("last_count disagrees with counts");
    return j;
}

}  // namespace detail

/// m log m - (m-1) log (m-1) with 0 log 0 = 0; the per-step increment of
/// sum_i n_i log n_i when a species moves from m-1 to m.
inline double nlogn_increment(std::uint64_t m) {
    if (m <= 1) return 0.0;
    const double x = static_cast<double>(m);
    return x * std::log(x) - (x - 1.0) * std::log(x - 1.0);
}

/// nlogn_increment(ell + 1) - (log ell + 1) evaluated without cancellation:
/// (ell + 1) log1p(1/ell) - 1. The direct difference loses all accuracy
/// near the 1/(2 ell) bound for large ell.
inline double nlogn_increment_excess(std::uint64_t ell) {
    if (ell < 1) {
        throw std::invalid_argument("nlogn_increment_excess: require ell >= 1");
    }
    const double l = static_cast<double>(ell);
    return (l + 1.0) * std::log1p(1.0 / l) - 1.0;
}

/// Weighted gap to the entropy maximum:
/// (theta + ell) * (max entropy at ell - posterior mean entropy).
/// Zero for the empty sample.
inline double functional_a(const SampleState& state, const PdpParams& params) {
    if (state.ell == 0) {
        validate_state(state);
        return 0.0;
    }
    const double w = params.theta + static_cast<double>(state.ell);
    return w * (global_max_entropy(state.ell, params) - posterior_mean_entropy(state, params));
}

/// Weighted gap to the plug-in entropy maximum:
/// ell * (log ell - mle entropy) = sum_i n_i log n_i. Zero for the empty
/// sample.
inline double frequentist_functional(const SampleState& state) {
    if (state.ell == 0) {
        validate_state(state);
        return 0.0;
    }
    const double l = static_cast<double>(state.ell);
    return l * (std::log(l) - mle_entropy(state));
}

/// Per-step quantities of one realized transition prev -> next.
struct StepVariation {
    double delta = 0.0;    // increment of functional_a
    double eta = 0.0;      // weighted one-step entropy change
    double a_value = 0.0;  // functional_a at next
    double a_f_value = 0.0;
    double delta_f = 0.0;  // increment of the frequentist functional
    bool is_discovery = false;
};

/// Increment of functional_a across one step, by closed form:
/// 0 on a discovery, else psi(n* - alpha) - psi(1 - alpha) where n* is the
/// updated species count after the step. Always >= 0.
inline double delta_step(const SampleState& prev, const SampleState& next,
                         const PdpParams& params) {
    detail::verify_successor(prev, next);
    if (next.last_count == 1) return 0.0;
    return digamma(static_cast<double>(next.last_count) - params.alpha) -
           digamma(1.0 - params.alpha);
}

/// Weighted entropy change across one step, by closed form:
/// (theta + ell + 1) H(next) - (theta + ell) H(prev)
///   = psi(theta + ell + 1) - psi(n* - alpha). Always > 0.
inline double eta_step(const SampleState& prev, const SampleState& next,
                       const PdpParams& params) {
    detail::verify_successor(prev, next);
    return digamma(params.theta + static_cast<double>(prev.ell) + 1.0) -
           digamma(static_cast<double>(next.last_count) - params.alpha);
}

/// Envelope for eta_step from the logarithmic digamma bounds. Returns
/// {lower, upper}; eta_step always falls inside.
inline std::pair<double, double> eta_step_bounds(std::uint64_t prev_ell,
                                                 std::uint64_t next_last_count,
                                                 const PdpParams& params) {
    if (next_last_count < 1) {
        throw std::invalid_argument("eta_step_bounds: require next_last_count >= 1");
    }
    const double a = params.theta + static_cast<double>(prev_ell) + 1.0;
    const double b = static_cast<double>(next_last_count) - params.alpha;
    const double la = std::log(a);
    const double lb = std::log(b);
    return {la - 1.0 / a - lb + 0.5 / b, la - 0.5 / a - lb + 1.0 / b};
}

/// Increment of the frequentist functional across one step:
/// n* log n* - (n* - 1) log (n* - 1), zero exactly on a discovery.
inline double frequentist_delta(const SampleState& prev, const SampleState& next) {
    detail::verify_successor(prev, next);
    return nlogn_increment(next.last_count);
}

/// (ell + 1) H_mle(next) - ell H_mle(prev) by closed form:
/// nlogn_increment(ell + 1) - nlogn_increment(n*). Nonnegative, and zero
/// exactly when next has a single species.
inline double frequentist_weighted_entropy_step(const SampleState& prev,
                                                const SampleState& next) {
    detail::verify_successor(prev, next);
    return nlogn_increment(next.ell) - nlogn_increment(next.last_count);
}

/// Weighted steps of the two entropy maxima from size ell to ell + 1.
struct WeightedMaxStep {
    double bayes = 0.0;  // psi(theta + ell + 1) - psi(1 - alpha)
    double freq = 0.0;   // (ell+1) log (ell+1) - ell log ell
};

/// Requires ell >= 1. bayes equals delta_step + eta_step for any realized
/// transition at this size; freq plays the same role for the plug-in
/// entropy.
inline WeightedMaxStep max_entropy_weighted_step(std::uint64_t ell, const PdpParams& params) {
    if (ell < 1) {
        throw std::invalid_argument("max_entropy_weighted_step: require ell >= 1");
    }
    return {digamma(params.theta + static_cast<double>(ell) + 1.0) -
                digamma(1.0 - params.alpha),
            nlogn_increment(ell + 1)};
}

/// All per-step quantities for one transition.
inline StepVariation step_variation(const SampleState& prev, const SampleState& next,
                                    const PdpParams& params) {
    detail::verify_successor(prev, next);
    StepVariation v;
    v.is_discovery = next.last_count == 1;
    v.delta = v.is_discovery
                  ? 0.0
                  : digamma(static_cast<double>(next.last_count) - params.alpha) -
                        digamma(1.0 - params.alpha);
    v.eta = digamma(params.theta + static_cast<double>(prev.ell) + 1.0) -
            digamma(static_cast<double>(next.last_count) - params.alpha);
    v.a_value = functional_a(next, params);
    v.a_f_value = frequentist_functional(next);
    v.delta_f = nlogn_increment(next.last_count);
    return v;
}

/// Split of the weighted posterior mean entropy into a deterministic part
/// and one term per observation:
/// (theta + ell) H = c_term - sum_i psi(n*(i) - alpha), where n*(i) is the
/// count reached by observation i. reinforcement_rewards[i] holds
/// psi(n*(i) - alpha) - psi(1 - alpha), the increment of functional_a; the
/// rewards sum to functional_a itself.
struct DiscoveryDecomposition {
    double c_term = 0.0;
    std::vector<double> discovery_values;       // -psi(n*(i) - alpha)
    std::vector<double> reinforcement_rewards;  // psi(n*(i) - alpha) - psi(1 - alpha)
};

/// Requires a trajectory of consecutive states starting at size one, each
/// recording its updated species.
inline DiscoveryDecomposition discovery_decomposition(const std::vector<SampleState>& trajectory,
                                                      const PdpParams& params) {
    if (trajectory.empty()) {
        throw std::invalid_argument("discovery_decomposition: empty trajectory");
    }
    if (trajectory.front().ell != 1) {
        throw std::invalid_argument("discovery_decomposition: trajectory must start at ell 1");
    }
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        detail::verify_successor(trajectory[i - 1], trajectory[i]);
    }
    const double psi_one = digamma(1.0 - params.alpha);
    DiscoveryDecomposition out;
    out.discovery_values.reserve(trajectory.size());
    out.reinforcement_rewards.reserve(trajectory.size());
    CompensatedSum c;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const SampleState& s = trajectory[i];
        if (!s.last_species || s.last_count < 1) {
            throw std::invalid_argument("discovery_decomposition: state lacks step record");
        }
        c.add(digamma(params.theta + static_cast<double>(i) + 1.0));
        const double psi_star = digamma(static_cast<double>(s.last_count) - params.alpha);
        out.discovery_values.push_back(-psi_star);
        out.reinforcement_rewards.push_back(s.last_count == 1 ? 0.0 : psi_star - psi_one);
    }
    out.c_term = c.value() + params.theta * digamma(params.theta + 1.0) - params.theta * psi_one;
    return out;
}

}  // namespace pdpent
