#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdpent/random.hpp"

namespace pdpent {

/// Discount/concentration pair for the two-parameter family.
/// Valid iff 0 <= alpha < 1 and theta > -alpha.
struct PdpParams {
    double alpha;
    double theta;

    PdpParams(double alpha_, double theta_) : alpha(alpha_), theta(theta_) {
        if (!std::isfinite(alpha) || !std::isfinite(theta)) {
            throw std::invalid_argument("PdpParams: alpha and theta must be finite");
        }
        if (!(alpha >= 0.0 && alpha < 1.0)) {
            throw std::invalid_argument("PdpParams: require 0 <= alpha < 1");
        }
        if (!(theta > -alpha)) {
            throw std::invalid_argument("PdpParams: require theta > -alpha");
        }
    }
};

/// Species frequencies of a sample, in discovery order. counts[j] >= 1 for
/// every species j and sum(counts) == ell; both hold for every state the
/// sampler produces.
struct SampleState {
    std::uint64_t ell = 0;
    std::vector<std::uint64_t> counts;
    /// Species updated by the most recent step, unset for a constructed state.
    std::optional<std::size_t> last_species;
    /// Frequency of that species right after the step; 1 marks a discovery.
    std::uint64_t last_count = 0;

    std::size_t species_count() const { return counts.size(); }
    bool last_is_discovery() const { return last_count == 1; }
};

/// Throws std::invalid_argument unless the state is internally consistent.
inline void validate_state(const SampleState& state) {
    std::uint64_t sum = 0;
    for (const std::uint64_t n : state.counts) {
        if (n == 0) {
            throw std::invalid_argument("SampleState: species counts must be >= 1");
        }
        sum += n;
    }
    if (sum != state.ell) {
        throw std::invalid_argument("SampleState: counts must sum to ell");
    }
    if (state.last_species) {
        if (*state.last_species >= state.counts.size()) {
            throw std::invalid_argument("SampleState: last_species out of range");
        }
        if (state.counts[*state.last_species] != state.last_count) {
            throw std::invalid_argument("SampleState: last_count disagrees with counts");
        }
    }
}

/// One-step predictive distribution given the current frequencies.
struct PredictiveProbabilities {
    double new_species = 1.0;
    std::vector<double> existing;  // existing[j] joins species j
};

/// P(new) = (theta + alpha k) / (theta + ell), P(join j) = (n_j - alpha) / (theta + ell).
/// The empty sample yields a new species with probability one.
inline PredictiveProbabilities predictive_probabilities(const SampleState& state,
                                                        const PdpParams& params) {
    validate_state(state);
    PredictiveProbabilities out;
    if (state.ell == 0) return out;
    const double denom = params.theta + static_cast<double>(state.ell);
    const double k = static_cast<double>(state.counts.size());
    out.new_species = (params.theta + params.alpha * k) / denom;
    out.existing.reserve(state.counts.size());
    for (const std::uint64_t n : state.counts) {
        out.existing.push_back((static_cast<double>(n) - params.alpha) / denom);
    }
    return out;
}

namespace detail {

/// Advances the state by one observation. Consumes exactly one uniform draw.
inline void advance_state(SampleState& state, const PdpParams& params, RandomEngine& rng) {
    const double u = rng.uniform01();
    std::size_t j;
    if (state.ell == 0) {
        state.counts.push_back(0);
        j = 0;
    } else {
        const double k = static_cast<double>(state.counts.size());
        // Scan the unnormalized masses against u * (theta + ell).
        const double target = u * (params.theta + static_cast<double>(state.ell));
        double acc = params.theta + params.alpha * k;
        if (target < acc) {
            state.counts.push_back(0);
            j = state.counts.size() - 1;
        } else {
            j = state.counts.size() - 1;  // rounding fallback: last species
            for (std::size_t i = 0; i < state.counts.size(); ++i) {
                acc += static_cast<double>(state.counts[i]) - params.alpha;
                if (target < acc) {
                    j = i;
                    break;
                }
            }
        }
    }
    state.counts[j] += 1;
    state.ell += 1;
    state.last_species = j;
    state.last_count = state.counts[j];
}

}  // namespace detail

/// Returns the successor state after one predictive draw.
inline SampleState step(const SampleState& state, const PdpParams& params, RandomEngine& rng) {
    validate_state(state);
    SampleState next = state;
    detail::advance_state(next, params, rng);
    return next;
}

/// Simulates from the empty sample; element i holds the state at size i + 1.
inline std::vector<SampleState> simulate_trajectory(const PdpParams& params,
                                                    std::uint64_t length, RandomEngine& rng) {
    if (length < 1) {
        throw std::invalid_argument("simulate_trajectory: length must be >= 1");
    }
    std::vector<SampleState> out;
    out.reserve(length);
    SampleState cur;
    for (std::uint64_t i = 0; i < length; ++i) {
        detail::advance_state(cur, params, rng);
        out.push_back(cur);
    }
    return out;
}

/// Stick-breaking weights truncated at a fixed number of sticks, plus the
/// mass left unassigned. weights[j] in [0, 1); weights and remainder sum
/// to one up to rounding.
struct PriorWeights {
    std::vector<double> weights;
    double remainder = 1.0;
    std::uint64_t truncation = 0;
};

/// Draws beta_k ~ Beta(1 - alpha, theta + alpha k) for k = 1..truncation and
/// sets weights[k-1] = beta_k * prod_{j<k} (1 - beta_j). Once the leftover
/// stick underflows to zero every further weight is exactly zero, so the
/// loop stops early; the result is unchanged.
inline PriorWeights sample_gem_weights(const PdpParams& params, std::uint64_t truncation,
                                       RandomEngine& rng) {
    if (truncation < 1) {
        throw std::invalid_argument("sample_gem_weights: truncation must be >= 1");
    }
    PriorWeights out;
    out.truncation = truncation;
    out.weights.assign(truncation, 0.0);
    double stick = 1.0;
    for (std::uint64_t k = 1; k <= truncation; ++k) {
        if (stick == 0.0) break;
        const double b =
            rng.beta(1.0 - params.alpha, params.theta + params.alpha * static_cast<double>(k));
        out.weights[k - 1] = stick * b;
        stick *= 1.0 - b;
    }
    out.remainder = stick;
    return out;
}

}  // namespace pdpent
