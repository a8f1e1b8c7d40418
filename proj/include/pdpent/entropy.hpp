#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdpent/compensated.hpp"
#include "pdpent/pdp_sampler.hpp"
#include "pdpent/special_fn.hpp"

namespace pdpent {

/// Mean entropy of the random measure before any observation:
/// psi(theta + 1) - psi(1 - alpha).
inline double prior_mean_entropy(const PdpParams& params) {
    return digamma(params.theta + 1.0) - digamma(1.0 - params.alpha);
}

/// Posterior mean entropy given frequencies summing to ell. The empty
/// sample returns the prior mean.
inline double posterior_mean_entropy(std::span<const std::uint64_t> counts, std::uint64_t ell,
                                     const PdpParams& params) {
    if (ell == 0) {
        if (!counts.empty()) {
            throw std::invalid_argument("posterior_mean_entropy: counts must be empty at ell 0");
        }
        return prior_mean_entropy(params);
    }
    const double l = static_cast<double>(ell);
    const double k = static_cast<double>(counts.size());
    const double denom = params.theta + l;
    CompensatedSum acc;
    for (const std::uint64_t n : counts) {
        const double nd = static_cast<double>(n) - params.alpha;
        acc.add(nd * digamma(nd + 1.0));
    }
    return digamma(denom + 1.0) -
           (params.theta + params.alpha * k) / denom * digamma(1.0 - params.alpha) -
           acc.value() / denom;
}

inline double posterior_mean_entropy(const SampleState& state, const PdpParams& params) {
    return posterior_mean_entropy(std::span<const std::uint64_t>(state.counts), state.ell, params);
}

/// Plug-in entropy of the empirical frequencies, with 0 log 0 = 0.
inline double mle_entropy(std::span<const std::uint64_t> counts, std::uint64_t ell) {
    if (ell == 0) {
        throw std::invalid_argument("mle_entropy: undefined for the empty sample");
    }
    const double l = static_cast<double>(ell);
    CompensatedSum acc;
    for (const std::uint64_t n : counts) {
        if (n == 0) continue;
        const double p = static_cast<double>(n) / l;
        acc.add(p * std::log(p));
    }
    return -acc.value();
}

inline double mle_entropy(const SampleState& state) {
    return mle_entropy(std::span<const std::uint64_t>(state.counts), state.ell);
}

enum class ExtremalKind { kMax, kMin };

/// A frequency configuration extremizing the posterior mean entropy among
/// samples of size ell with exactly k species.
struct ExtremalConfig {
    std::vector<std::uint64_t> counts;
    ExtremalKind kind = ExtremalKind::kMax;
    std::uint64_t ell = 0;
    std::uint64_t k = 0;
};

/// kMax: the balanced configuration, k - (ell mod k) parts of size
/// floor(ell/k) followed by ell mod k parts one larger. kMin: one part of
/// size ell - k + 1 and k - 1 singletons. Requires 1 <= k <= ell.
inline ExtremalConfig extremal_config(std::uint64_t ell, std::uint64_t k, ExtremalKind kind) {
    if (k < 1 || k > ell) {
        throw std::out_of_range("extremal_config: require 1 <= k <= ell");
    }
    ExtremalConfig cfg;
    cfg.kind = kind;
    cfg.ell = ell;
    cfg.k = k;
    cfg.counts.reserve(k);
    if (kind == ExtremalKind::kMax) {
        const std::uint64_t low = ell / k;
        const std::uint64_t high_parts = ell - k * low;
        for (std::uint64_t i = 0; i < k - high_parts; ++i) cfg.counts.push_back(low);
        for (std::uint64_t i = 0; i < high_parts; ++i) cfg.counts.push_back(low + 1);
    } else {
        cfg.counts.push_back(ell - (k - 1));
        for (std::uint64_t i = 1; i < k; ++i) cfg.counts.push_back(1);
    }
    return cfg;
}

/// Largest posterior mean entropy over all samples of size ell >= 1,
/// attained by ell singletons:
/// psi(theta + ell + 1) - psi(1 - alpha) - ell / (theta + ell).
inline double global_max_entropy(std::uint64_t ell, const PdpParams& params) {
    if (ell < 1) {
        throw std::invalid_argument("global_max_entropy: require ell >= 1");
    }
    const double l = static_cast<double>(ell);
    return digamma(params.theta + l + 1.0) - digamma(1.0 - params.alpha) -
           l / (params.theta + l);
}

/// Smallest posterior mean entropy over all samples of size ell >= 1,
/// attained by a single species of frequency ell.
inline double global_min_entropy(std::uint64_t ell, const PdpParams& params) {
    if (ell < 1) {
        throw std::invalid_argument("global_min_entropy: require ell >= 1");
    }
    const double l = static_cast<double>(ell);
    const double denom = params.theta + l;
    return digamma(denom + 1.0) -
           (params.theta + params.alpha) / denom * digamma(1.0 - params.alpha) -
           (l - params.alpha) / denom * digamma(l - params.alpha + 1.0);
}

}  // namespace pdpent
