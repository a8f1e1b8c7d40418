#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pdpent/compensated.hpp"
#include "pdpent/functionals.hpp"
#include "pdpent/pdp_sampler.hpp"
#include "pdpent/special_fn.hpp"

namespace pdpent {

/// One member of the entropy family defined by
///   w(ell) H(ell) = u(a + ell) - b - sum_i (u(n_i - c) + v).
/// The plug-in and posterior mean entropies are the two built-in
/// specializations.
struct GeneralEntropySpec {
    std::string name;
    std::function<double(double)> weight;  // w, evaluated at integer ell >= 1
    std::function<double(double)> u;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double v = 0.0;
};

/// w = ell, u(x) = x log x (0 at 0), a = b = c = v = 0; specializes to the
/// plug-in entropy.
inline GeneralEntropySpec frequentist_spec() {
    GeneralEntropySpec spec;
    spec.name = "frequentist";
    spec.weight = [](double ell) { return ell; };
    spec.u = [](double x) { return x == 0.0 ? 0.0 : x * std::log(x); };
    return spec;
}

/// w = theta + ell, u(x) = x psi(x + 1), a = theta, b = theta psi(1 - alpha),
/// c = alpha, v = alpha psi(1 - alpha); specializes to the posterior mean
/// entropy.
inline GeneralEntropySpec pdp_spec(const PdpParams& params) {
    const double psi_one = digamma(1.0 - params.alpha);
    GeneralEntropySpec spec;
    spec.name = "pdp";
    spec.weight = [theta = params.theta](double ell) { return theta + ell; };
    spec.u = [](double x) { return x == 0.0 ? 0.0 : x * digamma(x + 1.0); };
    spec.a = params.theta;
    spec.b = params.theta * psi_one;
    spec.c = params.alpha;
    spec.v = params.alpha * psi_one;
    return spec;
}

/// Outcome of checking the conditions under which the family behaves like
/// an entropy (maximum at all-singletons, nonnegative increments).
struct AdmissibilityReport {
    bool c_in_range = false;         // 0 <= c < 1
    bool shift_in_range = false;     // a >= -c
    bool singleton_split = false;    // 2 u(1-c) + v < u(2-c)
    bool increments_increasing = false;  // u(n+1-c) - u(n-c) increasing in n
    bool weight_usable = false;      // w positive and increasing on 1..grid_max
    bool cross_increments = false;   // u(a+n+1) - u(a+n) >= u(m+1-c) - u(m-c), n >= m >= 1
    std::string diagnostics;

    bool admissible() const {
        return c_in_range && shift_in_range && singleton_split && increments_increasing;
    }
};

/// Evaluates every condition on the integer grid 1..grid_max. Evaluation
/// errors thrown by u or w mark the affected condition failed and are
/// quoted in diagnostics.
inline AdmissibilityReport check_admissibility(const GeneralEntropySpec& spec,
                                               std::uint64_t grid_max = 64) {
    AdmissibilityReport rep;
    std::ostringstream diag;
    rep.c_in_range = spec.c >= 0.0 && spec.c < 1.0;
    if (!rep.c_in_range) diag << "c=" << spec.c << " outside [0,1); ";
    rep.shift_in_range = spec.a >= -spec.c;
    if (!rep.shift_in_range) diag << "a=" << spec.a << " below -c; ";
    try {
        rep.singleton_split = 2.0 * spec.u(1.0 - spec.c) + spec.v < spec.u(2.0 - spec.c);
        if (!rep.singleton_split) diag << "2u(1-c)+v >= u(2-c); ";
    } catch (const std::exception& e) {
        diag << "singleton split check threw: " << e.what() << "; ";
    }
    try {
        rep.increments_increasing = true;
        double prev = spec.u(2.0 - spec.c) - spec.u(1.0 - spec.c);
        for (std::uint64_t n = 2; n <= grid_max; ++n) {
            const double cur =
                spec.u(static_cast<double>(n) + 1.0 - spec.c) - spec.u(static_cast<double>(n) - spec.c);
            if (!(cur > prev)) {
                rep.increments_increasing = false;
                diag << "u increments not increasing at n=" << n << "; ";
                break;
            }
            prev = cur;
        }
    } catch (const std::exception& e) {
        rep.increments_increasing = false;
        diag << "increment check threw: " << e.what() << "; ";
    }
    try {
        rep.weight_usable = true;
        double prev = spec.weight(1.0);
        if (!(prev > 0.0)) rep.weight_usable = false;
        for (std::uint64_t n = 2; n <= grid_max && rep.weight_usable; ++n) {
            const double cur = spec.weight(static_cast<double>(n));
            if (!(cur > prev)) rep.weight_usable = false;
            prev = cur;
        }
        if (!rep.weight_usable) diag << "weight not positive increasing; ";
    } catch (const std::exception& e) {
        rep.weight_usable = false;
        diag << "weight check threw: " << e.what() << "; ";
    }
    try {
        // With u convex increments it suffices to compare at n == m, but the
        // condition is stated pairwise, so check the worst pair directly:
        // the smallest lead increment against the largest lag increment at
        // each n.
        rep.cross_increments = true;
        double max_lag = -std::numeric_limits<double>::infinity();
        for (std::uint64_t n = 1; n <= grid_max; ++n) {
            const double nd = static_cast<double>(n);
            const double lag = spec.u(nd + 1.0 - spec.c) - spec.u(nd - spec.c);
            if (lag > max_lag) max_lag = lag;
            const double lead = spec.u(spec.a + nd + 1.0) - spec.u(spec.a + nd);
            if (!(lead >= max_lag)) {
                rep.cross_increments = false;
                diag << "weighted step can go negative at ell=" << n << "; ";
                break;
            }
        }
    } catch (const std::exception& e) {
        rep.cross_increments = false;
        diag << "cross increment check threw: " << e.what() << "; ";
    }
    rep.diagnostics = diag.str();
    return rep;
}

/// H(state) for the given family member. Requires ell >= 1.
inline double general_entropy(const GeneralEntropySpec& spec, const SampleState& state) {
    if (state.ell < 1) {
        throw std::invalid_argument("general_entropy: require ell >= 1");
    }
    const double l = static_cast<double>(state.ell);
    CompensatedSum acc;
    for (const std::uint64_t n : state.counts) {
        acc.add(spec.u(static_cast<double>(n) - spec.c) + spec.v);
    }
    return (spec.u(spec.a + l) - spec.b - acc.value()) / spec.weight(l);
}

/// Maximum of H over samples of size ell, attained by ell singletons:
/// (u(a + ell) - b - ell (u(1-c) + v)) / w(ell).
inline double general_max_entropy(const GeneralEntropySpec& spec, std::uint64_t ell) {
    if (ell < 1) {
        throw std::invalid_argument("general_max_entropy: require ell >= 1");
    }
    const double l = static_cast<double>(ell);
    return (spec.u(spec.a + l) - spec.b - l * (spec.u(1.0 - spec.c) + spec.v)) / spec.weight(l);
}

/// Increment of the weighted gap functional w(ell)(Hmax - H) across one
/// step: 0 on a discovery, else u(n - c + 1) - u(n - c) - (u(1-c) + v)
/// where n is the updated species count before the step.
inline double general_delta(const GeneralEntropySpec& spec, const SampleState& prev,
                            const SampleState& next) {
    detail::verify_successor(prev, next);
    if (next.last_count == 1) return 0.0;
    const double n_pre = static_cast<double>(next.last_count - 1);
    return spec.u(n_pre - spec.c + 1.0) - spec.u(n_pre - spec.c) -
           (spec.u(1.0 - spec.c) + spec.v);
}

/// w(ell+1) H(next) - w(ell) H(prev) by closed form:
/// (u(a + ell + 1) - u(a + ell)) - (u(n* - c) - u(n* - 1 - c)) on a
/// reinforcement, with the subtrahend u(1 - c) + v on a discovery.
inline double general_weighted_entropy_step(const GeneralEntropySpec& spec,
                                            const SampleState& prev, const SampleState& next) {
    detail::verify_successor(prev, next);
    const double l = static_cast<double>(prev.ell);
    const double lead = spec.u(spec.a + l + 1.0) - spec.u(spec.a + l);
    if (next.last_count == 1) {
        return lead - (spec.u(1.0 - spec.c) + spec.v);
    }
    const double n_star = static_cast<double>(next.last_count);
    return lead - (spec.u(n_star - spec.c) - spec.u(n_star - 1.0 - spec.c));
}

}  // namespace pdpent
