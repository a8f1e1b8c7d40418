#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdpent/compensated.hpp"
#include "pdpent/entropy.hpp"
#include "pdpent/functionals.hpp"
#include "pdpent/pdp_sampler.hpp"
#include "pdpent/special_fn.hpp"

namespace pdpent {

/// One CSV row of per-step trajectory quantities.
struct StepRecord {
    std::uint64_t replica = 0;
    std::uint64_t ell = 0;
    std::uint64_t k = 0;
    std::uint64_t last_count = 0;
    bool is_discovery = false;
    double h_mle = 0.0;
    double h_pdp = 0.0;
    double h_max = 0.0;
    double h_min = 0.0;
    double a_value = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    double a_f = 0.0;
    double delta_f = 0.0;
};

inline constexpr const char* kStepRecordHeader =
    "replica,ell,k,last_count,is_discovery,h_mle,h_pdp,h_max,h_min,a_value,delta,eta,a_f,"
    "delta_f";

namespace detail {

/// Digamma and m log m values a trajectory evaluation needs, tabulated once.
/// psi_shifted(j) = psi(j - alpha) for j = 1..max_ell + 1;
/// psi_total(l) = psi(theta + l + 1) for l = 0..max_ell;
/// nlogn(m) = m log m for m = 0..max_ell; logn(m) = log m for m = 1..max_ell.
class TrajectoryTables {
public:
    TrajectoryTables(const PdpParams& params, std::uint64_t max_ell)
        : shifted_(max_ell + 2, 0.0),
          total_(max_ell + 1, 0.0),
          nlogn_(max_ell + 1, 0.0),
          logn_(max_ell + 1, 0.0) {
        for (std::uint64_t j = 1; j <= max_ell + 1; ++j) {
            shifted_[j] = digamma(static_cast<double>(j) - params.alpha);
        }
        for (std::uint64_t l = 0; l <= max_ell; ++l) {
            total_[l] = digamma(params.theta + static_cast<double>(l) + 1.0);
        }
        for (std::uint64_t m = 1; m <= max_ell; ++m) {
            const double md = static_cast<double>(m);
            logn_[m] = std::log(md);
            nlogn_[m] = md * logn_[m];
        }
    }

    double psi_shifted(std::uint64_t j) const { return shifted_[j]; }
    double psi_total(std::uint64_t l) const { return total_[l]; }
    double nlogn(std::uint64_t m) const { return nlogn_[m]; }
    double logn(std::uint64_t m) const { return logn_[m]; }

private:
    std::vector<double> shifted_;
    std::vector<double> total_;
    std::vector<double> nlogn_;
    std::vector<double> logn_;
};

}  // namespace detail

/// Evaluates every per-step quantity along a trajectory produced by
/// simulate_trajectory. States must be consecutive, start at size one, and
/// record their updated species.
inline std::vector<StepRecord> evaluate_trajectory(const std::vector<SampleState>& trajectory,
                                                   const PdpParams& params,
                                                   std::uint64_t replica = 0) {
    if (trajectory.empty()) {
        throw std::invalid_argument("evaluate_trajectory: empty trajectory");
    }
    if (trajectory.front().ell != 1) {
        throw std::invalid_argument("evaluate_trajectory: trajectory must start at ell 1");
    }
    const std::uint64_t max_ell = trajectory.back().ell;
    const detail::TrajectoryTables tab(params, max_ell);
    const double psi_one = tab.psi_shifted(1);  // psi(1 - alpha)

    std::vector<StepRecord> out;
    out.reserve(trajectory.size());
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const SampleState& s = trajectory[i];
        if (i > 0) detail::verify_successor(trajectory[i - 1], s);
        if (!s.last_species || s.last_count < 1) {
            throw std::invalid_argument("evaluate_trajectory: state lacks step record");
        }
        StepRecord r;
        r.replica = replica;
        r.ell = s.ell;
        r.k = s.counts.size();
        r.last_count = s.last_count;
        r.is_discovery = s.last_count == 1;

        const double l = static_cast<double>(s.ell);
        const double kd = static_cast<double>(s.counts.size());
        const double denom = params.theta + l;

        CompensatedSum post;  // sum (n - alpha) psi(n - alpha + 1)
        CompensatedSum plug;  // sum n (log n - log ell)
        for (const std::uint64_t n : s.counts) {
            const double nd = static_cast<double>(n) - params.alpha;
            post.add(nd * tab.psi_shifted(n + 1));
            plug.add(static_cast<double>(n) * (tab.logn(n) - tab.logn(s.ell)));
        }
        r.h_pdp = tab.psi_total(s.ell) - (params.theta + params.alpha * kd) / denom * psi_one -
                  post.value() / denom;
        r.h_mle = -plug.value() / l;
        r.h_max = tab.psi_total(s.ell) - psi_one - l / denom;
        r.h_min = tab.psi_total(s.ell) - (params.theta + params.alpha) / denom * psi_one -
                  (l - params.alpha) / denom * tab.psi_shifted(s.ell + 1);
        r.a_value = denom * (r.h_max - r.h_pdp);
        r.delta = r.is_discovery ? 0.0 : tab.psi_shifted(s.last_count) - psi_one;
        r.eta = tab.psi_total(s.ell - 1) - tab.psi_shifted(s.last_count);
        r.a_f = l * (tab.logn(s.ell) - r.h_mle);
        r.delta_f = s.last_count == 1
                        ? 0.0
                        : tab.nlogn(s.last_count) - tab.nlogn(s.last_count - 1);
        out.push_back(r);
    }
    return out;
}

namespace detail {

inline void append_double(std::string& row, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    row += buf;
}

}  // namespace detail

/// Writes records as CSV with a fixed header; doubles carry 17 significant
/// digits so values round-trip exactly.
inline void write_step_records_csv(std::ostream& os, std::span<const StepRecord> records) {
    os << kStepRecordHeader << '\n';
    std::string row;
    for (const StepRecord& r : records) {
        row.clear();
        row += std::to_string(r.replica);
        row += ',';
        row += std::to_string(r.ell);
        row += ',';
        row += std::to_string(r.k);
        row += ',';
        row += std::to_string(r.last_count);
        row += ',';
        row += r.is_discovery ? '1' : '0';
        row += ',';
        detail::append_double(row, r.h_mle);
        row += ',';
        detail::append_double(row, r.h_pdp);
        row += ',';
        detail::append_double(row, r.h_max);
        row += ',';
        detail::append_double(row, r.h_min);
        row += ',';
        detail::append_double(row, r.a_value);
        row += ',';
        detail::append_double(row, r.delta);
        row += ',';
        detail::append_double(row, r.eta);
        row += ',';
        detail::append_double(row, r.a_f);
        row += ',';
        detail::append_double(row, r.delta_f);
        row += '\n';
        os << row;
    }
}

}  // namespace pdpent
