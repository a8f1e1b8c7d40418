#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace pdpent {

/// Seed material for one reproducible stream. Identical (seed, stream)
/// pairs replay identical draws; distinct stream ids decorrelate replicas
/// run from the same base seed.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// mt19937_64 wrapped with the variate generators the samplers need.
/// The distribution code is self-contained (no std:: distributions), so a
/// given (seed, stream) replays the same trajectory on any platform.
class RandomEngine {
public:
    explicit RandomEngine(RngSeed s) {
        std::uint64_t st = s.seed;
        (void)detail::splitmix64(st);
        st ^= 0xD1B54A32D192ED03ull * (s.stream + 1);
        gen_.seed(detail::splitmix64(st));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform draw on [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform draw on (0, 1); safe under log and fractional powers.
    double uniform01_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        if (!(shape > 0.0)) {
            throw std::invalid_argument("RandomEngine::gamma: shape must be > 0");
        }
        if (shape < 1.0) {
            const double boost = std::pow(uniform01_open(), 1.0 / shape);
            return gamma(shape + 1.0) * boost;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_open();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) as a ratio of two Gamma draws; valid for all positive
    /// shapes, including shapes below one.
    double beta(double a, double b) {
        const double g1 = gamma(a);
        const double g2 = gamma(b);
        const double sum = g1 + g2;
        if (sum <= 0.0) return 0.5;  // both underflowed; vanishing probability
        return g1 / sum;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace pdpent
