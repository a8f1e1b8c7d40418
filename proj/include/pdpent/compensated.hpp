#pragma once

#include <cmath>

namespace pdpent {

/// Neumaier-compensated accumulator; add() keeps the running error term,
/// value() folds it back in.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + comp; }
};

}  // namespace pdpent
