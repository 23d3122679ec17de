#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace calib::detail {

/// Neumaier's variant of Kahan summation: a running compensation term keeps
/// track of the low-order bits lost by each addition, so sums of values with
/// mixed magnitudes (or exact cancellations) stay correct to the last ulp.
class NeumaierAccumulator {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

inline double neumaier_sum(std::span<const double> values) {
    NeumaierAccumulator accumulator;
    for (double v : values) {
        accumulator.add(v);
    }
    return accumulator.value();
}

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2: a double-double accumulator.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    /// Error-free addition of a plain double (Knuth's TwoSum for the high
    /// part, the residue folded into the low part).
    void add(double value) {
        const double s = hi + value;
        const double bb = s - hi;
        const double err = (hi - (s - bb)) + (value - bb);
        hi = s;
        lo += err;
        // Renormalize so hi carries as much of the sum as one double can.
        const double t = hi + lo;
        lo = lo - (t - hi);
        hi = t;
    }

    /// Round the accumulated sum divided by `divisor` to the nearest double.
    /// The quotient's residue is recovered with fma, so dividing a sum of M
    /// equal values by M returns that value exactly.
    double divided_by(double divisor) const {
        const double q = hi / divisor;
        const double remainder = std::fma(-q, divisor, hi) + lo;
        return q + remainder / divisor;
    }
};

} // namespace calib::detail
