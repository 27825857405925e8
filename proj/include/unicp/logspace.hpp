#ifndef UNICP_LOGSPACE_HPP
#define UNICP_LOGSPACE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace unicp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Normalizes log weights in place so that exp sums to 1; returns the
/// log normalizing constant. Leaves all -inf untouched (caller decides).
inline double log_normalize(std::span<double> xs) {
    const double z = log_sum_exp(xs);
    if (z != kNegInf) {
        for (double& x : xs) x -= z;
    }
    return z;
}

}  // namespace unicp

#endif
