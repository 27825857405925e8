// Shared oracles for the test suites. Everything here recomputes expected
// values by an independent route (quadrature, dense linear algebra or
// exhaustive enumeration) and must stay decoupled from the library's own
// computation paths.
#ifndef UNICP_TESTS_SUPPORT_HPP
#define UNICP_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "unicp/logspace.hpp"
#include "unicp/segment_models.hpp"

namespace unicp::testing {

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature of exp(log_f) with interior shifting.

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// log of integral of exp(log_f) over [a, b], via a coarse scan for the peak
/// followed by adaptive Simpson on the shifted integrand.
inline double log_integral(const std::function<double(double)>& log_f, double a, double b) {
    double peak = unicp::kNegInf;
    const int scan = 512;
    for (int i = 0; i <= scan; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / scan;
        peak = std::max(peak, log_f(x));
    }
    const auto shifted = [&](double x) { return std::exp(log_f(x) - peak); };
    const double fa = shifted(a);
    const double fb = shifted(b);
    const double m = 0.5 * (a + b);
    const double fm = shifted(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double integral =
        adaptive_simpson(shifted, a, b, fa, fm, fb, whole, 1e-13, 48);
    return peak + std::log(integral);
}

/// Quadrature oracle for the conjugate log marginal of values[s..t-1]
/// (0-based half-open range, matching observation indices s+1..t).
inline double log_marginal_quadrature(std::span<const double> values,
                                      const unicp::SegmentModelSpec& spec) {
    const double r = static_cast<double>(values.size());
    if (values.empty()) return 0.0;

    if (spec.family == unicp::ModelFamily::normal_known_variance) {
        double sum = 0.0;
        for (double y : values) sum += y;
        // Exact posterior over the mean gives safe integration bounds.
        const double prec = r / spec.noise_var + 1.0 / spec.prior_var;
        const double mean = (sum / spec.noise_var + spec.prior_mean / spec.prior_var) / prec;
        const double sd = std::sqrt(1.0 / prec);
        const auto log_f = [&](double mu) {
            double lp = -0.5 * (mu - spec.prior_mean) * (mu - spec.prior_mean) / spec.prior_var -
                        0.5 * std::log(2.0 * M_PI * spec.prior_var);
            for (double y : values) {
                lp += -0.5 * (y - mu) * (y - mu) / spec.noise_var -
                      0.5 * std::log(2.0 * M_PI * spec.noise_var);
            }
            return lp;
        };
        return log_integral(log_f, mean - 12.0 * sd, mean + 12.0 * sd);
    }

    // Gamma-conjugate families: integrate over z = log(theta).
    double post_shape = spec.shape;
    double post_rate = spec.rate;
    if (spec.family == unicp::ModelFamily::exponential) {
        post_shape += r;
        for (double y : values) post_rate += y;
    } else {
        for (double y : values) post_shape += y;
        post_rate += r;
    }
    const boost::math::gamma_distribution<double> post(post_shape, 1.0 / post_rate);
    const double zlo = std::log(boost::math::quantile(post, 1e-14)) - 2.0;
    const double zhi = std::log(boost::math::quantile(post, 1.0 - 1e-14)) + 2.0;

    const auto log_f = [&](double z) {
        const double theta = std::exp(z);
        double lp = spec.shape * std::log(spec.rate) - std::lgamma(spec.shape) +
                    spec.shape * z - spec.rate * theta;  // prior density times Jacobian
        for (double y : values) {
            if (spec.family == unicp::ModelFamily::exponential) {
                lp += z - theta * y;
            } else {
                lp += y * z - theta - std::lgamma(y + 1.0);
            }
        }
        return lp;
    };
    return log_integral(log_f, zlo, zhi);
}

// ---------------------------------------------------------------------------
// Dense matrix exponential by scaling and squaring with a Taylor core.

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
        }
    }
    return c;
}

inline Matrix matrix_exponential(Matrix a) {
    const std::size_t n = a.size();
    double norm = 0.0;
    for (const auto& row : a) {
        double s = 0.0;
        for (double x : row) s += std::abs(x);
        norm = std::max(norm, s);
    }
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (auto& row : a) {
        for (double& x : row) x *= scale;
    }
    Matrix result = identity(n);
    Matrix term = identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = multiply(term, a);
        for (auto& row : term) {
            for (double& x : row) x /= static_cast<double>(k);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
        }
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result);
    return result;
}

/// Generator of the left-to-right chain on rates.size()+1 states; the last
/// state is absorbing.
inline Matrix left_to_right_generator(const std::vector<double>& rates) {
    const std::size_t n = rates.size() + 1;
    Matrix q(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < rates.size(); ++i) {
        q[i][i] = -rates[i];
        q[i][i + 1] = rates[i];
    }
    return q;
}

// ---------------------------------------------------------------------------
// Exhaustive grid posterior: configurations are subsets of the K grid times.

/// Log posterior (normalized) over all 2^K jump configurations given per-time
/// self probabilities and a block marginal accessor logM(a, b) over
/// boundaries 0..K+1.
inline std::vector<double> enumerate_grid_posterior(
    std::size_t K, const std::vector<double>& self_probs,
    const std::function<double(std::size_t, std::size_t)>& log_marg) {
    std::vector<double> log_post(static_cast<std::size_t>(1) << K, 0.0);
    for (std::size_t mask = 0; mask < log_post.size(); ++mask) {
        double lp = 0.0;
        for (std::size_t j = 1; j <= K; ++j) {
            const double p = self_probs[j - 1];
            const bool jump = (mask >> (j - 1)) & 1;
            lp += jump ? std::log1p(-p) : std::log(p);
        }
        std::size_t prev = 0;
        for (std::size_t j = 1; j <= K; ++j) {
            if ((mask >> (j - 1)) & 1) {
                lp += log_marg(prev, j);
                prev = j;
            }
        }
        lp += log_marg(prev, K + 1);
        log_post[mask] = lp;
    }
    const double z = unicp::log_sum_exp(log_post);
    for (double& lp : log_post) lp -= z;
    return log_post;
}

/// Filtering law oracle: P(C_t = i | blocks 1..t) by enumerating subsets of
/// the first t-1 grid times.
inline std::vector<double> enumerate_filter_step(
    std::size_t t, const std::vector<double>& self_probs,
    const std::function<double(std::size_t, std::size_t)>& log_marg) {
    std::vector<double> log_mass(t, unicp::kNegInf);
    const std::size_t K = t - 1;
    for (std::size_t mask = 0; mask < (static_cast<std::size_t>(1) << K); ++mask) {
        double lp = 0.0;
        std::size_t last = 0;
        std::size_t prev = 0;
        for (std::size_t j = 1; j <= K; ++j) {
            const double p = self_probs[j - 1];
            const bool jump = (mask >> (j - 1)) & 1;
            lp += jump ? std::log1p(-p) : std::log(p);
            if (jump) {
                lp += log_marg(prev, j);
                prev = j;
                last = j;
            }
        }
        lp += log_marg(prev, t);
        log_mass[last] = unicp::log_add(log_mass[last], lp);
    }
    const double z = unicp::log_sum_exp(log_mass);
    std::vector<double> probs(t);
    for (std::size_t i = 0; i < t; ++i) probs[i] = std::exp(log_mass[i] - z);
    return probs;
}

// ---------------------------------------------------------------------------
// Statistical test helpers.

/// One-sample Kolmogorov-Smirnov statistic against a cdf.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Asymptotic KS critical value at level alpha.
inline double ks_critical(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

inline double chi_squared_critical(std::size_t df, double alpha) {
    return boost::math::quantile(boost::math::chi_squared(static_cast<double>(df)),
                                 1.0 - alpha);
}

inline double gamma_cdf(double x, double shape, double rate) {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(boost::math::gamma_distribution<double>(shape, 1.0 / rate), x);
}

inline double normal_cdf(double x, double mean, double sd) {
    return boost::math::cdf(boost::math::normal(mean, sd), x);
}

/// Total variation distance between two distributions given as aligned
/// probability vectors.
inline double total_variation(std::span<const double> p, std::span<const double> q) {
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

}  // namespace unicp::testing

#endif
