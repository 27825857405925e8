#include "unicp/segment_models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "unicp/errors.hpp"

namespace unicp {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

bool is_nonneg_integer(double y) {
    return y >= 0.0 && std::isfinite(y) && std::nearbyint(y) == y;
}

}  // namespace

ModelFamily family_from_string(const std::string& name) {
    if (name == "normal" || name == "normal-known-variance") {
        return ModelFamily::normal_known_variance;
    }
    if (name == "exponential") return ModelFamily::exponential;
    if (name == "poisson") return ModelFamily::poisson;
    throw input_error("unknown model family: " + name);
}

std::string family_to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::normal_known_variance: return "normal";
        case ModelFamily::exponential: return "exponential";
        case ModelFamily::poisson: return "poisson";
    }
    return "?";
}

SegmentModelSpec SegmentModelSpec::normal(double prior_mean, double prior_var, double noise_var) {
    SegmentModelSpec spec;
    spec.family = ModelFamily::normal_known_variance;
    spec.prior_mean = prior_mean;
    spec.prior_var = prior_var;
    spec.noise_var = noise_var;
    spec.validate();
    return spec;
}

SegmentModelSpec SegmentModelSpec::exponential(double shape, double rate) {
    SegmentModelSpec spec;
    spec.family = ModelFamily::exponential;
    spec.shape = shape;
    spec.rate = rate;
    spec.validate();
    return spec;
}

SegmentModelSpec SegmentModelSpec::poisson(double shape, double rate) {
    SegmentModelSpec spec;
    spec.family = ModelFamily::poisson;
    spec.shape = shape;
    spec.rate = rate;
    spec.validate();
    return spec;
}

void SegmentModelSpec::validate() const {
    if (family == ModelFamily::normal_known_variance) {
        if (!(prior_var > 0.0)) throw input_error("prior variance must be > 0");
        if (!(noise_var > 0.0)) throw input_error("noise variance must be > 0");
    } else {
        if (!(shape > 0.0)) throw input_error("prior shape must be > 0");
        if (!(rate > 0.0)) throw input_error("prior rate must be > 0");
    }
}

PrefixCache build_prefix_cache(const ObservationSeries& series, const SegmentModelSpec& spec) {
    spec.validate();
    series.validate();
    const std::size_t n = series.size();
    PrefixCache cache;
    cache.sum.assign(n + 1, 0.0);
    if (spec.family == ModelFamily::normal_known_variance) cache.sum_sq.assign(n + 1, 0.0);
    if (spec.family == ModelFamily::poisson) cache.sum_log_fact.assign(n + 1, 0.0);

    for (std::size_t j = 0; j < n; ++j) {
        const double y = series.values[j];
        switch (spec.family) {
            case ModelFamily::normal_known_variance:
                if (!std::isfinite(y)) {
                    throw input_error("non-finite value at index " + std::to_string(j));
                }
                cache.sum_sq[j + 1] = cache.sum_sq[j] + y * y;
                break;
            case ModelFamily::exponential:
                if (!(y > 0.0) || !std::isfinite(y)) {
                    throw input_error("exponential family requires strictly positive values "
                                      "(index " + std::to_string(j) + ")");
                }
                break;
            case ModelFamily::poisson:
                if (!is_nonneg_integer(y)) {
                    throw input_error("poisson family requires nonnegative integer values "
                                      "(index " + std::to_string(j) + ")");
                }
                cache.sum_log_fact[j + 1] = cache.sum_log_fact[j] + std::lgamma(y + 1.0);
                break;
        }
        cache.sum[j + 1] = cache.sum[j] + y;
    }
    return cache;
}

double log_marginal(const PrefixCache& cache, const SegmentModelSpec& spec,
                    std::size_t s, std::size_t t) {
    if (s > t || t > cache.size()) {
        throw input_error("log_marginal: invalid segment [" + std::to_string(s) + ", " +
                          std::to_string(t) + "]");
    }
    if (s == t) return 0.0;  // empty product

    const double r = static_cast<double>(t - s);
    const double sum_y = cache.segment_sum(s, t);

    switch (spec.family) {
        case ModelFamily::normal_known_variance: {
            const double s2 = spec.noise_var;
            const double t2 = spec.prior_var;
            const double m = spec.prior_mean;
            // Gaussian integral over the segment mean: precision a, linear
            // coefficient b.
            const double a = r / s2 + 1.0 / t2;
            const double b = sum_y / s2 + m / t2;
            double lp = -0.5 * r * (kLogTwoPi + std::log(s2));
            lp += 0.5 * (std::log(s2) - std::log(r * t2 + s2));
            lp += -cache.segment_sum_sq(s, t) / (2.0 * s2) - m * m / (2.0 * t2);
            lp += b * b / (2.0 * a);
            return lp;
        }
        case ModelFamily::exponential: {
            const double alpha = spec.shape;
            const double beta = spec.rate;
            return alpha * std::log(beta) - std::lgamma(alpha) + std::lgamma(alpha + r) -
                   (alpha + r) * std::log(beta + sum_y);
        }
        case ModelFamily::poisson: {
            const double alpha = spec.shape;
            const double beta = spec.rate;
            return alpha * std::log(beta) - std::lgamma(alpha) + std::lgamma(alpha + sum_y) -
                   (alpha + sum_y) * std::log(beta + r) - cache.segment_log_fact(s, t);
        }
    }
    return 0.0;
}

double sample_theta(const PrefixCache& cache, const SegmentModelSpec& spec,
                    std::size_t s, std::size_t t, std::mt19937_64& rng) {
    if (s > t || t > cache.size()) {
        throw input_error("sample_theta: invalid segment");
    }
    const double r = static_cast<double>(t - s);
    const double sum_y = cache.segment_sum(s, t);

    switch (spec.family) {
        case ModelFamily::normal_known_variance: {
            const double a = r / spec.noise_var + 1.0 / spec.prior_var;
            const double b = sum_y / spec.noise_var + spec.prior_mean / spec.prior_var;
            std::normal_distribution<double> d(b / a, std::sqrt(1.0 / a));
            return d(rng);
        }
        case ModelFamily::exponential: {
            std::gamma_distribution<double> d(spec.shape + r, 1.0 / (spec.rate + sum_y));
            return d(rng);
        }
        case ModelFamily::poisson: {
            std::gamma_distribution<double> d(spec.shape + sum_y, 1.0 / (spec.rate + r));
            return d(rng);
        }
    }
    return 0.0;
}

double log_emission(const SegmentModelSpec& spec, double theta, double y) {
    switch (spec.family) {
        case ModelFamily::normal_known_variance: {
            const double d = y - theta;
            return -0.5 * (kLogTwoPi + std::log(spec.noise_var)) -
                   d * d / (2.0 * spec.noise_var);
        }
        case ModelFamily::exponential:
            return std::log(theta) - theta * y;
        case ModelFamily::poisson:
            return y * std::log(theta) - theta - std::lgamma(y + 1.0);
    }
    return 0.0;
}

}  // namespace unicp
