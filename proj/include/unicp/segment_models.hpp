#ifndef UNICP_SEGMENT_MODELS_HPP
#define UNICP_SEGMENT_MODELS_HPP

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "unicp/series.hpp"

namespace unicp {

enum class ModelFamily {
    normal_known_variance,  // mean changes, noise variance fixed
    exponential,
    poisson,
};

ModelFamily family_from_string(const std::string& name);
std::string family_to_string(ModelFamily family);

/// Conjugate observation family with its hyperparameters.
///
/// normal_known_variance: values ~ N(mu, noise_var), mu ~ N(prior_mean, prior_var).
/// exponential:           values ~ Exp(theta), theta ~ Gamma(shape, rate).
/// poisson:               values ~ Pois(theta), theta ~ Gamma(shape, rate).
struct SegmentModelSpec {
    ModelFamily family = ModelFamily::normal_known_variance;

    // normal_known_variance
    double prior_mean = 0.0;
    double prior_var = 1.0;
    double noise_var = 1.0;

    // exponential / poisson
    double shape = 1.0;
    double rate = 1.0;

    static SegmentModelSpec normal(double prior_mean, double prior_var, double noise_var);
    static SegmentModelSpec exponential(double shape, double rate);
    static SegmentModelSpec poisson(double shape, double rate);

    void validate() const;
};

/// Per-family cumulative sufficient statistics with a leading zero, so any
/// segment sum is one subtraction. Immutable once built; shareable across
/// threads.
struct PrefixCache {
    std::vector<double> sum;           // prefix sums of y
    std::vector<double> sum_sq;        // prefix sums of y^2 (normal only)
    std::vector<double> sum_log_fact;  // prefix sums of lgamma(y+1) (poisson only)

    std::size_t size() const { return sum.empty() ? 0 : sum.size() - 1; }

    double segment_sum(std::size_t s, std::size_t t) const { return sum[t] - sum[s]; }
    double segment_sum_sq(std::size_t s, std::size_t t) const { return sum_sq[t] - sum_sq[s]; }
    double segment_log_fact(std::size_t s, std::size_t t) const {
        return sum_log_fact[t] - sum_log_fact[s];
    }
};

/// Validates family support (poisson: nonnegative integers, exponential:
/// strictly positive) and builds the cache. Throws input_error naming the
/// first offending index.
PrefixCache build_prefix_cache(const ObservationSeries& series, const SegmentModelSpec& spec);

/// Log marginal likelihood of observations s+1..t (0 <= s <= t <= n) with the
/// segment parameter integrated out against its conjugate prior. An empty
/// segment (s == t) returns 0 (the empty product is 1).
double log_marginal(const PrefixCache& cache, const SegmentModelSpec& spec,
                    std::size_t s, std::size_t t);

/// Draws the segment parameter from its conjugate full conditional given
/// observations s+1..t. With s == t this is a draw from the prior.
double sample_theta(const PrefixCache& cache, const SegmentModelSpec& spec,
                    std::size_t s, std::size_t t, std::mt19937_64& rng);

/// Log density of one observation given the segment parameter; the emission
/// term of the Viterbi recursion.
double log_emission(const SegmentModelSpec& spec, double theta, double y);

}  // namespace unicp

#endif
