#ifndef UNICP_UNIFORMIZATION_HPP
#define UNICP_UNIFORMIZATION_HPP

#include <cstddef>
#include <random>
#include <vector>

#include "unicp/errors.hpp"

namespace unicp {

/// Left-to-right jump rates (q_1, ..., q_{m+1}) with their Gamma(a, b)
/// hyperprior. rates[i] is the rate of leaving segment i+1.
struct RateConfiguration {
    std::vector<double> rates;
    double prior_shape = 1.0;  // a
    double prior_rate = 1.0;   // b

    std::size_t segments() const { return rates.size(); }
    void validate() const;
    double max_rate() const;
};

/// Uniform times u_1 < ... < u_K in (0, horizon) with the segment label of
/// the generating trajectory and the self-transition probability attached to
/// each time.
struct UniformGrid {
    std::vector<double> times;
    std::vector<int> states;        // 1-based segment labels
    std::vector<double> self_probs;  // each in [0, 1)
    double horizon = 0.0;

    std::size_t size() const { return times.size(); }
};

/// Row-stochastic uniformized transition matrix: one row per rate, columns
/// 0..rates.size(). Row i holds 1 - q_i/lambda on the diagonal and
/// q_i/lambda on the superdiagonal. Requires lambda > max rate.
std::vector<std::vector<double>> uniformized_matrix(const RateConfiguration& rates,
                                                    double lambda);

/// Strictly increasing event times of a rate-lambda Poisson process on
/// (0, t_end), drawn via i.i.d. exponential spacings.
std::vector<double> simulate_homogeneous_poisson(double lambda, double t_end,
                                                 std::mt19937_64& rng);

/// Piecewise constant intensity: value(i) applies on [knot_{i-1}, knot_i)
/// with knot_0 = 0 and knot_{end} = infinity.
struct PiecewiseConstantIntensity {
    std::vector<double> knots;   // strictly increasing interior breakpoints
    std::vector<double> values;  // knots.size() + 1 levels

    double at(double t) const;
    double max_value() const;
    void validate() const;
};

/// Lewis-Shedler thinning: candidates from a rate-`bound` homogeneous process,
/// each kept with probability intensity(t)/bound. The intensity must not
/// exceed the bound anywhere.
std::vector<double> thinning(const PiecewiseConstantIntensity& intensity, double bound,
                             double t_end, std::mt19937_64& rng);

/// Supremum-norm bound on truncating the uniformization series at `level`
/// terms: (lambda*dt)^level / level!.
double poisson_truncation_bound(double lambda, double dt, unsigned level);

/// Raised when the grid exceeds the cap after the allowed resamples.
struct grid_cap_error : runtime_abort {
    grid_cap_error(std::size_t count, std::size_t cap, std::vector<double> rates);
    std::size_t count;
    std::size_t cap;
    std::vector<double> rates;
};

/// Builds the uniform grid for one sampler iteration: thins a Poisson
/// process with intensity resolution * q_i on segment i of the previous
/// trajectory, then unions in the previous changepoints so they survive into
/// the next iteration. Self-transition probabilities come out as
/// 1 - 1/resolution at every grid time. Resamples up to max_attempts times
/// if the grid exceeds `cap`, then throws grid_cap_error.
UniformGrid build_grid(const std::vector<double>& changepoints, const RateConfiguration& rates,
                       double horizon, double resolution, std::size_t cap,
                       std::mt19937_64& rng, int max_attempts = 3);

/// Constant-intensity variant: one homogeneous grid at
/// lambda = resolution * max(q), no changepoint carry-over. Self probabilities
/// are 1 - q_{s}/lambda for the segment s containing each time.
UniformGrid build_homogeneous_grid(const std::vector<double>& changepoints,
                                   const RateConfiguration& rates, double horizon,
                                   double resolution, std::size_t cap, std::mt19937_64& rng,
                                   int max_attempts = 3);

}  // namespace unicp

#endif
