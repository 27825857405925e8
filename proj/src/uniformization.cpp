#include "unicp/uniformization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace unicp {

void RateConfiguration::validate() const {
    if (rates.empty()) throw input_error("rate configuration is empty");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i] > 0.0) || !std::isfinite(rates[i])) {
            throw input_error("rates must be strictly positive and finite (index " +
                              std::to_string(i) + ")");
        }
    }
    if (!(prior_shape > 0.0) || !(prior_rate > 0.0)) {
        throw input_error("rate hyperprior requires a > 0 and b > 0");
    }
}

double RateConfiguration::max_rate() const {
    return *std::max_element(rates.begin(), rates.end());
}

std::vector<std::vector<double>> uniformized_matrix(const RateConfiguration& rates,
                                                    double lambda) {
    rates.validate();
    for (std::size_t i = 0; i < rates.rates.size(); ++i) {
        if (!(lambda > rates.rates[i])) {
            throw input_error("uniformization rate must dominate all transition rates; "
                              "violated at index " + std::to_string(i));
        }
    }
    const std::size_t m = rates.rates.size();
    std::vector<std::vector<double>> p(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        const double jump = rates.rates[i] / lambda;
        p[i][i] = 1.0 - jump;
        p[i][i + 1] = jump;
    }
    return p;
}

std::vector<double> simulate_homogeneous_poisson(double lambda, double t_end,
                                                 std::mt19937_64& rng) {
    if (!(lambda > 0.0)) throw input_error("poisson rate must be positive");
    std::vector<double> times;
    if (!(t_end > 0.0)) return times;
    std::exponential_distribution<double> gap(lambda);
    double t = gap(rng);
    while (t < t_end) {
        times.push_back(t);
        t += gap(rng);
    }
    return times;
}

double PiecewiseConstantIntensity::at(double t) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    return values[static_cast<std::size_t>(it - knots.begin())];
}

double PiecewiseConstantIntensity::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

void PiecewiseConstantIntensity::validate() const {
    if (values.size() != knots.size() + 1) {
        throw input_error("piecewise intensity needs one more level than breakpoints");
    }
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i] < knots[i + 1])) {
            throw input_error("intensity breakpoints must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw input_error("intensity levels must be nonnegative and finite");
        }
    }
}

std::vector<double> thinning(const PiecewiseConstantIntensity& intensity, double bound,
                             double t_end, std::mt19937_64& rng) {
    intensity.validate();
    if (intensity.max_value() > bound) {
        throw input_error("thinning bound below the intensity at some breakpoint");
    }
    std::vector<double> kept;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double v : simulate_homogeneous_poisson(bound, t_end, rng)) {
        if (unif(rng) < intensity.at(v) / bound) kept.push_back(v);
    }
    return kept;
}

double poisson_truncation_bound(double lambda, double dt, unsigned level) {
    const double x = lambda * dt;
    if (x <= 0.0) return 0.0;
    return std::exp(static_cast<double>(level) * std::log(x) -
                    std::lgamma(static_cast<double>(level) + 1.0));
}

grid_cap_error::grid_cap_error(std::size_t count_, std::size_t cap_, std::vector<double> rates_)
    : runtime_abort("uniform grid exceeded cap: " + std::to_string(count_) + " > " +
                    std::to_string(cap_)),
      count(count_),
      cap(cap_),
      rates(std::move(rates_)) {}

namespace {

// Segment label of the trajectory at time t: changepoint times close their
// own segment, so a time equal to changepoints[i] is labelled i+1.
int segment_label(const std::vector<double>& changepoints, double t) {
    auto it = std::lower_bound(changepoints.begin(), changepoints.end(), t);
    return static_cast<int>(it - changepoints.begin()) + 1;
}

UniformGrid assemble_grid(std::vector<double> times, const std::vector<double>& changepoints,
                          const RateConfiguration& rates, double horizon,
                          double uniformization_rate, bool piecewise_resolution,
                          double resolution) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    UniformGrid grid;
    grid.horizon = horizon;
    grid.times = std::move(times);
    grid.states.reserve(grid.times.size());
    grid.self_probs.reserve(grid.times.size());
    for (double u : grid.times) {
        const int s = segment_label(changepoints, u);
        grid.states.push_back(s);
        const double q = rates.rates[static_cast<std::size_t>(s - 1)];
        const double lam = piecewise_resolution ? resolution * q : uniformization_rate;
        grid.self_probs.push_back(1.0 - q / lam);
    }
    return grid;
}

void check_trajectory(const std::vector<double>& changepoints, const RateConfiguration& rates,
                      double horizon, double resolution) {
    rates.validate();
    if (!(resolution > 1.0)) throw input_error("resolution must exceed 1");
    if (!(horizon > 0.0)) throw input_error("horizon must be positive");
    if (changepoints.size() + 1 != rates.rates.size()) {
        throw input_error("trajectory has " + std::to_string(changepoints.size()) +
                          " changepoints but " + std::to_string(rates.rates.size()) + " rates");
    }
    double prev = 0.0;
    for (double tau : changepoints) {
        if (!(tau > prev) || !(tau < horizon)) {
            throw input_error("changepoints must be strictly increasing within (0, horizon)");
        }
        prev = tau;
    }
}

}  // namespace

UniformGrid build_grid(const std::vector<double>& changepoints, const RateConfiguration& rates,
                       double horizon, double resolution, std::size_t cap,
                       std::mt19937_64& rng, int max_attempts) {
    check_trajectory(changepoints, rates, horizon, resolution);

    PiecewiseConstantIntensity intensity;
    intensity.knots = changepoints;
    intensity.values.reserve(rates.rates.size());
    for (double q : rates.rates) intensity.values.push_back(resolution * q);
    const double bound = intensity.max_value();

    std::size_t last_count = 0;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> times = thinning(intensity, bound, horizon, rng);
        times.insert(times.end(), changepoints.begin(), changepoints.end());
        if (times.size() <= cap) {
            return assemble_grid(std::move(times), changepoints, rates, horizon, 0.0,
                                 /*piecewise_resolution=*/true, resolution);
        }
        last_count = times.size();
    }
    throw grid_cap_error(last_count, cap, rates.rates);
}

UniformGrid build_homogeneous_grid(const std::vector<double>& changepoints,
                                   const RateConfiguration& rates, double horizon,
                                   double resolution, std::size_t cap, std::mt19937_64& rng,
                                   int max_attempts) {
    check_trajectory(changepoints, rates, horizon, resolution);
    const double lambda = resolution * rates.max_rate();

    std::size_t last_count = 0;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> times = simulate_homogeneous_poisson(lambda, horizon, rng);
        if (times.size() <= cap) {
            return assemble_grid(std::move(times), changepoints, rates, horizon, lambda,
                                 /*piecewise_resolution=*/false, resolution);
        }
        last_count = times.size();
    }
    throw grid_cap_error(last_count, cap, rates.rates);
}

}  // namespace unicp
