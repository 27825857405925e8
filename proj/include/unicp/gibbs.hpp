#ifndef UNICP_GIBBS_HPP
#define UNICP_GIBBS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "unicp/ffbs.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/series.hpp"
#include "unicp/uniformization.hpp"

namespace unicp {

struct GibbsConfig {
    std::size_t iterations = 6000;
    std::size_t burn_in = 3000;
    double resolution = 10.0;  // thinning intensity multiplier k
    int prune_repeats = 5;     // backward-sampling repeats per location
    std::size_t l_cap = 250;   // uniformization event cap per iteration
    std::uint64_t seed = 0;

    std::vector<double> init_changepoints;
    RateConfiguration init_rates;

    // A grid-cap abort reuses the previous trajectory; this many consecutive
    // aborts terminate the run with a partial archive.
    std::size_t max_consecutive_aborts = 25;

    // Called once per iteration with (iteration, current m, current K).
    std::function<void(std::size_t, std::size_t, std::size_t)> progress;

    // Diagnostics hook: the grid and the accepted draw of each non-aborted
    // iteration.
    std::function<void(std::size_t, const UniformGrid&, const ChangepointSample&)> trace;

    void validate() const;
};

/// Equally spaced initialization: m0 changepoints, all rates (m0+1)/T, and
/// the default hyperprior a = 1, b = T/(m0+1) so the prior mean rate matches.
GibbsConfig default_config(const ObservationSeries& series, std::size_t m0);

struct IterationDiagnostics {
    std::size_t grid_size = 0;
    bool grid_aborted = false;
    double log_normalizer = 0.0;  // sum of per-step filter normalizers
};

struct PosteriorArchive {
    std::vector<ChangepointSample> draws;           // iterations - burn_in entries
    std::vector<std::vector<double>> rate_draws;    // per draw: q_1..q_{m+1}
    std::vector<std::vector<double>> theta_draws;   // per draw: one theta per segment
    std::vector<std::size_t> draw_iterations;       // 1-based iteration index per draw

    std::vector<IterationDiagnostics> diagnostics;  // every iteration
    std::size_t iterations = 0;
    std::size_t burn_in = 0;
    bool terminated_early = false;
    std::string termination_reason;

    std::size_t retained() const { return draws.size(); }
};

/// Full conditional of the rate vector given a trajectory: each closed
/// segment i contributes Gamma(a + 1, b + (tau_i - tau_{i-1})); the open
/// final segment saw no jump, so its rate is drawn from
/// Gamma(a, b + (T - tau_m)).
RateConfiguration sample_rates(const std::vector<double>& changepoints, double prior_shape,
                               double prior_rate, double horizon, std::mt19937_64& rng);

/// Collapsed Gibbs sampler: per iteration builds the piecewise-intensity
/// grid carrying over the previous changepoints, runs FFBS with knot
/// pruning, and refreshes the rates; after burn-in also draws one theta per
/// segment. Deterministic given the seed.
PosteriorArchive gibbs_run(const ObservationSeries& series, const SegmentModelSpec& spec,
                           const GibbsConfig& config);

/// Constant-intensity baseline: a homogeneous grid at k * max(q) per
/// iteration and no changepoint carry-over; otherwise identical.
PosteriorArchive constant_rate_run(const ObservationSeries& series,
                                   const SegmentModelSpec& spec, const GibbsConfig& config);

/// Merges archives from independent chains (in the given order); diagnostics
/// are concatenated.
PosteriorArchive merge_archives(std::vector<PosteriorArchive> archives);

}  // namespace unicp

#endif
