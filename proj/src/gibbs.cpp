#include "unicp/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace unicp {

void GibbsConfig::validate() const {
    if (iterations == 0) throw input_error("iterations must be positive");
    if (burn_in >= iterations) throw input_error("burn_in must be below iterations");
    if (!(resolution > 1.0)) throw input_error("resolution must exceed 1");
    if (prune_repeats < 1) throw input_error("prune_repeats must be >= 1");
    if (l_cap == 0) throw input_error("l_cap must be positive");
    init_rates.validate();
    if (init_changepoints.size() + 1 != init_rates.rates.size()) {
        throw input_error("initial changepoints and rates are inconsistent");
    }
}

GibbsConfig default_config(const ObservationSeries& series, std::size_t m0) {
    GibbsConfig config;
    const double T = series.horizon;
    config.init_changepoints.resize(m0);
    for (std::size_t i = 0; i < m0; ++i) {
        config.init_changepoints[i] =
            static_cast<double>(i + 1) * T / static_cast<double>(m0 + 1);
    }
    config.init_rates.rates.assign(m0 + 1, static_cast<double>(m0 + 1) / T);
    config.init_rates.prior_shape = 1.0;
    config.init_rates.prior_rate = T / static_cast<double>(m0 + 1);
    return config;
}

RateConfiguration sample_rates(const std::vector<double>& changepoints, double prior_shape,
                               double prior_rate, double horizon, std::mt19937_64& rng) {
    if (!(prior_shape > 0.0) || !(prior_rate > 0.0)) {
        throw input_error("rate hyperprior requires a > 0 and b > 0");
    }
    RateConfiguration out;
    out.prior_shape = prior_shape;
    out.prior_rate = prior_rate;
    out.rates.reserve(changepoints.size() + 1);
    double prev = 0.0;
    for (double tau : changepoints) {
        if (!(tau > prev) || !(tau < horizon)) {
            throw input_error("sample_rates: invalid trajectory");
        }
        std::gamma_distribution<double> d(prior_shape + 1.0, 1.0 / (prior_rate + (tau - prev)));
        out.rates.push_back(d(rng));
        prev = tau;
    }
    // Open last segment: no jump observed, so the shape stays at a.
    std::gamma_distribution<double> d(prior_shape, 1.0 / (prior_rate + (horizon - prev)));
    out.rates.push_back(d(rng));
    return out;
}

namespace {

std::vector<std::size_t> segment_boundaries(const ChangepointSample& sample,
                                            const ObservationSeries& series) {
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    for (double tau : sample.locations) {
        bounds.push_back(series.count_at_or_before(tau));
    }
    bounds.push_back(series.size());
    return bounds;
}

ChangepointSample sample_from_locations(const std::vector<double>& locations,
                                        const ObservationSeries& series) {
    ChangepointSample s;
    s.count = locations.size();
    s.locations = locations;
    for (double tau : locations) {
        const std::size_t before = series.count_at_or_before(tau);
        if (before >= series.size()) continue;
        const int serial = static_cast<int>(before) + 1;
        if (s.serial_indices.empty() || s.serial_indices.back() != serial) {
            s.serial_indices.push_back(serial);
        }
    }
    return s;
}

PosteriorArchive run_impl(const ObservationSeries& series, const SegmentModelSpec& spec,
                          const GibbsConfig& config, bool piecewise) {
    config.validate();
    series.validate();
    const PrefixCache cache = build_prefix_cache(series, spec);
    std::mt19937_64 rng(config.seed);

    PosteriorArchive archive;
    archive.iterations = config.iterations;
    archive.burn_in = config.burn_in;
    archive.diagnostics.reserve(config.iterations);

    std::vector<double> changepoints = config.init_changepoints;
    RateConfiguration rates = config.init_rates;
    std::size_t consecutive_aborts = 0;

    for (std::size_t iter = 1; iter <= config.iterations; ++iter) {
        IterationDiagnostics diag;
        bool moved = false;
        ChangepointSample sample;
        try {
            const UniformGrid grid =
                piecewise
                    ? build_grid(changepoints, rates, series.horizon, config.resolution,
                                 config.l_cap, rng)
                    : build_homogeneous_grid(changepoints, rates, series.horizon,
                                             config.resolution, config.l_cap, rng);
            const RunLengthModel model(grid.self_probs);
            const GridMarginals marginals(series, cache, spec, grid);
            const FilterTrellis trellis = forward_filter(model, marginals);

            sample = backward_sample_pruned(trellis, model, grid, series,
                                            config.prune_repeats, rng);
            diag.grid_size = grid.size();
            diag.log_normalizer =
                std::accumulate(trellis.log_normalizers.begin(),
                                trellis.log_normalizers.end(), 0.0);
            moved = true;
            if (config.trace) config.trace(iter, grid, sample);
        } catch (const grid_cap_error& e) {
            diag.grid_size = e.count;
            diag.grid_aborted = true;
        }

        if (moved) {
            changepoints = sample.locations;
            consecutive_aborts = 0;
        } else {
            // Keep the previous trajectory; the iteration still counts.
            ++consecutive_aborts;
        }
        // The rate update conditions only on the trajectory, so it also runs
        // after an aborted grid; otherwise a rate spike that overflowed the
        // cap would stay frozen and keep overflowing it.
        rates = sample_rates(changepoints, config.init_rates.prior_shape,
                             config.init_rates.prior_rate, series.horizon, rng);
        archive.diagnostics.push_back(diag);

        if (iter > config.burn_in) {
            ChangepointSample draw =
                moved ? sample : sample_from_locations(changepoints, series);
            const std::vector<std::size_t> bounds = segment_boundaries(draw, series);
            std::vector<double> thetas;
            thetas.reserve(bounds.size() - 1);
            for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
                thetas.push_back(sample_theta(cache, spec, bounds[i], bounds[i + 1], rng));
            }
            archive.draws.push_back(std::move(draw));
            archive.rate_draws.push_back(rates.rates);
            archive.theta_draws.push_back(std::move(thetas));
            archive.draw_iterations.push_back(iter);
        }

        if (config.progress) {
            config.progress(iter, changepoints.size(), diag.grid_size);
        }
        if (consecutive_aborts > config.max_consecutive_aborts) {
            archive.terminated_early = true;
            archive.termination_reason =
                "grid cap " + std::to_string(config.l_cap) + " exceeded in " +
                std::to_string(consecutive_aborts) + " consecutive iterations";
            break;
        }
    }
    return archive;
}

}  // namespace

PosteriorArchive gibbs_run(const ObservationSeries& series, const SegmentModelSpec& spec,
                           const GibbsConfig& config) {
    return run_impl(series, spec, config, /*piecewise=*/true);
}

PosteriorArchive constant_rate_run(const ObservationSeries& series,
                                   const SegmentModelSpec& spec, const GibbsConfig& config) {
    return run_impl(series, spec, config, /*piecewise=*/false);
}

PosteriorArchive merge_archives(std::vector<PosteriorArchive> archives) {
    if (archives.empty()) throw input_error("no archives to merge");
    PosteriorArchive merged = std::move(archives.front());
    for (std::size_t i = 1; i < archives.size(); ++i) {
        PosteriorArchive& a = archives[i];
        merged.draws.insert(merged.draws.end(), std::make_move_iterator(a.draws.begin()),
                            std::make_move_iterator(a.draws.end()));
        merged.rate_draws.insert(merged.rate_draws.end(),
                                 std::make_move_iterator(a.rate_draws.begin()),
                                 std::make_move_iterator(a.rate_draws.end()));
        merged.theta_draws.insert(merged.theta_draws.end(),
                                  std::make_move_iterator(a.theta_draws.begin()),
                                  std::make_move_iterator(a.theta_draws.end()));
        merged.draw_iterations.insert(merged.draw_iterations.end(), a.draw_iterations.begin(),
                                      a.draw_iterations.end());
        merged.diagnostics.insert(merged.diagnostics.end(), a.diagnostics.begin(),
                                  a.diagnostics.end());
        merged.iterations += a.iterations;
        merged.burn_in += a.burn_in;
        merged.terminated_early = merged.terminated_early || a.terminated_early;
        if (!a.termination_reason.empty()) {
            if (!merged.termination_reason.empty()) merged.termination_reason += "; ";
            merged.termination_reason += a.termination_reason;
        }
    }
    return merged;
}

}  // namespace unicp
