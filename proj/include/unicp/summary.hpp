#ifndef UNICP_SUMMARY_HPP
#define UNICP_SUMMARY_HPP

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "unicp/ffbs.hpp"
#include "unicp/gibbs.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/series.hpp"

namespace unicp {

/// Centralized and normalized cumulative sums:
/// c_j = sum_{i<=j} y_i / sum_{i<=n} y_i - j/n. Rejects a zero total.
std::vector<double> cusum_diagnostic(const ObservationSeries& series);

/// Corner extraction from the cusum curve, used to pick the default number
/// of initial changepoints: corners are found greedily as the point of
/// largest deviation from the chord of the current piece, recursing while
/// the deviation exceeds `prominence` times the curve's total range.
/// Returned values are 1-based serial indices, sorted.
std::vector<std::size_t> cusum_corners(const std::vector<double>& cusum,
                                       double prominence = 0.05,
                                       std::size_t max_corners = 50);

std::size_t cusum_corner_count(const std::vector<double>& cusum, double prominence = 0.05,
                               std::size_t max_corners = 50);

struct HpdInterval {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
};

/// Shortest interval covering at least `mass` of the samples.
HpdInterval hpd_interval(std::vector<double> samples, double mass);

struct SummaryOptions {
    double hpd_mass = 0.95;
    std::size_t histogram_bin_width = 0;  // 0: one index per bin up to n=2000, else n/1000
};

struct SummaryReport {
    // Posterior of the number of changepoints (probabilities sum to 1).
    std::map<std::size_t, double> count_posterior;
    std::size_t map_changepoint_count = 0;

    // Pooled histogram of changepoint serial indices: (bin left edge, count).
    std::vector<std::pair<std::size_t, std::size_t>> location_histogram;
    std::size_t histogram_bin_width = 1;

    // Rank-matched summaries over draws whose count equals the MAP count.
    std::vector<double> location_means;
    std::vector<HpdInterval> location_hpds;
    std::vector<double> theta_means;
    std::vector<HpdInterval> theta_hpds;

    // Viterbi MAP locations under plug-in posterior means (only when theta
    // draws are available).
    bool has_map_locations = false;
    std::vector<int> map_locations;

    std::vector<double> cusum;
    double hpd_mass = 0.95;
};

/// Full posterior summary. Location and theta summaries condition on draws
/// with the MAP count, matched by rank; MAP locations run the Viterbi pass
/// with plug-in posterior means.
SummaryReport summarize(const ObservationSeries& series, const SegmentModelSpec& spec,
                        const PosteriorArchive& archive, const SummaryOptions& options);

/// Count table + histogram + rank-matched location summaries only; used when
/// re-summarizing persisted draws that carry no parameter samples.
SummaryReport summarize_draws_only(std::size_t n_observations,
                                   const std::vector<ChangepointSample>& draws,
                                   const SummaryOptions& options);

}  // namespace unicp

#endif
