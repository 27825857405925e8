#ifndef UNICP_VITERBI_HPP
#define UNICP_VITERBI_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "unicp/ffbs.hpp"
#include "unicp/gibbs.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/series.hpp"

namespace unicp {

/// Log contribution of the latent chain over an inter-observation interval of
/// length dt, maximized over the jump position inside the interval:
/// staying in state `from` costs -q_from * dt; the single allowed jump to
/// from+1 contributes log q_from - min(q_from, q_to) * dt (the jump slides to
/// whichever endpoint keeps the cheaper rate active). Any other target is a
/// structural zero.
double transition_weight(std::size_t from, std::size_t to, std::span<const double> rates,
                         double dt);

/// Mode of the retained changepoint counts; ties break toward the smaller
/// count. Throws on an empty archive.
std::size_t map_count(const PosteriorArchive& archive);

/// Positional means of the rate and theta draws over retained draws whose
/// count equals m (rank matching). Throws if no such draw exists.
std::pair<std::vector<double>, std::vector<double>> conditional_plugin_means(
    const PosteriorArchive& archive, std::size_t m);

struct ViterbiPath {
    ChangepointSample sample;
    double log_score = 0.0;
};

/// MAP locations for a fixed changepoint count: a log-space Viterbi pass over
/// the m+1 left-to-right states with jumps restricted to event times. The
/// path is constrained to end in the last state, so exactly m changepoints
/// come back. rates and thetas must both have m+1 entries; requires m < n.
ViterbiPath viterbi_map(const ObservationSeries& series, const SegmentModelSpec& spec,
                        const std::vector<double>& rates, const std::vector<double>& thetas);

}  // namespace unicp

#endif
