#ifndef UNICP_FFBS_HPP
#define UNICP_FFBS_HPP

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "unicp/errors.hpp"
#include "unicp/logspace.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/series.hpp"
#include "unicp/uniformization.hpp"

namespace unicp {

/// Run-length law induced by the grid's self-transition probabilities: the
/// chain jumps at grid time u_k independently with probability 1 - p_k, so a
/// run that starts at u_i ends at u_k with mass
///
///     g(i, k) = (prod_{j=i+1}^{k-1} p_j) * (1 - p_k),        k > i,
///
/// and survival 1 - G(i, k) = prod_{j=i+1}^{k} p_j. Grid times are indexed
/// 1..K here; index 0 stands for the start of the window.
class RunLengthModel {
public:
    explicit RunLengthModel(const std::vector<double>& self_probs);

    std::size_t grid_size() const { return log_p_.size() - 1; }

    /// g(i, k): run from u_i ends exactly at u_k. Requires i < k <= K.
    double log_mass(std::size_t i, std::size_t k) const;
    double mass(std::size_t i, std::size_t k) const { return std::exp(log_mass(i, k)); }

    /// G(i, k) = sum_{j=i+1}^{k} g(i, j).
    double cdf(std::size_t i, std::size_t k) const;

    /// log(1 - G(i, k)): run from u_i survives past u_k. i <= k <= K.
    double log_survival(std::size_t i, std::size_t k) const;

    /// log[(1 - G(i, k)) / (1 - G(i, k-1))]: one-step survival across u_k.
    double log_survival_ratio(std::size_t i, std::size_t k) const;

    /// log[g(i, k) / (1 - G(i, k-1))]: jump at u_k given survival past u_{k-1}.
    double log_hazard(std::size_t i, std::size_t k) const;

private:
    void check_pair(std::size_t i, std::size_t k) const;

    // Zero-probability self transitions poison plain prefix sums of log p,
    // so zeros are counted separately.
    std::vector<double> log_p_;        // log self prob per grid time, index 1..K
    std::vector<double> log_jump_;     // log(1 - p) per grid time
    std::vector<double> prefix_log_;   // sums of finite log p
    std::vector<std::size_t> prefix_zero_;
};

/// Spec-level alias for the pmf accessor.
double run_length_mass(const RunLengthModel& model, std::size_t i, std::size_t k);

/// Filtering distributions of the most-recent-changepoint state, one step per
/// block. Step t (1-based) covers observations up to grid time u_t and holds
/// normalized log probabilities over changepoint locations {0, 1, ..., t-1},
/// with 0 meaning "no changepoint yet".
struct FilterTrellis {
    std::vector<std::vector<double>> steps;   // steps[t-1] has length t
    std::vector<double> log_normalizers;      // per-step normalizing constants
    std::size_t marginal_evals = 0;           // instrumentation

    std::size_t num_steps() const { return steps.size(); }
    std::size_t entries() const;
};

/// One posterior draw of the changepoint configuration.
struct ChangepointSample {
    std::size_t count = 0;               // m
    std::vector<double> locations;       // strictly increasing, in (0, horizon)
    std::vector<int> serial_indices;     // first observation of each new segment

    void validate(double horizon) const;
};

/// Forward filtering over the uniform grid.
///
/// `log_marg(a, b)` must return the log marginal likelihood of the
/// observations in (u_a, u_b] for 0 <= a <= b <= K+1, with u_0 = 0 and
/// u_{K+1} = horizon, and 0 for an empty range. Each step is renormalized in
/// log space; a step whose weights all underflow to -inf aborts with the
/// step index.
template <typename MarginalFn>
FilterTrellis forward_filter(const RunLengthModel& model, MarginalFn&& log_marg) {
    const std::size_t K = model.grid_size();
    FilterTrellis trellis;
    trellis.steps.reserve(K + 1);
    trellis.log_normalizers.reserve(K + 1);

    trellis.steps.push_back({0.0});  // P(C_1 = 0 | Y_1) = 1
    trellis.log_normalizers.push_back(0.0);

    // log M(i, t) for the current step, updated in place.
    std::vector<double> seg_log_marg(1, log_marg(0, 1));
    ++trellis.marginal_evals;

    for (std::size_t t = 1; t <= K; ++t) {
        const std::vector<double>& prev = trellis.steps.back();
        std::vector<double> next(t + 1, kNegInf);

        // Survive across u_t: the open segment absorbs block t+1.
        for (std::size_t i = 0; i < t; ++i) {
            const double cur = log_marg(i, t + 1);
            ++trellis.marginal_evals;
            next[i] = prev[i] + model.log_survival_ratio(i, t) + cur - seg_log_marg[i];
            seg_log_marg[i] = cur;
        }
        // Jump at u_t: a fresh segment spans block t+1 alone.
        double birth = kNegInf;
        for (std::size_t j = 0; j < t; ++j) {
            birth = log_add(birth, prev[j] + model.log_hazard(j, t));
        }
        const double new_seg = log_marg(t, t + 1);
        ++trellis.marginal_evals;
        next[t] = birth + new_seg;
        seg_log_marg.push_back(new_seg);

        const double z = log_normalize(next);
        if (z == kNegInf) {
            throw runtime_abort("forward filter underflow at step " + std::to_string(t + 1));
        }
        trellis.steps.push_back(std::move(next));
        trellis.log_normalizers.push_back(z);
    }
    return trellis;
}

/// Draws one changepoint configuration backwards through the trellis;
/// returns grid-time indices in increasing order (1-based, empty when no
/// changepoint was drawn).
std::vector<std::size_t> backward_sample_indices(const FilterTrellis& trellis,
                                                 const RunLengthModel& model,
                                                 std::mt19937_64& rng);

/// Knot-pruned variant: each location is drawn `repeats` times and the
/// earliest (minimum index) is kept. repeats == 1 reduces exactly to
/// backward_sample_indices.
std::vector<std::size_t> backward_sample_pruned_indices(const FilterTrellis& trellis,
                                                        const RunLengthModel& model,
                                                        int repeats, std::mt19937_64& rng);

/// Maps grid indices to a ChangepointSample: locations are grid times, serial
/// indices are the first observation of each new segment (duplicates from
/// changepoints sharing an observation gap collapse; a changepoint past the
/// last observation has no serial).
ChangepointSample make_changepoint_sample(const std::vector<std::size_t>& grid_indices,
                                          const UniformGrid& grid,
                                          const ObservationSeries& series);

ChangepointSample backward_sample(const FilterTrellis& trellis, const RunLengthModel& model,
                                  const UniformGrid& grid, const ObservationSeries& series,
                                  std::mt19937_64& rng);

ChangepointSample backward_sample_pruned(const FilterTrellis& trellis,
                                         const RunLengthModel& model, const UniformGrid& grid,
                                         const ObservationSeries& series, int repeats,
                                         std::mt19937_64& rng);

/// Marginal-likelihood accessor over grid blocks: binds a prefix cache to the
/// grid via binary search of the block boundaries, and maps (a, b) to the
/// observation range (u_a, u_b].
class GridMarginals {
public:
    GridMarginals(const ObservationSeries& series, const PrefixCache& cache,
                  const SegmentModelSpec& spec, const UniformGrid& grid);

    double operator()(std::size_t a, std::size_t b) const {
        return log_marginal(*cache_, *spec_, obs_at_[a], obs_at_[b]);
    }

    /// Observation count at or before boundary a (0..K+1).
    std::size_t observations_before(std::size_t a) const { return obs_at_[a]; }

private:
    const PrefixCache* cache_;
    const SegmentModelSpec* spec_;
    std::vector<std::size_t> obs_at_;
};

}  // namespace unicp

#endif
