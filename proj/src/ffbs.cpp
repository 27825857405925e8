#include "unicp/ffbs.hpp"

#include <algorithm>
#include <cmath>

namespace unicp {

RunLengthModel::RunLengthModel(const std::vector<double>& self_probs) {
    const std::size_t K = self_probs.size();
    log_p_.assign(K + 1, 0.0);
    log_jump_.assign(K + 1, kNegInf);
    prefix_log_.assign(K + 1, 0.0);
    prefix_zero_.assign(K + 1, 0);
    for (std::size_t k = 1; k <= K; ++k) {
        const double p = self_probs[k - 1];
        if (!(p >= 0.0) || !(p < 1.0)) {
            throw input_error("self probabilities must lie in [0, 1)");
        }
        log_p_[k] = p > 0.0 ? std::log(p) : kNegInf;
        log_jump_[k] = std::log1p(-p);
        prefix_log_[k] = prefix_log_[k - 1] + (p > 0.0 ? std::log(p) : 0.0);
        prefix_zero_[k] = prefix_zero_[k - 1] + (p > 0.0 ? 0 : 1);
    }
}

void RunLengthModel::check_pair(std::size_t i, std::size_t k) const {
    if (k <= i || k > grid_size()) {
        throw input_error("run length indices require i < k <= K");
    }
}

double RunLengthModel::log_mass(std::size_t i, std::size_t k) const {
    check_pair(i, k);
    return log_survival(i, k - 1) + log_jump_[k];
}

double RunLengthModel::cdf(std::size_t i, std::size_t k) const {
    check_pair(i, k);
    return -std::expm1(log_survival(i, k));
}

double RunLengthModel::log_survival(std::size_t i, std::size_t k) const {
    if (k < i || k > grid_size()) {
        throw input_error("survival indices require i <= k <= K");
    }
    if (prefix_zero_[k] > prefix_zero_[i]) return kNegInf;
    return prefix_log_[k] - prefix_log_[i];
}

double RunLengthModel::log_survival_ratio(std::size_t i, std::size_t k) const {
    check_pair(i, k);
    return log_p_[k];
}

double RunLengthModel::log_hazard(std::size_t i, std::size_t k) const {
    check_pair(i, k);
    return log_jump_[k];
}

double run_length_mass(const RunLengthModel& model, std::size_t i, std::size_t k) {
    return model.mass(i, k);
}

std::size_t FilterTrellis::entries() const {
    std::size_t total = 0;
    for (const auto& step : steps) total += step.size();
    return total;
}

void ChangepointSample::validate(double horizon) const {
    if (count != locations.size()) {
        throw input_error("changepoint count does not match locations");
    }
    double prev = 0.0;
    for (double tau : locations) {
        if (!(tau > prev) || !(tau < horizon)) {
            throw input_error("changepoint locations must be strictly increasing in (0, horizon)");
        }
        prev = tau;
    }
    for (std::size_t i = 0; i + 1 < serial_indices.size(); ++i) {
        if (serial_indices[i] >= serial_indices[i + 1]) {
            throw input_error("serial indices must be strictly increasing");
        }
    }
}

namespace {

std::size_t draw_categorical_log(const std::vector<double>& log_weights, std::mt19937_64& rng) {
    const double z = log_sum_exp(log_weights);
    if (z == kNegInf) {
        throw runtime_abort("backward sampling hit an all-zero weight vector");
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0.0;
    std::size_t last_finite = 0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        if (log_weights[i] == kNegInf) continue;
        acc += std::exp(log_weights[i] - z);
        last_finite = i;
        if (u <= acc) return i;
    }
    return last_finite;  // rounding tail
}

// Law of the most recent changepoint before grid time u_s, given a jump at
// u_s: the filtered step s reweighted by the jump hazard (which is constant
// in the predecessor for this run-length family, but kept in ratio form).
std::vector<double> predecessor_log_weights(const FilterTrellis& trellis,
                                            const RunLengthModel& model, std::size_t s) {
    const std::vector<double>& alpha = trellis.steps[s - 1];
    std::vector<double> w(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        w[j] = alpha[j] + model.log_hazard(j, s);
    }
    return w;
}

}  // namespace

std::vector<std::size_t> backward_sample_indices(const FilterTrellis& trellis,
                                                 const RunLengthModel& model,
                                                 std::mt19937_64& rng) {
    return backward_sample_pruned_indices(trellis, model, 1, rng);
}

std::vector<std::size_t> backward_sample_pruned_indices(const FilterTrellis& trellis,
                                                        const RunLengthModel& model,
                                                        int repeats, std::mt19937_64& rng) {
    if (repeats < 1) throw input_error("pruning repeats must be >= 1");
    if (trellis.steps.empty()) throw input_error("empty trellis");

    auto draw_min = [&](const std::vector<double>& log_weights) {
        std::size_t best = draw_categorical_log(log_weights, rng);
        for (int r = 1; r < repeats; ++r) {
            best = std::min(best, draw_categorical_log(log_weights, rng));
        }
        return best;
    };

    std::vector<std::size_t> indices;
    std::size_t s = draw_min(trellis.steps.back());
    while (s > 0) {
        indices.push_back(s);
        s = draw_min(predecessor_log_weights(trellis, model, s));
    }
    std::reverse(indices.begin(), indices.end());
    return indices;
}

ChangepointSample make_changepoint_sample(const std::vector<std::size_t>& grid_indices,
                                          const UniformGrid& grid,
                                          const ObservationSeries& series) {
    ChangepointSample sample;
    sample.count = grid_indices.size();
    sample.locations.reserve(grid_indices.size());
    for (std::size_t idx : grid_indices) {
        sample.locations.push_back(grid.times[idx - 1]);
    }
    const std::size_t n = series.size();
    for (double tau : sample.locations) {
        const std::size_t before = series.count_at_or_before(tau);
        if (before >= n) continue;  // past the last observation: no serial
        const int serial = static_cast<int>(before) + 1;
        if (sample.serial_indices.empty() || sample.serial_indices.back() != serial) {
            sample.serial_indices.push_back(serial);
        }
    }
    return sample;
}

ChangepointSample backward_sample(const FilterTrellis& trellis, const RunLengthModel& model,
                                  const UniformGrid& grid, const ObservationSeries& series,
                                  std::mt19937_64& rng) {
    return make_changepoint_sample(backward_sample_indices(trellis, model, rng), grid, series);
}

ChangepointSample backward_sample_pruned(const FilterTrellis& trellis,
                                         const RunLengthModel& model, const UniformGrid& grid,
                                         const ObservationSeries& series, int repeats,
                                         std::mt19937_64& rng) {
    return make_changepoint_sample(
        backward_sample_pruned_indices(trellis, model, repeats, rng), grid, series);
}

GridMarginals::GridMarginals(const ObservationSeries& series, const PrefixCache& cache,
                             const SegmentModelSpec& spec, const UniformGrid& grid)
    : cache_(&cache), spec_(&spec) {
    const std::size_t K = grid.size();
    obs_at_.resize(K + 2);
    obs_at_[0] = 0;
    for (std::size_t a = 1; a <= K; ++a) {
        obs_at_[a] = series.count_at_or_before(grid.times[a - 1]);
    }
    obs_at_[K + 1] = series.size();
}

}  // namespace unicp
