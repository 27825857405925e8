#include "unicp/viterbi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "unicp/logspace.hpp"

namespace unicp {

double transition_weight(std::size_t from, std::size_t to, std::span<const double> rates,
                         double dt) {
    if (from >= rates.size() || !(dt > 0.0)) {
        throw input_error("transition_weight: bad state or interval");
    }
    if (to == from) {
        return -rates[from] * dt;
    }
    if (to == from + 1 && to < rates.size()) {
        return std::log(rates[from]) - std::min(rates[from], rates[to]) * dt;
    }
    return kNegInf;
}

std::size_t map_count(const PosteriorArchive& archive) {
    if (archive.draws.empty()) throw input_error("map_count: empty archive");
    std::map<std::size_t, std::size_t> freq;
    for (const ChangepointSample& draw : archive.draws) ++freq[draw.count];
    std::size_t best_m = 0;
    std::size_t best_n = 0;
    for (const auto& [m, n] : freq) {
        if (n > best_n) {  // ascending keys: ties keep the smaller count
            best_m = m;
            best_n = n;
        }
    }
    return best_m;
}

std::pair<std::vector<double>, std::vector<double>> conditional_plugin_means(
    const PosteriorArchive& archive, std::size_t m) {
    std::vector<double> rates(m + 1, 0.0);
    std::vector<double> thetas(m + 1, 0.0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < archive.draws.size(); ++i) {
        if (archive.draws[i].count != m) continue;
        ++hits;
        for (std::size_t j = 0; j <= m; ++j) {
            rates[j] += archive.rate_draws[i][j];
            thetas[j] += archive.theta_draws[i][j];
        }
    }
    if (hits == 0) {
        throw input_error("no retained draw has changepoint count " + std::to_string(m));
    }
    for (std::size_t j = 0; j <= m; ++j) {
        rates[j] /= static_cast<double>(hits);
        thetas[j] /= static_cast<double>(hits);
    }
    return {std::move(rates), std::move(thetas)};
}

ViterbiPath viterbi_map(const ObservationSeries& series, const SegmentModelSpec& spec,
                        const std::vector<double>& rates, const std::vector<double>& thetas) {
    series.validate();
    if (rates.empty() || rates.size() != thetas.size()) {
        throw input_error("viterbi_map: rates and thetas must both have m+1 entries");
    }
    const std::size_t n = series.size();
    const std::size_t m = rates.size() - 1;
    if (m >= n) {
        throw input_error("viterbi_map: " + std::to_string(m) +
                          " changepoints infeasible for " + std::to_string(n) + " observations");
    }
    const std::span<const double> q(rates);

    // Scores over states 0..m; the chain starts in state 0 and no jump is
    // allowed before the first observation.
    std::vector<std::vector<double>> score(n, std::vector<double>(m + 1, kNegInf));
    std::vector<std::vector<std::uint8_t>> came_from_jump(
        n, std::vector<std::uint8_t>(m + 1, 0));

    double dt = series.event_times[0];
    score[0][0] = transition_weight(0, 0, q, dt) + log_emission(spec, thetas[0], series.values[0]);

    for (std::size_t k = 1; k < n; ++k) {
        dt = series.event_times[k] - series.event_times[k - 1];
        bool any_finite = false;
        for (std::size_t j = 0; j <= std::min(m, k); ++j) {
            const double stay = score[k - 1][j] + transition_weight(j, j, q, dt);
            double best = stay;
            std::uint8_t jumped = 0;
            if (j > 0) {
                const double jump = score[k - 1][j - 1] + transition_weight(j - 1, j, q, dt);
                if (jump > best) {  // ties keep the stay branch
                    best = jump;
                    jumped = 1;
                }
            }
            if (best == kNegInf) continue;
            const double em = log_emission(spec, thetas[j], series.values[k]);
            score[k][j] = best + em;
            came_from_jump[k][j] = jumped;
            any_finite = any_finite || score[k][j] > kNegInf;
        }
        if (!any_finite) {
            throw runtime_abort("viterbi_map: zero emission everywhere at observation " +
                                std::to_string(k + 1));
        }
    }

    // Exactly m jumps: the path must end in the last state. The window tail
    // after the final observation survives in that state.
    double total = score[n - 1][m];
    if (total == kNegInf) {
        throw runtime_abort("viterbi_map: no feasible path with the requested count");
    }
    total += -rates[m] * (series.horizon - series.event_times[n - 1]);

    ViterbiPath path;
    path.log_score = total;
    std::size_t state = m;
    std::vector<int> serials;
    for (std::size_t k = n - 1; k >= 1; --k) {
        if (came_from_jump[k][state]) {
            serials.push_back(static_cast<int>(k) + 1);  // first observation of the new segment
            --state;
        }
    }
    std::reverse(serials.begin(), serials.end());

    path.sample.count = serials.size();
    path.sample.serial_indices = serials;
    path.sample.locations.reserve(serials.size());
    for (int serial : serials) {
        // The jump sits at the last event time of the old segment.
        path.sample.locations.push_back(series.event_times[static_cast<std::size_t>(serial) - 2]);
    }
    return path;
}

}  // namespace unicp
