#include "unicp/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unicp/viterbi.hpp"

namespace unicp {

std::vector<double> cusum_diagnostic(const ObservationSeries& series) {
    series.validate();
    const std::size_t n = series.size();
    double total = 0.0;
    double total_abs = 0.0;
    for (double y : series.values) {
        total += y;
        total_abs += std::abs(y);
    }
    if (total == 0.0 || std::abs(total) < 1e-14 * total_abs) {
        throw input_error("cusum is undefined for a zero-sum series");
    }
    std::vector<double> out(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        acc += series.values[j];
        out[j] = acc / total - static_cast<double>(j + 1) / static_cast<double>(n);
    }
    out[n - 1] = 0.0;  // telescoping, pinned exactly
    return out;
}

std::vector<std::size_t> cusum_corners(const std::vector<double>& cusum, double prominence,
                                       std::size_t max_corners) {
    std::vector<std::size_t> corners;
    if (cusum.empty()) return corners;
    // Work on the curve with its virtual start (0, 0) prepended, so position
    // j holds the cusum value after observation j.
    std::vector<double> curve(cusum.size() + 1, 0.0);
    std::copy(cusum.begin(), cusum.end(), curve.begin() + 1);

    const auto [lo_it, hi_it] = std::minmax_element(curve.begin(), curve.end());
    const double range = *hi_it - *lo_it;
    if (range <= 0.0) return corners;
    const double threshold = prominence * range;

    std::vector<std::pair<std::size_t, std::size_t>> pieces{{0, curve.size() - 1}};
    while (!pieces.empty() && corners.size() < max_corners) {
        const auto [lo, hi] = pieces.back();
        pieces.pop_back();
        if (hi <= lo + 1) continue;
        const double slope =
            (curve[hi] - curve[lo]) / static_cast<double>(hi - lo);
        double best_dev = 0.0;
        std::size_t best_j = lo;
        for (std::size_t j = lo + 1; j < hi; ++j) {
            const double chord = curve[lo] + slope * static_cast<double>(j - lo);
            const double dev = std::abs(curve[j] - chord);
            if (dev > best_dev) {
                best_dev = dev;
                best_j = j;
            }
        }
        if (best_dev > threshold) {
            corners.push_back(best_j);
            pieces.emplace_back(lo, best_j);
            pieces.emplace_back(best_j, hi);
        }
    }
    std::sort(corners.begin(), corners.end());
    return corners;
}

std::size_t cusum_corner_count(const std::vector<double>& cusum, double prominence,
                               std::size_t max_corners) {
    return cusum_corners(cusum, prominence, max_corners).size();
}

HpdInterval hpd_interval(std::vector<double> samples, double mass) {
    if (samples.empty()) throw input_error("hpd_interval: no samples");
    if (!(mass > 0.0) || !(mass < 1.0)) throw input_error("hpd mass must lie in (0, 1)");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    std::size_t len = static_cast<std::size_t>(
        std::ceil(mass * static_cast<double>(n)));
    len = std::clamp<std::size_t>(len, 1, n);
    HpdInterval best{samples.front(), samples[len - 1]};
    for (std::size_t i = 1; i + len <= n; ++i) {
        const double width = samples[i + len - 1] - samples[i];
        if (width < best.width()) {
            best = {samples[i], samples[i + len - 1]};
        }
    }
    return best;
}

namespace {

std::size_t auto_bin_width(std::size_t n) {
    return n <= 2000 ? 1 : std::max<std::size_t>(1, n / 1000);
}

std::vector<std::pair<std::size_t, std::size_t>> build_histogram(
    std::size_t n, std::size_t bin_width, const std::vector<ChangepointSample>& draws) {
    const std::size_t bins = (n + bin_width - 1) / bin_width;
    std::vector<std::size_t> counts(bins, 0);
    for (const ChangepointSample& draw : draws) {
        for (int serial : draw.serial_indices) {
            const std::size_t b =
                std::min(bins - 1, (static_cast<std::size_t>(serial) - 1) / bin_width);
            ++counts[b];
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> hist;
    hist.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        hist.emplace_back(1 + b * bin_width, counts[b]);
    }
    return hist;
}

std::map<std::size_t, double> count_table(const std::vector<ChangepointSample>& draws) {
    std::map<std::size_t, double> table;
    for (const ChangepointSample& draw : draws) table[draw.count] += 1.0;
    for (auto& [m, p] : table) p /= static_cast<double>(draws.size());
    return table;
}

}  // namespace

SummaryReport summarize(const ObservationSeries& series, const SegmentModelSpec& spec,
                        const PosteriorArchive& archive, const SummaryOptions& options) {
    if (archive.draws.empty()) throw input_error("summarize: empty archive");
    const std::size_t n = series.size();

    SummaryReport report;
    report.hpd_mass = options.hpd_mass;
    report.count_posterior = count_table(archive.draws);
    report.map_changepoint_count = map_count(archive);
    report.histogram_bin_width =
        options.histogram_bin_width > 0 ? options.histogram_bin_width : auto_bin_width(n);
    report.location_histogram = build_histogram(n, report.histogram_bin_width, archive.draws);
    report.cusum = cusum_diagnostic(series);

    const std::size_t mhat = report.map_changepoint_count;
    std::vector<std::size_t> cond;
    for (std::size_t i = 0; i < archive.draws.size(); ++i) {
        if (archive.draws[i].count == mhat) cond.push_back(i);
    }

    // Rank-matched location summaries in serial space (a changepoint past the
    // last observation reads as n+1).
    for (std::size_t r = 0; r < mhat; ++r) {
        std::vector<double> samples;
        samples.reserve(cond.size());
        for (std::size_t i : cond) {
            const double tau = archive.draws[i].locations[r];
            samples.push_back(static_cast<double>(series.count_at_or_before(tau)) + 1.0);
        }
        report.location_means.push_back(
            std::accumulate(samples.begin(), samples.end(), 0.0) /
            static_cast<double>(samples.size()));
        report.location_hpds.push_back(hpd_interval(samples, options.hpd_mass));
    }

    if (!archive.theta_draws.empty() && !cond.empty()) {
        for (std::size_t r = 0; r <= mhat; ++r) {
            std::vector<double> samples;
            samples.reserve(cond.size());
            for (std::size_t i : cond) samples.push_back(archive.theta_draws[i][r]);
            report.theta_means.push_back(
                std::accumulate(samples.begin(), samples.end(), 0.0) /
                static_cast<double>(samples.size()));
            report.theta_hpds.push_back(hpd_interval(samples, options.hpd_mass));
        }
        if (mhat < n) {
            const auto [rates, thetas] = conditional_plugin_means(archive, mhat);
            const ViterbiPath path = viterbi_map(series, spec, rates, thetas);
            report.map_locations = path.sample.serial_indices;
            report.has_map_locations = true;
        }
    }
    return report;
}

SummaryReport summarize_draws_only(std::size_t n_observations,
                                   const std::vector<ChangepointSample>& draws,
                                   const SummaryOptions& options) {
    if (draws.empty()) throw input_error("summarize: no draws");
    SummaryReport report;
    report.hpd_mass = options.hpd_mass;
    report.count_posterior = count_table(draws);

    std::map<std::size_t, std::size_t> freq;
    for (const ChangepointSample& draw : draws) ++freq[draw.count];
    std::size_t best_n = 0;
    for (const auto& [m, count] : freq) {
        if (count > best_n) {  // ascending keys: ties keep the smaller count
            best_n = count;
            report.map_changepoint_count = m;
        }
    }
    report.histogram_bin_width = options.histogram_bin_width > 0
                                     ? options.histogram_bin_width
                                     : auto_bin_width(n_observations);
    report.location_histogram =
        build_histogram(n_observations, report.histogram_bin_width, draws);

    // Rank matching needs a full serial vector; knotted draws are skipped.
    const std::size_t mhat = report.map_changepoint_count;
    for (std::size_t r = 0; r < mhat; ++r) {
        std::vector<double> samples;
        for (const ChangepointSample& draw : draws) {
            if (draw.count != mhat || draw.serial_indices.size() != mhat) continue;
            samples.push_back(static_cast<double>(draw.serial_indices[r]));
        }
        if (samples.empty()) break;
        report.location_means.push_back(
            std::accumulate(samples.begin(), samples.end(), 0.0) /
            static_cast<double>(samples.size()));
        report.location_hpds.push_back(hpd_interval(samples, options.hpd_mass));
    }
    return report;
}

}  // namespace unicp
