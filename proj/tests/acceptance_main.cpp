// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Every tolerance is pinned here; the process exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "unicp/ffbs.hpp"
#include "unicp/gibbs.hpp"
#include "unicp/io.hpp"
#include "unicp/logspace.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/series.hpp"
#include "unicp/summary.hpp"
#include "unicp/uniformization.hpp"
#include "unicp/viterbi.hpp"

using namespace unicp;
namespace ut = unicp::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --------------------------------------------------------------------------
// 1. Truncated uniformization series vs dense matrix exponential.

Outcome criterion_uniformization() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> rate_dist(0.1, 2.0);
    std::uniform_int_distribution<std::size_t> size_dist(2, 6);
    std::uniform_real_distribution<double> t_dist(0.1, 2.0);
    std::uniform_real_distribution<double> mult_dist(1.5, 20.0);
    const unsigned levels = 250;

    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t states = size_dist(rng);
        std::vector<double> q(states - 1);
        for (double& x : q) x = rate_dist(rng);
        const double lambda = mult_dist(rng) * *std::max_element(q.begin(), q.end());
        const double t = t_dist(rng);

        // Series on the square block with an absorbing tail state.
        const std::size_t n = q.size() + 1;
        ut::Matrix p(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < q.size(); ++i) {
            p[i][i] = 1.0 - q[i] / lambda;
            p[i][i + 1] = q[i] / lambda;
        }
        p[n - 1][n - 1] = 1.0;
        ut::Matrix power = ut::identity(n);
        ut::Matrix series_sum(n, std::vector<double>(n, 0.0));
        double weight = std::exp(-lambda * t);
        for (unsigned k = 0;; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) series_sum[i][j] += weight * power[i][j];
            }
            if (k == levels) break;
            power = ut::multiply(power, p);
            weight *= lambda * t / static_cast<double>(k + 1);
        }

        auto gen = ut::left_to_right_generator(q);
        for (auto& row : gen) {
            for (double& x : row) x *= t;
        }
        const auto expm = ut::matrix_exponential(gen);
        const double tol = std::max(1e-10, poisson_truncation_bound(lambda, t, levels));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double err = std::abs(series_sum[i][j] - expm[i][j]);
                worst = std::max(worst, err - tol);
            }
        }
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "worst excess over tolerance " << worst << ", " << elapsed << " s";
    return {worst <= 0.0 && elapsed < 1.0, detail.str()};
}

// --------------------------------------------------------------------------
// 2. FFBS exactness on a fixed grid against exhaustive enumeration.

Outcome criterion_ffbs_exactness() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(202);

    // A 34-point series with one clear mean shift and a fixed K = 10 grid
    // with heterogeneous self probabilities.
    std::vector<double> values(34);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t j = 0; j < values.size(); ++j) {
        values[j] = (j < 17 ? 0.0 : 2.0) + noise(rng);
    }
    const auto series = ObservationSeries::regular(std::move(values));
    const auto spec = SegmentModelSpec::normal(0.0, 4.0, 1.0);
    const PrefixCache cache = build_prefix_cache(series, spec);

    UniformGrid grid;
    grid.horizon = series.horizon;
    std::uniform_real_distribution<double> u(0.5, series.horizon - 0.5);
    std::vector<double> times;
    for (int i = 0; i < 10; ++i) times.push_back(u(rng));
    std::sort(times.begin(), times.end());
    grid.times = times;
    grid.states.assign(10, 1);
    std::uniform_real_distribution<double> pd(0.4, 0.95);
    for (int i = 0; i < 10; ++i) grid.self_probs.push_back(pd(rng));

    const RunLengthModel model(grid.self_probs);
    const GridMarginals marg(series, cache, spec, grid);
    const FilterTrellis trellis = forward_filter(model, marg);

    const auto log_m = [&](std::size_t a, std::size_t b) { return marg(a, b); };
    const std::vector<double> oracle_log =
        ut::enumerate_grid_posterior(10, grid.self_probs, log_m);
    std::vector<double> oracle(oracle_log.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) oracle[i] = std::exp(oracle_log[i]);

    const std::size_t draws = 100000;
    std::vector<double> empirical(oracle.size(), 0.0);
    for (std::size_t d = 0; d < draws; ++d) {
        std::size_t mask = 0;
        for (std::size_t idx : backward_sample_indices(trellis, model, rng)) {
            mask |= static_cast<std::size_t>(1) << (idx - 1);
        }
        empirical[mask] += 1.0;
    }
    for (double& e : empirical) e /= static_cast<double>(draws);

    const double tv = ut::total_variation(empirical, oracle);
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "TV = " << tv << " (limit 0.02), " << elapsed << " s (limit 30)";
    return {tv <= 0.02 && elapsed < 30.0, detail.str()};
}

// --------------------------------------------------------------------------
// 3. Viterbi equals brute force on 100 random instances.

Outcome criterion_viterbi_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<std::size_t> n_dist(3, 12);
    std::uniform_int_distribution<std::size_t> m_dist(0, 2);
    std::uniform_real_distribution<double> rate_dist(0.05, 2.0);
    std::normal_distribution<double> theta_dist(0.0, 2.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> gap(0.2, 2.0);

    int matches = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        const std::size_t n = n_dist(rng);
        const std::size_t m = std::min(m_dist(rng), n - 1);
        std::vector<double> thetas(m + 1);
        for (double& x : thetas) x = theta_dist(rng);
        std::vector<double> rates(m + 1);
        for (double& x : rates) x = rate_dist(rng);
        std::vector<double> times(n);
        double t = 0.0;
        for (double& x : times) {
            t += gap(rng);
            x = t;
        }
        std::vector<double> values(n);
        for (std::size_t j = 0; j < n; ++j) {
            values[j] = thetas[std::min<std::size_t>(j * (m + 1) / n, m)] + noise(rng);
        }
        const auto series =
            ObservationSeries::with_times(std::move(values), times, t + gap(rng));
        const auto spec = SegmentModelSpec::normal(0.0, 4.0, 1.0);

        const ViterbiPath path = viterbi_map(series, spec, rates, thetas);

        // Exhaustive maximization over all placements of m cuts.
        double best_score = kNegInf;
        std::vector<int> best_serials;
        std::vector<int> cuts(m);
        const std::function<void(std::size_t, int)> recurse = [&](std::size_t depth,
                                                                  int first) {
            if (depth == m) {
                double total = 0.0;
                std::size_t state = 0;
                std::size_t next = 0;
                double prev_time = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double dt = series.event_times[k] - prev_time;
                    prev_time = series.event_times[k];
                    if (next < cuts.size() && static_cast<std::size_t>(cuts[next]) == k) {
                        total += std::log(rates[state]) -
                                 std::min(rates[state], rates[state + 1]) * dt;
                        ++state;
                        ++next;
                    } else {
                        total += -rates[state] * dt;
                    }
                    total += log_emission(spec, thetas[state], series.values[k]);
                }
                total += -rates[state] * (series.horizon - series.event_times[n - 1]);
                if (total > best_score) {
                    best_score = total;
                    best_serials.clear();
                    for (int c : cuts) best_serials.push_back(c + 1);
                }
                return;
            }
            for (int c = first; c < static_cast<int>(n); ++c) {
                cuts[depth] = c;
                recurse(depth + 1, c + 1);
            }
        };
        recurse(0, 1);

        const bool same_path = path.sample.serial_indices == best_serials;
        const bool tied_score = std::abs(path.log_score - best_score) <= 1e-9;
        if (same_path || (tied_score && path.sample.count == m)) ++matches;
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << matches << "/100 matches, " << elapsed << " s (limit 10)";
    return {matches == reps && elapsed < 10.0, detail.str()};
}

// --------------------------------------------------------------------------
// 4. Conjugacy: KS tests and the quadrature oracle.

Outcome criterion_conjugacy() {
    std::mt19937_64 rng(404);
    std::ostringstream detail;
    bool pass = true;

    // sample_rates KS against Gamma(a+1, b + dtau).
    {
        const std::size_t n = 100000;
        std::vector<double> draws(n);
        for (double& x : draws) x = sample_rates({3.0}, 2.0, 1.5, 12.0, rng).rates[0];
        const double d = ut::ks_statistic(
            draws, [](double x) { return ut::gamma_cdf(x, 3.0, 4.5); });
        const double crit = ut::ks_critical(n, 0.01);
        pass = pass && d < crit;
        detail << "rates KS " << d << " < " << crit;
    }
    // sample_theta KS per family.
    {
        const std::size_t n = 100000;
        const auto spec = SegmentModelSpec::normal(0.5, 2.0, 1.0);
        const std::vector<double> values{1.0, 2.0, 0.5, 1.5};
        const PrefixCache cache =
            build_prefix_cache(ObservationSeries::regular(values), spec);
        std::vector<double> draws(n);
        for (double& x : draws) x = sample_theta(cache, spec, 0, 4, rng);
        const double prec = 4.0 + 0.5;
        const double mean = (5.0 + 0.25) / prec;
        const double d = ut::ks_statistic(draws, [&](double x) {
            return ut::normal_cdf(x, mean, std::sqrt(1.0 / prec));
        });
        pass = pass && d < ut::ks_critical(n, 0.01);
        detail << ", theta KS " << d;
    }
    // log_marginal vs quadrature: 50 random segments per family, 1e-6
    // relative in log.
    {
        double worst = 0.0;
        std::normal_distribution<double> norm(1.0, 2.0);
        std::exponential_distribution<double> expo(0.8);
        std::poisson_distribution<long> pois(3);
        std::uniform_int_distribution<std::size_t> len_dist(1, 50);
        for (int family = 0; family < 3; ++family) {
            for (int rep = 0; rep < 50; ++rep) {
                const std::size_t len = len_dist(rng);
                std::vector<double> values(len);
                SegmentModelSpec spec;
                switch (family) {
                    case 0:
                        spec = SegmentModelSpec::normal(0.5, 1.5, 0.8);
                        for (double& v : values) v = norm(rng);
                        break;
                    case 1:
                        spec = SegmentModelSpec::exponential(1.3, 0.9);
                        for (double& v : values) v = expo(rng);
                        break;
                    default:
                        spec = SegmentModelSpec::poisson(1.8, 0.7);
                        for (double& v : values) v = static_cast<double>(pois(rng));
                        break;
                }
                const PrefixCache cache =
                    build_prefix_cache(ObservationSeries::regular(values), spec);
                const double lib = log_marginal(cache, spec, 0, len);
                const double oracle = ut::log_marginal_quadrature(values, spec);
                worst = std::max(worst, std::abs(lib - oracle) / std::abs(oracle));
            }
        }
        pass = pass && worst < 1e-6;
        detail << ", worst marginal rel err " << worst;
    }
    return {pass, detail.str()};
}

// --------------------------------------------------------------------------
// 5. Normal benchmark reproduction at k = 15.

struct BenchmarkRun {
    PosteriorArchive archive;
    SummaryReport report;
    BenchmarkData bench;
};

BenchmarkRun run_normal_benchmark(double resolution, std::uint64_t seed) {
    BenchmarkRun out;
    out.bench = generate_benchmark("normal-1200", 2024);
    const std::size_t m0 = cusum_corner_count(cusum_diagnostic(out.bench.series));
    GibbsConfig config = default_config(out.bench.series, m0);
    config.iterations = 6000;
    config.burn_in = 3000;
    config.resolution = resolution;
    config.seed = seed;
    out.archive = gibbs_run(out.bench.series, out.bench.spec, config);
    out.report = summarize(out.bench.series, out.bench.spec, out.archive, SummaryOptions{});
    return out;
}

Outcome criterion_normal_benchmark(const BenchmarkRun& run) {
    std::ostringstream detail;
    const std::size_t mode = run.report.map_changepoint_count;
    bool pass = mode == 10;
    detail << "count mode " << mode;

    if (pass && run.report.has_map_locations) {
        detail << ", MAP";
        const std::vector<int>& truth = run.bench.true_changepoints;
        const std::vector<int>& found = run.report.map_locations;
        if (found.size() != truth.size()) {
            pass = false;
            detail << " size mismatch";
        } else {
            int worst = 0;
            for (std::size_t i = 0; i < truth.size(); ++i) {
                worst = std::max(worst, std::abs(found[i] - truth[i]));
                detail << ' ' << found[i];
            }
            detail << ", worst |err| " << worst << " (limit 15)";
            pass = worst <= 15;
        }
    } else if (!run.report.has_map_locations) {
        pass = false;
        detail << ", no MAP locations";
    }
    return {pass, detail.str()};
}

// --------------------------------------------------------------------------
// 6. Exponential sparse benchmark.

Outcome criterion_exponential_benchmark() {
    const BenchmarkData bench = generate_benchmark("exponential-10000", 777);
    const std::size_t m0 = cusum_corner_count(cusum_diagnostic(bench.series));
    GibbsConfig config = default_config(bench.series, m0);
    config.iterations = 1500;
    config.burn_in = 1000;
    config.resolution = 10.0;
    config.seed = 606;
    const PosteriorArchive archive = gibbs_run(bench.series, bench.spec, config);

    // Pooled serial histogram; the three heaviest disjoint width-200 windows
    // must each contain one true changepoint.
    const std::size_t n = bench.series.size();
    std::vector<double> weight(n + 2, 0.0);
    for (const auto& draw : archive.draws) {
        for (int serial : draw.serial_indices) weight[static_cast<std::size_t>(serial)] += 1.0;
    }
    std::vector<double> prefix(n + 2, 0.0);
    for (std::size_t i = 1; i <= n + 1; ++i) prefix[i] = prefix[i - 1] + weight[i];
    const std::size_t width = 200;
    std::vector<bool> blocked(n + 2, false);
    std::vector<std::pair<std::size_t, std::size_t>> windows;  // [lo, hi]
    for (int pick = 0; pick < 3; ++pick) {
        double best_mass = -1.0;
        std::size_t best_lo = 1;
        for (std::size_t lo = 1; lo + width - 1 <= n; ++lo) {
            const std::size_t hi = lo + width - 1;
            bool overlaps = false;
            for (const auto& [wlo, whi] : windows) {
                if (lo <= whi && wlo <= hi) {
                    overlaps = true;
                    break;
                }
            }
            if (overlaps) continue;
            const double mass = prefix[hi] - prefix[lo - 1];
            if (mass > best_mass) {
                best_mass = mass;
                best_lo = lo;
            }
        }
        windows.emplace_back(best_lo, best_lo + width - 1);
    }

    bool windows_ok = true;
    std::ostringstream detail;
    detail << "windows";
    std::vector<bool> truth_hit(bench.true_changepoints.size(), false);
    for (const auto& [lo, hi] : windows) {
        detail << " [" << lo << "," << hi << "]";
        bool hit = false;
        for (std::size_t i = 0; i < bench.true_changepoints.size(); ++i) {
            const auto cp = static_cast<std::size_t>(bench.true_changepoints[i]);
            if (cp >= lo && cp <= hi && !truth_hit[i]) {
                truth_hit[i] = true;
                hit = true;
                break;
            }
        }
        windows_ok = windows_ok && hit;
    }

    // Grid width discipline: K <= 250 in at least 99% of iterations.
    std::size_t within = 0;
    for (const auto& diag : archive.diagnostics) {
        within += (!diag.grid_aborted && diag.grid_size <= 250) ? 1 : 0;
    }
    const double frac =
        static_cast<double>(within) / static_cast<double>(archive.diagnostics.size());
    detail << ", K<=250 fraction " << frac;
    return {windows_ok && frac >= 0.99, detail.str()};
}

// --------------------------------------------------------------------------
// 7. Scaling effect: k = 15 vs k = 5 on the normal benchmark.

Outcome criterion_scaling_effect(const BenchmarkRun& fine) {
    const BenchmarkRun coarse = run_normal_benchmark(5.0, 505);

    const auto mean_width = [](const SummaryReport& report) {
        double total = 0.0;
        for (const HpdInterval& h : report.location_hpds) total += h.width();
        return report.location_hpds.empty()
                   ? 0.0
                   : total / static_cast<double>(report.location_hpds.size());
    };
    const double w_fine = mean_width(fine.report);
    const double w_coarse = mean_width(coarse.report);

    double mass_below_10 = 0.0;
    for (const auto& [m, p] : coarse.report.count_posterior) {
        if (m < 10) mass_below_10 += p;
    }
    std::ostringstream detail;
    detail << "mean HPD width k=15: " << w_fine << ", k=5: " << w_coarse
           << ", mass below 10 at k=5: " << mass_below_10;
    return {w_fine < w_coarse && mass_below_10 > 0.0, detail.str()};
}

// --------------------------------------------------------------------------
// 8. Resource contract.

Outcome criterion_resources() {
    const auto run_counts = [](std::size_t K, std::size_t n) {
        std::mt19937_64 rng(808);
        std::vector<double> values(n);
        std::normal_distribution<double> noise(0.0, 1.0);
        for (double& v : values) v = noise(rng);
        const auto series = ObservationSeries::regular(std::move(values), 50.0);
        const auto spec = SegmentModelSpec::normal(0.0, 1.0, 1.0);
        const PrefixCache cache = build_prefix_cache(series, spec);
        UniformGrid grid;
        grid.horizon = 50.0;
        for (std::size_t i = 1; i <= K; ++i) {
            grid.times.push_back(50.0 * static_cast<double>(i) / static_cast<double>(K + 1));
        }
        grid.states.assign(K, 1);
        grid.self_probs.assign(K, 0.9);
        const RunLengthModel model(grid.self_probs);
        const FilterTrellis trellis =
            forward_filter(model, GridMarginals(series, cache, spec, grid));
        return std::pair{trellis.entries(), trellis.marginal_evals};
    };

    bool pass = true;
    std::ostringstream detail;
    // Independence from n at fixed K.
    const auto [e_small, m_small] = run_counts(16, 200);
    const auto [e_big, m_big] = run_counts(16, 400);
    pass = pass && e_small == e_big && m_small == m_big;
    detail << "n-doubling: entries " << e_small << "/" << e_big;

    // Quadratic growth in K.
    const auto [e1, m1] = run_counts(20, 200);
    const auto [e2, m2] = run_counts(40, 200);
    const auto [e3, m3] = run_counts(80, 200);
    const double g1 = static_cast<double>(e2) / static_cast<double>(e1);
    const double g2 = static_cast<double>(e3) / static_cast<double>(e2);
    const double h1 = static_cast<double>(m2) / static_cast<double>(m1);
    const double h2 = static_cast<double>(m3) / static_cast<double>(m2);
    pass = pass && std::abs(g1 - 4.0) < 0.5 && std::abs(g2 - 4.0) < 0.5 &&
           std::abs(h1 - 4.0) < 0.5 && std::abs(h2 - 4.0) < 0.5;
    detail << ", K-doubling growth " << g1 << ", " << g2;
    // Exact triangular formula.
    pass = pass && e1 == 21 * 22 / 2 && e2 == 41 * 42 / 2 && e3 == 81 * 82 / 2;
    return {pass, detail.str()};
}

}  // namespace

int main() {
    int failures = 0;
    const auto report = [&](int index, const char* name, const Outcome& outcome) {
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << index << " (" << name
                  << "): " << outcome.detail << "\n";
        std::cout.flush();
        if (!outcome.pass) ++failures;
    };

    report(1, "uniformization identity", criterion_uniformization());
    report(2, "ffbs exactness", criterion_ffbs_exactness());
    report(3, "viterbi oracle equivalence", criterion_viterbi_oracle());
    report(4, "conjugacy", criterion_conjugacy());

    const auto t5 = std::chrono::steady_clock::now();
    const BenchmarkRun fine = run_normal_benchmark(15.0, 1234);
    {
        Outcome outcome = criterion_normal_benchmark(fine);
        std::ostringstream with_time;
        with_time << outcome.detail << ", " << seconds_since(t5) << " s";
        outcome.detail = with_time.str();
        report(5, "normal benchmark", outcome);
    }
    report(6, "exponential sparse benchmark", criterion_exponential_benchmark());
    report(7, "scaling effect", criterion_scaling_effect(fine));
    report(8, "resource contract", criterion_resources());

    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
