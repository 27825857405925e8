// Python bindings for the main operations: benchmark generation, the
// collapsed Gibbs sampler, marginal likelihood evaluation, the cusum
// diagnostic and Viterbi MAP decoding.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>

#include "unicp/ffbs.hpp"
#include "unicp/gibbs.hpp"
#include "unicp/io.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/summary.hpp"
#include "unicp/viterbi.hpp"

namespace py = pybind11;

namespace {

unicp::SegmentModelSpec make_spec(const std::string& family, const py::dict& hyper) {
    const auto get = [&](const char* key, double fallback) {
        return hyper.contains(key) ? hyper[key].cast<double>() : fallback;
    };
    switch (unicp::family_from_string(family)) {
        case unicp::ModelFamily::normal_known_variance:
            return unicp::SegmentModelSpec::normal(get("prior_mean", 0.0), get("prior_var", 1.0),
                                                   get("noise_var", 1.0));
        case unicp::ModelFamily::exponential:
            return unicp::SegmentModelSpec::exponential(get("shape", 1.0), get("rate", 1.0));
        case unicp::ModelFamily::poisson:
            return unicp::SegmentModelSpec::poisson(get("shape", 1.0), get("rate", 1.0));
    }
    throw unicp::input_error("unreachable family");
}

unicp::ObservationSeries make_series(const std::vector<double>& values,
                                     const std::optional<std::vector<double>>& times,
                                     double horizon) {
    if (times.has_value()) {
        return unicp::ObservationSeries::with_times(values, *times, horizon);
    }
    return unicp::ObservationSeries::regular(values, horizon);
}

py::dict archive_to_dict(const unicp::PosteriorArchive& archive) {
    py::list draws;
    for (std::size_t i = 0; i < archive.draws.size(); ++i) {
        py::dict d;
        d["m"] = archive.draws[i].count;
        d["locations"] = archive.draws[i].locations;
        d["serials"] = archive.draws[i].serial_indices;
        d["rates"] = archive.rate_draws[i];
        d["thetas"] = archive.theta_draws[i];
        d["iteration"] = archive.draw_iterations[i];
        draws.append(d);
    }
    py::list grid_sizes;
    py::list aborted;
    for (const unicp::IterationDiagnostics& diag : archive.diagnostics) {
        grid_sizes.append(diag.grid_size);
        aborted.append(diag.grid_aborted);
    }
    py::dict out;
    out["draws"] = draws;
    out["grid_sizes"] = grid_sizes;
    out["grid_aborted"] = aborted;
    out["terminated_early"] = archive.terminated_early;
    out["termination_reason"] = archive.termination_reason;
    return out;
}

py::dict run_sampler(const std::vector<double>& values,
                     const std::optional<std::vector<double>>& times, double horizon,
                     const std::string& family, const py::dict& hyper, std::size_t iterations,
                     std::size_t burn_in, double resolution, int prune_repeats,
                     std::size_t l_cap, std::uint64_t seed, long init_m, double prior_a,
                     double prior_b, bool constant_rate) {
    const unicp::ObservationSeries series = make_series(values, times, horizon);
    const unicp::SegmentModelSpec spec = make_spec(family, hyper);

    std::size_t m0;
    if (init_m >= 0) {
        m0 = static_cast<std::size_t>(init_m);
    } else {
        m0 = unicp::cusum_corner_count(unicp::cusum_diagnostic(series));
    }
    unicp::GibbsConfig config = unicp::default_config(series, m0);
    config.iterations = iterations;
    config.burn_in = burn_in;
    config.resolution = resolution;
    config.prune_repeats = prune_repeats;
    config.l_cap = l_cap;
    config.seed = seed;
    if (prior_a > 0.0) config.init_rates.prior_shape = prior_a;
    if (prior_b > 0.0) config.init_rates.prior_rate = prior_b;

    const unicp::PosteriorArchive archive = constant_rate
                                                ? unicp::constant_rate_run(series, spec, config)
                                                : unicp::gibbs_run(series, spec, config);
    return archive_to_dict(archive);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian multiple changepoint detection on a randomized uniform grid";

    py::register_exception<unicp::input_error>(m, "InputError");
    py::register_exception<unicp::runtime_abort>(m, "RuntimeAbort");
    py::register_exception<unicp::io_error>(m, "IoError");

    m.def(
        "generate_benchmark",
        [](const std::string& preset, std::uint64_t seed) {
            const unicp::BenchmarkData data = unicp::generate_benchmark(preset, seed);
            py::dict out;
            out["values"] = data.series.values;
            out["times"] = data.series.event_times;
            out["horizon"] = data.series.horizon;
            out["true_changepoints"] = data.true_changepoints;
            out["true_params"] = data.true_params;
            out["family"] = unicp::family_to_string(data.spec.family);
            return out;
        },
        py::arg("preset"), py::arg("seed"));

    m.def("run_gibbs", &run_sampler, py::arg("values"), py::arg("times") = py::none(),
          py::arg("horizon") = -1.0, py::arg("family") = "normal",
          py::arg("hyperparams") = py::dict(), py::arg("iterations") = 1000,
          py::arg("burn_in") = 500, py::arg("resolution") = 10.0, py::arg("prune_repeats") = 5,
          py::arg("l_cap") = 250, py::arg("seed") = 1, py::arg("init_m") = -1,
          py::arg("prior_a") = -1.0, py::arg("prior_b") = -1.0,
          py::arg("constant_rate") = false);

    m.def(
        "log_marginal",
        [](const std::vector<double>& values, const std::string& family, const py::dict& hyper,
           std::size_t s, std::size_t t) {
            const unicp::ObservationSeries series = unicp::ObservationSeries::regular(values);
            const unicp::SegmentModelSpec spec = make_spec(family, hyper);
            const unicp::PrefixCache cache = unicp::build_prefix_cache(series, spec);
            return unicp::log_marginal(cache, spec, s, t);
        },
        py::arg("values"), py::arg("family"), py::arg("hyperparams"), py::arg("s"),
        py::arg("t"));

    m.def(
        "cusum",
        [](const std::vector<double>& values) {
            return unicp::cusum_diagnostic(unicp::ObservationSeries::regular(values));
        },
        py::arg("values"));

    m.def(
        "viterbi_map",
        [](const std::vector<double>& values, const std::optional<std::vector<double>>& times,
           double horizon, const std::string& family, const py::dict& hyper,
           const std::vector<double>& rates, const std::vector<double>& thetas) {
            const unicp::ObservationSeries series = make_series(values, times, horizon);
            const unicp::SegmentModelSpec spec = make_spec(family, hyper);
            const unicp::ViterbiPath path = unicp::viterbi_map(series, spec, rates, thetas);
            py::dict out;
            out["serials"] = path.sample.serial_indices;
            out["locations"] = path.sample.locations;
            out["log_score"] = path.log_score;
            return out;
        },
        py::arg("values"), py::arg("times") = py::none(), py::arg("horizon") = -1.0,
        py::arg("family") = "normal", py::arg("hyperparams") = py::dict(), py::arg("rates"),
        py::arg("thetas"));

    m.def(
        "map_count",
        [](const std::vector<std::size_t>& counts) {
            unicp::PosteriorArchive archive;
            for (std::size_t m_value : counts) {
                unicp::ChangepointSample draw;
                draw.count = m_value;
                archive.draws.push_back(draw);
            }
            return unicp::map_count(archive);
        },
        py::arg("counts"));
}
