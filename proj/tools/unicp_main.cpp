// Command line front end: generate synthetic benchmarks, run the sampler,
// re-summarize persisted draws, and compute MAP segmentations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "unicp/errors.hpp"
#include "unicp/ffbs.hpp"
#include "unicp/gibbs.hpp"
#include "unicp/io.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/summary.hpp"
#include "unicp/viterbi.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

struct RunOptions {
    std::string input;
    std::string preset;
    std::string config_file;
    std::string outdir = "out";
    std::string family = "normal";

    unicp::CsvOptions csv;

    double prior_mean = 0.0;
    double prior_var = 1.0;
    double noise_var = 1.0;
    double shape = 1.0;
    double rate = 1.0;

    long iterations = 6000;
    long burn_in = 3000;
    double resolution = 10.0;
    int prune_repeats = 5;
    long l_cap = 250;
    long seed = -1;
    long init_m = -1;  // -1: cusum corner count
    double prior_a = -1.0;
    double prior_b = -1.0;
    int chains = 1;
    bool constant_rate = false;
    bool quiet = false;

    double hpd_mass = 0.95;
    long bin_width = 0;
};

// Study-scale sampler settings per benchmark preset, applied when the
// corresponding flags were not given.
void apply_preset_scale(RunOptions& opt, bool iterations_set, bool burn_set,
                        bool resolution_set) {
    long iterations = opt.iterations;
    long burn_in = opt.burn_in;
    double resolution = opt.resolution;
    if (opt.preset == "normal-1200") {
        iterations = 6000;
        burn_in = 3000;
        resolution = 15.0;
    } else if (opt.preset == "exponential-10000") {
        iterations = 1500;
        burn_in = 1000;
        resolution = 10.0;
    } else if (opt.preset == "poisson-custom") {
        iterations = 5000;
        burn_in = 2000;
        resolution = 15.0;
    } else {
        return;
    }
    if (!iterations_set) opt.iterations = iterations;
    if (!burn_set) opt.burn_in = burn_in;
    if (!resolution_set) opt.resolution = resolution;
}

unicp::SegmentModelSpec spec_from(const RunOptions& opt) {
    const unicp::ModelFamily family = unicp::family_from_string(opt.family);
    switch (family) {
        case unicp::ModelFamily::normal_known_variance:
            return unicp::SegmentModelSpec::normal(opt.prior_mean, opt.prior_var, opt.noise_var);
        case unicp::ModelFamily::exponential:
            return unicp::SegmentModelSpec::exponential(opt.shape, opt.rate);
        case unicp::ModelFamily::poisson:
            return unicp::SegmentModelSpec::poisson(opt.shape, opt.rate);
    }
    throw unicp::input_error("unreachable family");
}

// Run-spec file values fill in any option the command line left at its
// default; flags win.
void apply_run_spec(const std::string& path, CLI::App* cmd) {
    for (const auto& [key, value] : unicp::parse_run_spec(path)) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw unicp::input_error("run spec: unknown key '" + key + "'");
        }
        if (opt->count() == 0) {
            opt->add_result(value);
            opt->run_callback();
        }
    }
}

unicp::ObservationSeries load_series(const RunOptions& opt,
                                     unicp::SegmentModelSpec* spec_out) {
    if (!opt.preset.empty()) {
        unicp::BenchmarkData data =
            unicp::generate_benchmark(opt.preset, static_cast<std::uint64_t>(opt.seed));
        if (spec_out != nullptr) *spec_out = data.spec;
        return std::move(data.series);
    }
    if (opt.input.empty()) {
        throw unicp::input_error("either --input or --preset is required");
    }
    if (spec_out != nullptr) *spec_out = spec_from(opt);
    return unicp::ingest_csv(opt.input, opt.csv);
}

int cmd_generate(const std::string& preset, long seed, const std::string& out_path,
                 const std::string& truth_path) {
    const unicp::BenchmarkData data =
        unicp::generate_benchmark(preset, static_cast<std::uint64_t>(seed));
    std::ofstream out(out_path);
    if (!out) throw unicp::io_error("cannot write " + out_path);
    out << "value\n";
    char buf[40];
    for (double y : data.series.values) {
        std::snprintf(buf, sizeof(buf), "%.17g", y);
        out << buf << '\n';
    }
    if (!truth_path.empty()) {
        std::ofstream truth(truth_path);
        if (!truth) throw unicp::io_error("cannot write " + truth_path);
        truth << "changepoint_serial\n";
        for (int cp : data.true_changepoints) truth << cp << '\n';
        truth << "# segment_params";
        for (double p : data.true_params) truth << ' ' << p;
        truth << '\n';
    }
    std::cout << "wrote " << data.series.size() << " observations to " << out_path << "\n";
    return kExitOk;
}

int cmd_run(const RunOptions& opt) {
    unicp::SegmentModelSpec spec;
    const unicp::ObservationSeries series = load_series(opt, &spec);

    std::size_t m0;
    if (opt.init_m >= 0) {
        m0 = static_cast<std::size_t>(opt.init_m);
    } else {
        m0 = unicp::cusum_corner_count(unicp::cusum_diagnostic(series));
    }

    unicp::GibbsConfig config = unicp::default_config(series, m0);
    config.iterations = static_cast<std::size_t>(opt.iterations);
    config.burn_in = static_cast<std::size_t>(opt.burn_in);
    config.resolution = opt.resolution;
    config.prune_repeats = opt.prune_repeats;
    config.l_cap = static_cast<std::size_t>(opt.l_cap);
    config.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.prior_a > 0.0) config.init_rates.prior_shape = opt.prior_a;
    if (opt.prior_b > 0.0) config.init_rates.prior_rate = opt.prior_b;
    if (!opt.quiet) {
        config.progress = [&](std::size_t iter, std::size_t m, std::size_t k) {
            if (iter % 500 == 0 || iter == config.iterations) {
                std::cerr << "iteration " << iter << "/" << config.iterations << "  m=" << m
                          << "  K=" << k << "\n";
            }
        };
    }

    unicp::PosteriorArchive archive;
    if (opt.chains <= 1) {
        archive = opt.constant_rate ? unicp::constant_rate_run(series, spec, config)
                                    : unicp::gibbs_run(series, spec, config);
    } else {
        std::vector<unicp::PosteriorArchive> archives(static_cast<std::size_t>(opt.chains));
        std::vector<std::thread> workers;
        workers.reserve(archives.size());
        for (std::size_t c = 0; c < archives.size(); ++c) {
            unicp::GibbsConfig chain_config = config;
            chain_config.seed = config.seed + c;
            chain_config.progress = nullptr;
            workers.emplace_back([&, c, chain_config]() {
                archives[c] = opt.constant_rate
                                  ? unicp::constant_rate_run(series, spec, chain_config)
                                  : unicp::gibbs_run(series, spec, chain_config);
            });
        }
        for (std::thread& w : workers) w.join();
        archive = unicp::merge_archives(std::move(archives));
    }

    if (archive.draws.empty()) {
        throw unicp::runtime_abort("sampler produced no retained draws: " +
                                   archive.termination_reason);
    }

    unicp::SummaryOptions sopt;
    sopt.hpd_mass = opt.hpd_mass;
    sopt.histogram_bin_width = static_cast<std::size_t>(opt.bin_width);
    const unicp::SummaryReport report = unicp::summarize(series, spec, archive, sopt);
    unicp::emit_outputs(archive, report, opt.outdir);

    std::cout << "retained " << archive.retained() << " draws; MAP changepoint count "
              << report.map_changepoint_count << "\n";
    if (report.has_map_locations) {
        std::cout << "MAP locations:";
        for (int serial : report.map_locations) std::cout << ' ' << serial;
        std::cout << "\n";
    }
    std::cout << "outputs in " << opt.outdir << "\n";
    if (archive.terminated_early) {
        std::cerr << "terminated early: " << archive.termination_reason << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_summarize(const std::string& samples_path, std::size_t n_observations,
                  double hpd_mass, long bin_width, const std::string& outdir) {
    const unicp::PersistedDraws persisted = unicp::read_samples_csv(samples_path);
    unicp::SummaryOptions sopt;
    sopt.hpd_mass = hpd_mass;
    sopt.histogram_bin_width = static_cast<std::size_t>(bin_width);
    const unicp::SummaryReport report =
        unicp::summarize_draws_only(n_observations, persisted.draws, sopt);

    unicp::PosteriorArchive archive;
    archive.draws = persisted.draws;
    archive.draw_iterations = persisted.iterations;
    archive.iterations = persisted.iterations.empty() ? 0 : persisted.iterations.back();
    unicp::emit_outputs(archive, report, outdir);
    std::cout << "MAP changepoint count " << report.map_changepoint_count << "; outputs in "
              << outdir << "\n";
    return kExitOk;
}

int cmd_viterbi(const RunOptions& opt, const std::vector<double>& rates,
                const std::vector<double>& thetas) {
    unicp::SegmentModelSpec spec;
    const unicp::ObservationSeries series = load_series(opt, &spec);
    const unicp::ViterbiPath path = unicp::viterbi_map(series, spec, rates, thetas);
    std::cout << "log score " << path.log_score << "\nMAP locations:";
    for (int serial : path.sample.serial_indices) std::cout << ' ' << serial;
    std::cout << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian multiple changepoint detection on a randomized uniform grid"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic benchmark series as CSV");
    std::string gen_preset;
    long gen_seed = 1;
    std::string gen_out = "data.csv";
    std::string gen_truth;
    gen->add_option("--preset", gen_preset,
                    "normal-1200 | exponential-10000 | poisson-custom")->required();
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--out", gen_out, "output CSV path");
    gen->add_option("--truth", gen_truth, "also write the true segmentation");

    // run
    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "run the sampler and write posterior outputs");
    run->add_option("--input", run_opt.input, "input CSV path");
    run->add_option("--preset", run_opt.preset, "generate this benchmark instead of reading");
    run->add_option("--config", run_opt.config_file, "run spec file (key = value lines)");
    run->add_option("--value-col", run_opt.csv.value_column, "value column index");
    run->add_option("--time-col", run_opt.csv.time_column, "event time column index");
    run->add_option("--rescale-offset", run_opt.csv.rescale_offset, "subtract before scaling");
    run->add_option("--rescale-scale", run_opt.csv.rescale_scale, "divide after offsetting");
    run->add_option("--horizon", run_opt.csv.horizon, "observation window length");
    run->add_option("--family", run_opt.family, "normal | exponential | poisson");
    run->add_option("--prior-mean", run_opt.prior_mean, "normal: prior mean of the segment mean");
    run->add_option("--prior-var", run_opt.prior_var, "normal: prior variance");
    run->add_option("--noise-var", run_opt.noise_var, "normal: known noise variance");
    run->add_option("--shape", run_opt.shape, "gamma prior shape");
    run->add_option("--rate", run_opt.rate, "gamma prior rate");
    run->add_option("--iterations", run_opt.iterations, "total sampler iterations");
    run->add_option("--burn-in", run_opt.burn_in, "discarded iterations");
    run->add_option("--resolution", run_opt.resolution, "grid intensity multiplier k");
    run->add_option("--prune-repeats", run_opt.prune_repeats, "backward draws kept per step");
    run->add_option("--l-cap", run_opt.l_cap, "uniformization event cap");
    run->add_option("--seed", run_opt.seed, "sampler seed")->required();
    run->add_option("--init-m", run_opt.init_m, "initial changepoint count");
    run->add_option("--prior-a", run_opt.prior_a, "rate hyperprior shape");
    run->add_option("--prior-b", run_opt.prior_b, "rate hyperprior rate");
    run->add_option("--chains", run_opt.chains, "independent chains to merge");
    run->add_flag("--constant-rate", run_opt.constant_rate, "homogeneous-intensity baseline");
    run->add_flag("--quiet", run_opt.quiet, "suppress progress lines");
    run->add_option("--outdir", run_opt.outdir, "output directory");
    run->add_option("--hpd", run_opt.hpd_mass, "HPD interval mass");
    run->add_option("--bin-width", run_opt.bin_width, "histogram bin width (0 = auto)");

    // summarize
    auto* summ = app.add_subcommand("summarize", "re-summarize a persisted samples.csv");
    std::string summ_samples;
    long summ_n = 0;
    double summ_hpd = 0.95;
    long summ_bin = 0;
    std::string summ_outdir = "out";
    summ->add_option("--samples", summ_samples, "samples.csv path")->required();
    summ->add_option("--n", summ_n, "number of observations in the original series")->required();
    summ->add_option("--hpd", summ_hpd, "HPD interval mass");
    summ->add_option("--bin-width", summ_bin, "histogram bin width (0 = auto)");
    summ->add_option("--outdir", summ_outdir, "output directory");

    // viterbi
    RunOptions vit_opt;
    vit_opt.seed = 1;
    std::vector<double> vit_rates;
    std::vector<double> vit_thetas;
    auto* vit = app.add_subcommand("viterbi", "MAP locations for fixed rates and thetas");
    vit->add_option("--input", vit_opt.input, "input CSV path");
    vit->add_option("--preset", vit_opt.preset, "benchmark preset instead of a file");
    vit->add_option("--seed", vit_opt.seed, "benchmark seed when using --preset");
    vit->add_option("--value-col", vit_opt.csv.value_column, "value column index");
    vit->add_option("--time-col", vit_opt.csv.time_column, "event time column index");
    vit->add_option("--rescale-offset", vit_opt.csv.rescale_offset, "subtract before scaling");
    vit->add_option("--rescale-scale", vit_opt.csv.rescale_scale, "divide after offsetting");
    vit->add_option("--horizon", vit_opt.csv.horizon, "observation window length");
    vit->add_option("--family", vit_opt.family, "normal | exponential | poisson");
    vit->add_option("--prior-mean", vit_opt.prior_mean, "normal prior mean");
    vit->add_option("--prior-var", vit_opt.prior_var, "normal prior variance");
    vit->add_option("--noise-var", vit_opt.noise_var, "normal noise variance");
    vit->add_option("--shape", vit_opt.shape, "gamma prior shape");
    vit->add_option("--rate", vit_opt.rate, "gamma prior rate");
    vit->add_option("--rates", vit_rates, "m+1 segment jump rates")
        ->required()
        ->delimiter(',');
    vit->add_option("--thetas", vit_thetas, "m+1 segment parameters")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_generate(gen_preset, gen_seed, gen_out, gen_truth);
        if (run->parsed()) {
            if (!run_opt.config_file.empty()) apply_run_spec(run_opt.config_file, run);
            if (!run_opt.preset.empty()) {
                apply_preset_scale(run_opt, run->count("--iterations") > 0,
                                   run->count("--burn-in") > 0,
                                   run->count("--resolution") > 0);
            }
            return cmd_run(run_opt);
        }
        if (summ->parsed()) {
            return cmd_summarize(summ_samples, static_cast<std::size_t>(summ_n), summ_hpd,
                                 summ_bin, summ_outdir);
        }
        if (vit->parsed()) return cmd_viterbi(vit_opt, vit_rates, vit_thetas);
        return kExitInput;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const unicp::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const unicp::runtime_abort& e) {
        std::cerr << "runtime abort: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const unicp::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
