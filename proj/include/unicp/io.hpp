#ifndef UNICP_IO_HPP
#define UNICP_IO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unicp/gibbs.hpp"
#include "unicp/segment_models.hpp"
#include "unicp/series.hpp"
#include "unicp/summary.hpp"

namespace unicp {

struct CsvOptions {
    int value_column = 0;
    int time_column = -1;           // -1: regular placement
    double rescale_offset = 0.0;    // y' = (y - offset) / scale
    double rescale_scale = 1.0;
    double horizon = -1.0;          // <= 0: n (regular) or last time (explicit)
};

/// Reads a CSV file into a series. A non-numeric first row is treated as a
/// header. Parse failures report the line number.
ObservationSeries ingest_csv(const std::string& path, const CsvOptions& options = {});

struct BenchmarkData {
    ObservationSeries series;
    std::vector<int> true_changepoints;  // serial index of each new segment
    std::vector<double> true_params;     // one per segment
    SegmentModelSpec spec;               // family + the hyperparameters used in the studies
};

/// Synthetic benchmark presets: "normal-1200" (1200 Gaussian observations,
/// 10 mean shifts), "exponential-10000" (three sparse rate changes),
/// "poisson-custom" (quarterly-count style series with two level shifts).
/// Deterministic for a fixed seed.
BenchmarkData generate_benchmark(const std::string& preset, std::uint64_t seed);

/// Flat key = value run configuration; keys mirror the CLI flags.
std::map<std::string, std::string> parse_run_spec(const std::string& path);

/// Writes samples.csv, summary.json, histogram.csv and cusum.csv into
/// `outdir` (created if missing). Rejects an empty archive.
void emit_outputs(const PosteriorArchive& archive, const SummaryReport& report,
                  const std::string& outdir);

/// Reads the (iteration, m, serial indices) rows of a samples.csv back.
struct PersistedDraws {
    std::vector<std::size_t> iterations;
    std::vector<ChangepointSample> draws;
};
PersistedDraws read_samples_csv(const std::string& path);

}  // namespace unicp

#endif
