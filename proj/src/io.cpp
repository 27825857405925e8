#include "unicp/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace unicp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    return cells;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size();
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

ObservationSeries ingest_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    if (options.rescale_scale == 0.0) throw input_error("rescale scale must be nonzero");

    std::vector<double> values;
    std::vector<double> times;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        const int needed = std::max(options.value_column, options.time_column);
        if (needed >= static_cast<int>(cells.size())) {
            throw input_error("line " + std::to_string(line_no) + ": expected at least " +
                              std::to_string(needed + 1) + " columns");
        }
        double y = 0.0;
        if (!parse_double(cells[static_cast<std::size_t>(options.value_column)], y)) {
            if (first_data_line) {  // header row
                first_data_line = false;
                continue;
            }
            throw input_error("line " + std::to_string(line_no) + ": non-numeric value cell '" +
                              cells[static_cast<std::size_t>(options.value_column)] + "'");
        }
        first_data_line = false;
        values.push_back((y - options.rescale_offset) / options.rescale_scale);
        if (options.time_column >= 0) {
            double t = 0.0;
            if (!parse_double(cells[static_cast<std::size_t>(options.time_column)], t)) {
                throw input_error("line " + std::to_string(line_no) + ": non-numeric time cell");
            }
            times.push_back(t);
        }
    }
    if (values.empty()) throw input_error("no numeric rows in " + path);

    if (options.time_column >= 0) {
        const double horizon = options.horizon > 0.0 ? options.horizon : times.back();
        return ObservationSeries::with_times(std::move(values), std::move(times), horizon);
    }
    return ObservationSeries::regular(std::move(values), options.horizon);
}

namespace {

BenchmarkData make_benchmark(std::size_t n, const std::vector<int>& changepoints,
                             const std::vector<double>& params, const SegmentModelSpec& spec,
                             std::uint64_t seed) {
    BenchmarkData data;
    data.true_changepoints = changepoints;
    data.true_params = params;
    data.spec = spec;

    std::vector<double> values(n);
    std::mt19937_64 rng(seed);
    std::size_t segment = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const int serial = static_cast<int>(j) + 1;
        while (segment < changepoints.size() && serial >= changepoints[segment]) ++segment;
        switch (spec.family) {
            case ModelFamily::normal_known_variance: {
                std::normal_distribution<double> d(params[segment],
                                                   std::sqrt(spec.noise_var));
                values[j] = d(rng);
                break;
            }
            case ModelFamily::exponential: {
                std::exponential_distribution<double> d(params[segment]);
                values[j] = d(rng);
                break;
            }
            case ModelFamily::poisson: {
                std::poisson_distribution<long> d(params[segment]);
                values[j] = static_cast<double>(d(rng));
                break;
            }
        }
    }
    data.series = ObservationSeries::regular(std::move(values));
    return data;
}

}  // namespace

BenchmarkData generate_benchmark(const std::string& preset, std::uint64_t seed) {
    if (preset == "normal-1200") {
        return make_benchmark(
            1200, {101, 161, 261, 361, 481, 601, 701, 801, 901, 1001},
            {0.0, 3.0, 0.0, 2.0, 0.0, -2.0, 0.0, 3.0, 0.0, 3.0, 0.0},
            SegmentModelSpec::normal(1.5, 1.0, 1.0), seed);
    }
    if (preset == "exponential-10000") {
        return make_benchmark(10000, {3000, 5000, 7000}, {1.0, 3.0, 0.5, 2.0},
                              SegmentModelSpec::exponential(1.0, 1.0), seed);
    }
    if (preset == "poisson-custom") {
        return make_benchmark(280, {165, 249}, {2.5, 5.0, 2.0},
                              SegmentModelSpec::poisson(1.0, 1.0), seed);
    }
    throw input_error("unknown benchmark preset: " + preset);
}

std::map<std::string, std::string> parse_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::map<std::string, std::string> spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto trim = [](std::string s) {
            const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
            while (!s.empty() && is_space(s.back())) s.pop_back();
            std::size_t i = 0;
            while (i < s.size() && is_space(s[i])) ++i;
            return s.substr(i);
        };
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw input_error("run spec line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        spec[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return spec;
}

void emit_outputs(const PosteriorArchive& archive, const SummaryReport& report,
                  const std::string& outdir) {
    if (archive.draws.empty()) throw input_error("emit_outputs: empty archive");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw io_error("cannot create " + outdir + ": " + ec.message());

    const auto open_out = [&](const std::string& name) {
        std::ofstream out(fs::path(outdir) / name);
        if (!out) throw io_error("cannot write " + (fs::path(outdir) / name).string());
        return out;
    };

    {
        std::ofstream out = open_out("samples.csv");
        for (std::size_t i = 0; i < archive.draws.size(); ++i) {
            out << archive.draw_iterations[i] << ',' << archive.draws[i].count;
            for (int serial : archive.draws[i].serial_indices) out << ',' << serial;
            out << '\n';
        }
    }
    {
        std::ofstream out = open_out("histogram.csv");
        out << "serial,count\n";
        for (const auto& [left, count] : report.location_histogram) {
            out << left << ',' << count << '\n';
        }
    }
    if (!report.cusum.empty()) {
        std::ofstream out = open_out("cusum.csv");
        out << "index,cusum\n";
        for (std::size_t j = 0; j < report.cusum.size(); ++j) {
            out << (j + 1) << ',' << format_double(report.cusum[j]) << '\n';
        }
    }
    {
        nlohmann::json doc;
        nlohmann::json counts;
        for (const auto& [m, p] : report.count_posterior) {
            counts[std::to_string(m)] = p;
        }
        doc["count_posterior"] = counts;
        doc["map_changepoint_count"] = report.map_changepoint_count;
        doc["hpd_mass"] = report.hpd_mass;
        doc["histogram_bin_width"] = report.histogram_bin_width;
        doc["conditioning"] =
            "location and theta summaries use draws with the MAP count, matched by rank";
        doc["location_means"] = report.location_means;
        nlohmann::json lhpd = nlohmann::json::array();
        for (const HpdInterval& h : report.location_hpds) {
            lhpd.push_back({{"lower", h.lower}, {"upper", h.upper}});
        }
        doc["location_hpds"] = lhpd;
        doc["theta_means"] = report.theta_means;
        nlohmann::json thpd = nlohmann::json::array();
        for (const HpdInterval& h : report.theta_hpds) {
            thpd.push_back({{"lower", h.lower}, {"upper", h.upper}});
        }
        doc["theta_hpds"] = thpd;
        if (report.has_map_locations) doc["map_locations"] = report.map_locations;
        doc["retained_draws"] = archive.retained();
        doc["iterations"] = archive.iterations;
        doc["burn_in"] = archive.burn_in;
        if (archive.terminated_early) {
            doc["terminated_early"] = true;
            doc["termination_reason"] = archive.termination_reason;
        }
        std::ofstream out = open_out("summary.json");
        out << doc.dump(2) << '\n';
    }
}

PersistedDraws read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    PersistedDraws persisted;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() < 2) {
            throw input_error("samples line " + std::to_string(line_no) + ": too few columns");
        }
        double iter = 0.0;
        double m = 0.0;
        if (!parse_double(cells[0], iter) || !parse_double(cells[1], m)) {
            throw input_error("samples line " + std::to_string(line_no) + ": bad header cells");
        }
        ChangepointSample draw;
        draw.count = static_cast<std::size_t>(m);
        for (std::size_t c = 2; c < cells.size(); ++c) {
            double serial = 0.0;
            if (!parse_double(cells[c], serial)) {
                throw input_error("samples line " + std::to_string(line_no) +
                                  ": bad serial index");
            }
            draw.serial_indices.push_back(static_cast<int>(serial));
        }
        persisted.iterations.push_back(static_cast<std::size_t>(iter));
        persisted.draws.push_back(std::move(draw));
    }
    return persisted;
}

}  // namespace unicp
