#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "peca/adjust.hpp"
#include "peca/core_series.hpp"
#include "peca/error.hpp"

namespace peca::cli {

using Json = nlohmann::ordered_json;
using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD; empty on malformed or impossible dates.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

struct Warning {
    std::string code;
    std::string message;
};

Json to_json(const std::vector<Warning>& warnings);

struct AnalysisConfig {
    std::size_t delta = 7;
    double qlo = 0.75;
    double qhi = 1.0;
    std::size_t m = 32;
    std::size_t replicates = 10000;
    double alpha = 0.05;
    AdjustMethod adjust = AdjustMethod::holm;
    std::uint64_t seed = 1;
    bool preprocess = false;
    std::size_t window = 30;
    std::size_t min_blocks = 20;
    double band_level = 0.95;
    unsigned workers = 0;  // 0: hardware concurrency; never affects results

    void validate() const;
};

/// A daily series anchored at a calendar date; day t (1-based) is start + t - 1.
struct DatedSeries {
    Date start;
    TimeSeries series;
    std::vector<Warning> warnings;

    Date date_of(std::size_t t) const { return start + std::chrono::days(static_cast<long>(t) - 1); }
    Date end() const { return date_of(series.length()); }
};

/// Reads a `date,value` CSV with one row per day. Missing days are an error
/// unless `fill_zero` is set, in which case they are inserted as zeros.
DatedSeries ingest_timeseries(std::istream& in, bool fill_zero = false);
DatedSeries ingest_timeseries(const std::filesystem::path& path, bool fill_zero = false);

struct DatedEvents {
    EventSeries events;
    std::vector<Warning> warnings;
};

/// Reads one ISO date per line (blank lines and `#` comments ignored) and
/// maps the dates onto the day grid of `grid`.
DatedEvents ingest_events(std::istream& in, const DatedSeries& grid);
DatedEvents ingest_events(const std::filesystem::path& path, const DatedSeries& grid);

struct ThresholdChoice {
    std::optional<double> tau;
    std::optional<double> quantile;
};

/// Single-threshold analysis. Report keys, in order: command, config,
/// series, threshold, coincidences, gev_test, bernoulli_test, gev, fit,
/// warnings.
Json run_pointwise(const AnalysisConfig& config, const DatedSeries& series, const DatedEvents& events,
                   const ThresholdChoice& threshold);

struct QtrRow {
    double level = 0.0;
    double threshold = 0.0;
    std::size_t k = 0;
    std::optional<double> rate;
    double expected_rate = 0.0;
    double band_lower_rate = 0.0;
    double band_upper_rate = 0.0;
};

struct QtrTable {
    std::size_t n_events = 0;
    std::vector<QtrRow> rows;
};

struct MultiReport {
    Json report;
    QtrTable qtr;
};

/// Multiple-threshold analysis with the Monte Carlo test, the pointwise
/// tests and their adjustment. Report keys, in order: command, config,
/// series, gev, fit, ladder, tcp, test, pointwise, diagnostics, warnings.
MultiReport run_multi(const AnalysisConfig& config, const DatedSeries& series, const DatedEvents& events);

/// CSV: level,threshold,k,rate,expected_rate,band_lower_rate,band_upper_rate.
void write_qtr_csv(std::ostream& out, const QtrTable& table);

/// Line chart of observed, expected and band rates against quantile level.
void write_qtr_svg(std::ostream& out, const QtrTable& table, std::string_view title);

/// Writes the files of a simulation preset into `out_dir` and returns their paths.
/// Presets: appendix-b1, fig4, demo.
std::vector<std::filesystem::path> run_simulate(std::string_view preset, std::uint64_t seed,
                                                const std::filesystem::path& out_dir, unsigned workers = 0);

/// Process exit code for an error category.
int exit_code(ErrorCategory category);

}  // namespace peca::cli
