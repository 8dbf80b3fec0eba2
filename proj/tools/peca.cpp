// peca: event coincidence analysis of events against peaks in a daily series.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "peca/cli.hpp"

namespace {

using peca::cli::Json;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw peca::Error(peca::ErrorCategory::io, "cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw peca::Error(peca::ErrorCategory::io, "failed writing " + path);
}

void emit_report(const Json& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_file(path, text);
    }
}

int report_error(peca::ErrorCategory category, const std::string& message) {
    const Json error{{"error", Json{{"category", std::string(peca::to_string(category))}, {"message", message}}}};
    std::cerr << error.dump() << '\n';
    return peca::cli::exit_code(category);
}

struct CommonOptions {
    std::string series;
    std::string events;
    std::string report;
    bool fill_zero = false;
};

void add_common(CLI::App* cmd, CommonOptions& common, peca::cli::AnalysisConfig& config) {
    cmd->add_option("--series", common.series, "CSV file with header date,value")->required();
    cmd->add_option("--events", common.events, "Text file with one YYYY-MM-DD event date per line")->required();
    cmd->add_option("--delta", config.delta, "Time tolerance in days")->capture_default_str();
    cmd->add_flag("--preprocess", config.preprocess, "Apply log2(x+1) minus the running mean of previous days");
    cmd->add_option("--window", config.window, "Running-mean window for --preprocess")->capture_default_str();
    cmd->add_flag("--fill-zero", common.fill_zero, "Insert zeros for missing days instead of failing");
    cmd->add_option("--min-blocks", config.min_blocks, "Minimum number of block maxima for the GEV fit")
        ->capture_default_str();
    cmd->add_option("--alpha", config.alpha, "Significance level")->capture_default_str();
    cmd->add_option("--report", common.report, "JSON report path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event coincidence analysis between event dates and peaks in a daily time series"};
    app.require_subcommand(1);

    peca::cli::AnalysisConfig config;
    CommonOptions common;

    auto* pointwise = app.add_subcommand("pointwise", "Single-threshold trigger coincidence test");
    add_common(pointwise, common, config);
    std::optional<double> tau, quantile;
    auto* tau_opt = pointwise->add_option("--tau", tau, "Absolute threshold");
    auto* q_opt = pointwise->add_option("--quantile", quantile, "Threshold as an empirical quantile level");
    tau_opt->excludes(q_opt);
    q_opt->excludes(tau_opt);

    auto* multi = app.add_subcommand("multi", "Multiple-threshold test with QTR output");
    add_common(multi, common, config);
    std::string adjust_name = "holm";
    std::string qtr_path, svg_path;
    multi->add_option("--qlo", config.qlo, "Lowest quantile level of the ladder")->capture_default_str();
    multi->add_option("--qhi", config.qhi, "Highest quantile level of the ladder")->capture_default_str();
    multi->add_option("--m", config.m, "Number of thresholds")->capture_default_str();
    multi->add_option("--r", config.replicates, "Monte Carlo replicates")->capture_default_str();
    multi->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    multi->add_option("--adjust", adjust_name, "bonferroni, sidak, holm or holm-sidak")->capture_default_str();
    multi->add_option("--band-level", config.band_level, "Coverage of the pointwise band")->capture_default_str();
    multi->add_option("--threads", config.workers, "Worker threads (0: all cores)")->capture_default_str();
    multi->add_option("--qtr", qtr_path, "QTR table CSV path");
    multi->add_option("--svg", svg_path, "QTR plot SVG path");

    auto* simulate = app.add_subcommand("simulate", "Write synthetic datasets and simulation studies");
    std::string preset, out_dir;
    std::uint64_t sim_seed = 1;
    unsigned sim_workers = 0;
    simulate->add_option("--preset", preset, "appendix-b1, fig4 or demo")->required();
    simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--threads", sim_workers, "Worker threads (0: all cores)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*simulate) {
            for (const auto& path : peca::cli::run_simulate(preset, sim_seed, out_dir, sim_workers)) {
                std::cout << path.string() << '\n';
            }
            return 0;
        }

        const auto series = peca::cli::ingest_timeseries(std::filesystem::path(common.series), common.fill_zero);
        const auto events = peca::cli::ingest_events(std::filesystem::path(common.events), series);

        if (*pointwise) {
            if (!tau && !quantile) {
                return report_error(peca::ErrorCategory::invalid_argument, "one of --tau or --quantile is required");
            }
            emit_report(peca::cli::run_pointwise(config, series, events, {tau, quantile}), common.report);
            return 0;
        }

        config.adjust = peca::parse_adjust_method(adjust_name);
        const auto result = peca::cli::run_multi(config, series, events);
        if (!qtr_path.empty()) {
            std::ostringstream csv;
            peca::cli::write_qtr_csv(csv, result.qtr);
            write_file(qtr_path, csv.str());
        }
        if (!svg_path.empty()) {
            std::ostringstream svg;
            char title[96];
            std::snprintf(title, sizeof title, "QTR plot (p-hat = %.4f, R = %zu)",
                          result.report["test"]["p_hat"].get<double>(), config.replicates);
            peca::cli::write_qtr_svg(svg, result.qtr, title);
            write_file(svg_path, svg.str());
        }
        emit_report(result.report, common.report);
        return 0;
    } catch (const peca::Error& e) {
        return report_error(e.category(), e.what());
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", Json{{"category", "internal"}, {"message", e.what()}}}}.dump() << '\n';
        return 1;
    }
}
