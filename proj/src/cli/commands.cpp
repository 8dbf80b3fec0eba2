#include <algorithm>
#include <cmath>
#include <ostream>

#include "peca/cli.hpp"
#include "peca/format.hpp"
#include "peca/multi_threshold.hpp"
#include "peca/null_single.hpp"

namespace peca::cli {

namespace {

Json optional_number(std::optional<double> value) {
    if (!value || !std::isfinite(*value)) return nullptr;
    return *value;
}

Json number_or_null(double value) {
    if (!std::isfinite(value)) return nullptr;
    return value;
}

Json config_json(const AnalysisConfig& c) {
    return Json{{"delta", c.delta},         {"qlo", c.qlo},
                {"qhi", c.qhi},             {"m", c.m},
                {"replicates", c.replicates}, {"alpha", c.alpha},
                {"adjust", std::string(to_string(c.adjust))}, {"seed", c.seed},
                {"preprocess", c.preprocess}, {"window", c.window},
                {"min_blocks", c.min_blocks}, {"band_level", c.band_level}};
}

Json series_json(const DatedSeries& s, const EventSeries& e) {
    return Json{{"start", format_date(s.start)},
                {"end", format_date(s.end())},
                {"length", s.series.length()},
                {"n_events", e.count()}};
}

Json gev_json(const GevParams& p) {
    return Json{{"shape", p.shape}, {"location", p.location}, {"scale", p.scale}};
}

Json fit_json(const GevFit& fit, std::size_t n_blocks) {
    return Json{{"n_blocks", n_blocks},
                {"nll", fit.nll},
                {"initial_nll", fit.initial_nll},
                {"evaluations", fit.evaluations},
                {"restarts", fit.restarts},
                {"converged", fit.converged}};
}

struct Prepared {
    TimeSeries x;
    GevFit fit;
    std::size_t n_blocks = 0;
    std::vector<Warning> warnings;
};

Prepared prepare(const AnalysisConfig& config, const DatedSeries& series, const DatedEvents& events) {
    config.validate();
    if (config.delta >= series.series.length()) throw_invalid("time tolerance must be smaller than the series length");
    Prepared p;
    p.x = config.preprocess ? preprocess(series.series, config.window) : series.series;
    p.warnings = series.warnings;
    p.warnings.insert(p.warnings.end(), events.warnings.begin(), events.warnings.end());

    const std::vector<double> maxima = block_maxima(p.x, config.delta);
    p.n_blocks = maxima.size();
    GevFitOptions options;
    options.min_samples = config.min_blocks;
    p.fit = fit_gev_mle(maxima, options);
    if (p.fit.params.shape <= options.min_shape + 1e-6 || p.fit.params.shape >= options.max_shape - 1e-6) {
        p.warnings.push_back({"gev_shape_at_bound", "fitted GEV shape " + format_double(p.fit.params.shape) +
                                                        " lies on the search bound"});
    }

    const auto late = events_past_horizon(events.events, config.delta);
    if (!late.empty()) {
        std::string days;
        for (std::size_t t : late) {
            if (!days.empty()) days += ", ";
            days += format_date(series.date_of(t));
        }
        p.warnings.push_back({"events_past_horizon",
                              std::to_string(late.size()) + " event(s) in the final " + std::to_string(config.delta) +
                                  " days cannot coincide but count in the denominator: " + days});
    }
    return p;
}

}  // namespace

void AnalysisConfig::validate() const {
    if (!(qlo >= 0.0 && qhi <= 1.0 && qlo <= qhi)) throw_invalid("quantile range must satisfy 0 <= qlo <= qhi <= 1");
    if (m == 0) throw_invalid("ladder size must be at least 1");
    if (m > 1 && !(qlo < qhi)) throw_invalid("qlo must be smaller than qhi when m > 1");
    if (replicates == 0) throw_invalid("at least one Monte Carlo replicate is required");
    if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("alpha must lie in (0, 1)");
    if (window == 0) throw_invalid("preprocessing window must be positive");
    if (min_blocks < 3) throw_invalid("at least three blocks are needed for a GEV fit");
    if (!(band_level > 0.0 && band_level < 1.0)) throw_invalid("band level must lie in (0, 1)");
}

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::invalid_argument: return 3;
        case ErrorCategory::input: return 4;
        case ErrorCategory::numerical: return 5;
        case ErrorCategory::io: return 6;
    }
    return 1;
}

Json run_pointwise(const AnalysisConfig& config, const DatedSeries& series, const DatedEvents& events,
                   const ThresholdChoice& threshold) {
    if (threshold.tau.has_value() == threshold.quantile.has_value()) {
        throw_invalid("exactly one of tau or quantile must be given");
    }
    const Prepared p = prepare(config, series, events);
    const EventSeries& e = events.events;

    double tau = 0.0;
    Json threshold_json;
    if (threshold.tau) {
        tau = *threshold.tau;
        if (!std::isfinite(tau)) throw_invalid("threshold must be finite");
        threshold_json = Json{{"tau", tau}, {"quantile", nullptr}};
    } else {
        const double q = *threshold.quantile;
        if (!(q >= 0.0 && q <= 1.0)) throw_invalid("quantile must lie in [0, 1]");
        std::vector<double> sorted(p.x.values().begin(), p.x.values().end());
        std::sort(sorted.begin(), sorted.end());
        tau = empirical_quantile(sorted, q);
        threshold_json = Json{{"tau", tau}, {"quantile", q}};
    }

    const CoincidenceResult coincidences = count_trigger_exceedances(e, p.x, tau, config.delta);
    const PointwiseTestResult gev = gev_null_pvalue(coincidences.count, coincidences.n_events, tau, p.fit.params);
    const double p_a = estimate_event_rate(exceedance_series(p.x, tau));
    const PointwiseTestResult bernoulli =
        bernoulli_null_pvalue(coincidences.count, coincidences.n_events, p_a, config.delta);

    Json report;
    report["command"] = "pointwise";
    report["config"] = config_json(config);
    report["series"] = series_json(series, e);
    report["threshold"] = threshold_json;
    report["coincidences"] = Json{{"k", coincidences.count},
                                  {"n_events", coincidences.n_events},
                                  {"rate", optional_number(coincidences.rate())}};
    report["gev_test"] = Json{{"success_probability", gev.success_prob},
                              {"p_value", gev.p_value},
                              {"reject", gev.p_value < config.alpha}};
    report["bernoulli_test"] = Json{{"event_rate", p_a},
                                    {"success_probability", bernoulli.success_prob},
                                    {"p_value", bernoulli.p_value},
                                    {"reject", bernoulli.p_value < config.alpha}};
    report["gev"] = gev_json(p.fit.params);
    report["fit"] = fit_json(p.fit, p.n_blocks);
    report["warnings"] = to_json(p.warnings);
    return report;
}

MultiReport run_multi(const AnalysisConfig& config, const DatedSeries& series, const DatedEvents& events) {
    Prepared p = prepare(config, series, events);
    const EventSeries& e = events.events;

    const ThresholdLadder ladder = build_ladder_from_quantiles(p.x, config.qlo, config.qhi, config.m);
    if (ladder.size() < ladder.requested_size()) {
        p.warnings.push_back({"thresholds_collapsed", std::to_string(ladder.requested_size() - ladder.size()) +
                                                          " tied threshold(s) collapsed; effective M = " +
                                                          std::to_string(ladder.size())});
    }
    const std::vector<double> pis = success_probabilities(ladder, p.fit.params);

    const MultiTestResult test =
        mc_multi_threshold_test(e, p.x, config.delta, ladder, p.fit.params, config.replicates, config.seed,
                                config.workers);
    const std::vector<BandPoint> band = expected_process_with_band(e.count(), pis, config.band_level);

    std::vector<double> raw;
    for (const auto& r : pointwise_tests_along_ladder(e, p.x, config.delta, ladder, p.fit.params)) {
        raw.push_back(r.p_value);
    }
    const AdjustedPValues adjusted = adjust(raw, config.adjust);
    const std::vector<bool> rejected = reject_set(adjusted, config.alpha);

    MultiReport out;
    out.qtr.n_events = e.count();
    const double n = static_cast<double>(e.count());
    for (std::size_t m = 0; m < ladder.size(); ++m) {
        QtrRow row;
        row.level = ladder.levels()[m];
        row.threshold = ladder.thresholds()[m];
        row.k = test.observed.counts()[m];
        if (e.count() > 0) {
            row.rate = static_cast<double>(row.k) / n;
            row.expected_rate = pis[m];
            row.band_lower_rate = static_cast<double>(band[m].lower) / n;
            row.band_upper_rate = static_cast<double>(band[m].upper) / n;
        }
        out.qtr.rows.push_back(row);
    }

    Json ladder_json{{"requested_size", ladder.requested_size()},
                     {"size", ladder.size()},
                     {"levels", std::vector<double>(ladder.levels().begin(), ladder.levels().end())},
                     {"thresholds", std::vector<double>(ladder.thresholds().begin(), ladder.thresholds().end())},
                     {"success_probabilities", pis}};

    std::vector<double> expectation;
    std::vector<std::size_t> lower, upper;
    for (const auto& b : band) {
        expectation.push_back(b.expectation);
        lower.push_back(b.lower);
        upper.push_back(b.upper);
    }

    Json& report = out.report;
    report["command"] = "multi";
    report["config"] = config_json(config);
    report["series"] = series_json(series, e);
    report["gev"] = gev_json(p.fit.params);
    report["fit"] = fit_json(p.fit, p.n_blocks);
    report["ladder"] = ladder_json;
    report["tcp"] = Json{{"counts", std::vector<std::size_t>(test.observed.counts().begin(), test.observed.counts().end())},
                         {"expected", expectation},
                         {"band_lower", lower},
                         {"band_upper", upper}};
    report["test"] = Json{{"statistic", number_or_null(test.statistic)},
                          {"replicates", test.replicates},
                          {"exceedances", test.exceedances},
                          {"p_hat", test.p_hat},
                          {"seed", test.seed},
                          {"reject", test.p_hat < config.alpha},
                          {"null_statistics", Json{{"min", number_or_null(test.null_summary.min)},
                                                   {"median", number_or_null(test.null_summary.median)},
                                                   {"max", number_or_null(test.null_summary.max)}}}};
    report["pointwise"] = Json{{"method", std::string(to_string(adjusted.method))},
                               {"raw", adjusted.raw},
                               {"adjusted", adjusted.adjusted},
                               {"reject", std::vector<bool>(rejected.begin(), rejected.end())},
                               {"any_reject", std::any_of(rejected.begin(), rejected.end(), [](bool b) { return b; })}};
    report["diagnostics"] = Json{{"gev_admissibility_sup_distance", gev_admissibility_distance(test, pis)}};
    report["warnings"] = to_json(p.warnings);
    return out;
}

void write_qtr_csv(std::ostream& out, const QtrTable& table) {
    out << "level,threshold,k,rate,expected_rate,band_lower_rate,band_upper_rate\n";
    for (const auto& row : table.rows) {
        out << format_double(row.level) << ',' << format_double(row.threshold) << ',' << row.k << ','
            << (row.rate ? format_double(*row.rate) : std::string()) << ',' << format_double(row.expected_rate) << ','
            << format_double(row.band_lower_rate) << ',' << format_double(row.band_upper_rate) << '\n';
    }
}

}  // namespace peca::cli
