#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "peca/cli.hpp"
#include "peca/format.hpp"
#include "peca/multi_threshold.hpp"
#include "peca/parallel.hpp"
#include "peca/sim.hpp"

namespace peca::cli {

namespace {

namespace fs = std::filesystem;

// Severe Islamist terrorist attacks in Western Europe and North America, 2015-2017.
constexpr std::array<const char*, 17> attack_dates{
    "2015-01-07", "2015-11-13", "2015-12-02", "2016-03-22", "2016-06-12", "2016-07-14",
    "2016-07-24", "2016-09-17", "2016-11-28", "2016-12-19", "2017-03-22", "2017-04-07",
    "2017-05-22", "2017-06-03", "2017-08-17", "2017-09-15", "2017-10-31"};

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCategory::io, "cannot create directory " + dir_.string() + ": " + ec.message());
    }

    template <class Writer>
    void write(const std::string& name, Writer&& writer) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string());
        writer(out);
        out.flush();
        if (!out) throw Error(ErrorCategory::io, "failed writing " + path.string());
        written_.push_back(path);
    }

    std::vector<fs::path> written() && { return std::move(written_); }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

void write_series_csv(std::ostream& out, Date start, const TimeSeries& x) {
    out << "date,value\n";
    for (std::size_t t = 1; t <= x.length(); ++t) {
        out << format_date(start + std::chrono::days(t - 1)) << ',' << format_double(x.at(t)) << '\n';
    }
}

void write_event_dates(std::ostream& out, Date start, const EventSeries& e) {
    for (std::size_t t : e.occurrences()) out << format_date(start + std::chrono::days(t - 1)) << '\n';
}

Json gev_json(const GevParams& p) {
    return Json{{"shape", p.shape}, {"location", p.location}, {"scale", p.scale}};
}

void appendix_b(std::uint64_t seed, unsigned workers, OutputSet& out) {
    // Null-distribution comparison across MA orders.
    sim::SimConfig config;
    config.seed = derive_seed(seed, 1);
    config.workers = workers;
    const sim::NullComparison comparison = sim::null_distribution_comparison(config);
    out.write("null_comparison.csv", [&](std::ostream& os) { sim::write_comparison_csv(os, comparison); });
    out.write("null_comparison_summary.csv", [&](std::ostream& os) {
        os << "order,tau,bernoulli_pi,gev_pi,bernoulli_sup_distance,gev_sup_distance\n";
        for (const auto& c : comparison.cells) {
            os << c.order << ',' << format_double(c.tau) << ',' << format_double(c.bernoulli_pi) << ','
               << format_double(c.gev_pi) << ',' << format_double(c.bernoulli_sup_distance) << ','
               << format_double(c.gev_sup_distance) << '\n';
        }
    });

    // Test statistic of independent replicates against the DP extremes.
    constexpr std::size_t length = 4096, order = 8, n_events = 32, delta = 7, m = 32, replicates = 1000;
    const TimeSeries x = sim::gen_ma_exponential(length, order, derive_seed(seed, 2));
    const GevFit fit = fit_gev_mle(block_maxima(x, delta));
    const ThresholdLadder ladder = build_ladder_from_quantiles(x, 0.75, 1.0, m);
    const std::vector<double> pis = success_probabilities(ladder, fit.params);
    const ExtremeProcess lowest = dp_extreme_nll(n_events, pis, Extreme::min);
    const ExtremeProcess highest = dp_extreme_nll(n_events, pis, Extreme::max);
    const std::vector<BandPoint> band = expected_process_with_band(n_events, pis);

    const TcpEvaluator evaluate(x, delta, ladder);
    const std::uint64_t replicate_seed = derive_seed(seed, 3);
    std::vector<TriggerCoincidenceProcess> processes(replicates);
    std::vector<double> nll(replicates);
    parallel_for(replicates, workers, [&](std::size_t r) {
        processes[r] = evaluate(sim::gen_independent_events(length, n_events, derive_seed(replicate_seed, r)));
        nll[r] = tcp_nll(processes[r], pis);
    });

    out.write("dp_extremes.csv", [&](std::ostream& os) {
        os << "level,threshold,expected_k,k_min_nll,k_max_nll\n";
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            os << format_double(ladder.levels()[i]) << ',' << format_double(ladder.thresholds()[i]) << ','
               << format_double(band[i].expectation) << ',' << lowest.process.counts()[i] << ','
               << highest.process.counts()[i] << '\n';
        }
    });
    out.write("replicate_nll.csv", [&](std::ostream& os) {
        os << "replicate,nll";
        for (std::size_t i = 1; i <= ladder.size(); ++i) os << ",k_" << i;
        os << '\n';
        for (std::size_t r = 0; r < replicates; ++r) {
            os << r << ',' << format_double(nll[r]);
            for (std::size_t k : processes[r].counts()) os << ',' << k;
            os << '\n';
        }
    });

    const auto [nll_lo, nll_hi] = std::minmax_element(nll.begin(), nll.end());
    Json cells = Json::array();
    for (const auto& c : comparison.cells) {
        cells.push_back(Json{{"order", c.order},
                             {"tau", c.tau},
                             {"bernoulli_pi", c.bernoulli_pi},
                             {"gev_pi", c.gev_pi},
                             {"bernoulli_sup_distance", c.bernoulli_sup_distance},
                             {"gev_sup_distance", c.gev_sup_distance}});
    }
    Json fits = Json::array();
    for (std::size_t i = 0; i < comparison.fits.size(); ++i) {
        fits.push_back(Json{{"order", config.ma_orders[i]}, {"gev", gev_json(comparison.fits[i])}});
    }
    Json summary;
    summary["preset"] = "appendix-b1";
    summary["seed"] = seed;
    summary["null_comparison"] = Json{{"cells", cells}, {"fits", fits}};
    summary["markov"] = Json{{"ma_order", order},
                             {"gev", gev_json(fit.params)},
                             {"ladder_size", ladder.size()},
                             {"dp_min", lowest.statistic},
                             {"dp_max", highest.statistic},
                             {"replicate_nll_min", *nll_lo},
                             {"replicate_nll_max", *nll_hi},
                             {"all_within_bounds", *nll_lo >= lowest.statistic && *nll_hi <= highest.statistic}};
    out.write("summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
}

void fig4(std::uint64_t seed, OutputSet& out) {
    constexpr std::size_t length = 4096, order = 8, n_events = 32, delta = 7, lag = 4;
    constexpr double trigger_tau = 4.0;
    const Date start{std::chrono::year{2000} / 1 / 1};

    const TimeSeries x = sim::gen_ma_exponential(length, order, derive_seed(seed, 1));
    const EventSeries dependent = sim::gen_dependent_events(x, n_events, trigger_tau, lag, derive_seed(seed, 2));
    const EventSeries independent = sim::gen_independent_events(length, n_events, derive_seed(seed, 3));
    const ThresholdLadder ladder = canonical_ladder(x);
    const TriggerCoincidenceProcess k_dep = compute_tcp(dependent, x, delta, ladder);
    const TriggerCoincidenceProcess k_ind = compute_tcp(independent, x, delta, ladder);

    out.write("fig4_series.csv", [&](std::ostream& os) { write_series_csv(os, start, x); });
    out.write("fig4_events_dependent.txt", [&](std::ostream& os) { write_event_dates(os, start, dependent); });
    out.write("fig4_events_independent.txt", [&](std::ostream& os) { write_event_dates(os, start, independent); });
    out.write("fig4_qtr.csv", [&](std::ostream& os) {
        os << "level,threshold,k_dependent,k_independent,rate_dependent,rate_independent\n";
        const double n = static_cast<double>(n_events);
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            os << format_double(ladder.levels()[i]) << ',' << format_double(ladder.thresholds()[i]) << ','
               << k_dep.counts()[i] << ',' << k_ind.counts()[i] << ','
               << format_double(static_cast<double>(k_dep.counts()[i]) / n) << ','
               << format_double(static_cast<double>(k_ind.counts()[i]) / n) << '\n';
        }
    });

    Json summary;
    summary["preset"] = "fig4";
    summary["seed"] = seed;
    Json thresholds = Json::array();
    for (double tau : {4.0, 5.0}) {
        thresholds.push_back(Json{{"tau", tau},
                                  {"k_dependent", count_trigger_exceedances(dependent, x, tau, delta).count},
                                  {"k_independent", count_trigger_exceedances(independent, x, tau, delta).count}});
    }
    summary["n_events"] = n_events;
    summary["delta"] = delta;
    summary["thresholds"] = thresholds;
    out.write("summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
}

void demo(std::uint64_t seed, OutputSet& out) {
    const Date start{std::chrono::year{2015} / 1 / 1};
    const Date last{std::chrono::year{2017} / 12 / 31};
    const auto length = static_cast<std::size_t>((last - start).count()) + 1;

    std::vector<std::size_t> days;
    for (const char* text : attack_dates) {
        days.push_back(static_cast<std::size_t>((*parse_date(text) - start).count()) + 1);
    }
    const EventSeries events(length, days);

    // Daily counts: a log-normal-ish baseline with a decaying burst after
    // each event day.
    const TimeSeries base = sim::gen_ma_exponential(length, 8, derive_seed(seed, 1));
    std::vector<double> counts(length);
    for (std::size_t t = 0; t < length; ++t) counts[t] = std::round(60.0 * std::exp(0.6 * base.values()[t]));
    for (std::size_t day : days) {
        for (std::size_t j = 0; j < 7 && day - 1 + j < length; ++j) {
            counts[day - 1 + j] += std::round(900.0 * std::exp(-static_cast<double>(j) / 1.5));
        }
    }
    const TimeSeries series(std::move(counts));
    out.write("demo_series.csv", [&](std::ostream& os) { write_series_csv(os, start, series); });
    out.write("demo_events.txt", [&](std::ostream& os) { write_event_dates(os, start, events); });
}

}  // namespace

std::vector<std::filesystem::path> run_simulate(std::string_view preset, std::uint64_t seed,
                                                const std::filesystem::path& out_dir, unsigned workers) {
    if (preset != "appendix-b1" && preset != "fig4" && preset != "demo") {
        throw_invalid("unknown preset '" + std::string(preset) + "' (expected appendix-b1, fig4 or demo)");
    }
    OutputSet out(out_dir);
    if (preset == "appendix-b1") appendix_b(seed, workers, out);
    if (preset == "fig4") fig4(seed, out);
    if (preset == "demo") demo(seed, out);
    return std::move(out).written();
}

}  // namespace peca::cli
