#include "peca/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "peca/binomial.hpp"
#include "peca/error.hpp"
#include "peca/format.hpp"
#include "peca/multi_threshold.hpp"
#include "peca/parallel.hpp"
#include "peca/rng.hpp"

namespace peca::sim {

namespace {

// n distinct 0-based indices from [0, population), ascending (Floyd).
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n, Rng& rng) {
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t j = population - n; j < population; ++j) {
        const auto candidate = static_cast<std::size_t>(rng.below(j + 1));
        auto it = std::lower_bound(chosen.begin(), chosen.end(), candidate);
        if (it != chosen.end() && *it == candidate) {
            chosen.insert(std::lower_bound(chosen.begin(), chosen.end(), j), j);
        } else {
            chosen.insert(it, candidate);
        }
    }
    return chosen;
}

}  // namespace

std::vector<double> ma_exponential_raw(std::size_t t, std::size_t order, std::uint64_t seed) {
    if (t == 0 || t <= order) throw_invalid("series length must exceed the moving-average order");
    Rng rng(derive_seed(seed, 0));
    std::vector<double> draws(t);
    for (double& d : draws) d = rng.exponential();
    if (order <= 1) return draws;

    std::vector<double> filtered(t);
    for (std::size_t i = 0; i < t; ++i) {
        const std::size_t first = i + 1 >= order ? i + 1 - order : 0;
        double sum = 0.0;
        for (std::size_t j = first; j <= i; ++j) sum += draws[j];
        filtered[i] = sum / static_cast<double>(i - first + 1);
    }
    return filtered;
}

TimeSeries gen_ma_exponential(std::size_t t, std::size_t order, std::uint64_t seed) {
    std::vector<double> y = ma_exponential_raw(t, order, seed);
    if (t < 2) throw_invalid("at least two values are needed to standardise");
    const double n = static_cast<double>(t);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    for (double& v : y) v = (v - mean) / sd;
    const double lowest = *std::min_element(y.begin(), y.end());
    for (double& v : y) v -= lowest;
    return TimeSeries(std::move(y));
}

EventSeries gen_independent_events(std::size_t t, std::size_t n, std::uint64_t seed) {
    if (n > t) throw_invalid("cannot place " + std::to_string(n) + " events on " + std::to_string(t) + " days");
    Rng rng(derive_seed(seed, 1));
    std::vector<std::size_t> days = sample_without_replacement(t, n, rng);
    for (auto& d : days) ++d;
    return EventSeries(t, std::move(days));
}

EventSeries gen_dependent_events(const TimeSeries& x, std::size_t n, double trigger_tau, std::size_t lag,
                                 std::uint64_t seed) {
    std::vector<std::size_t> candidates;
    for (std::size_t t = lag + 1; t <= x.length(); ++t) {
        if (x.at(t) > trigger_tau) candidates.push_back(t);
    }
    if (candidates.size() < n) {
        throw Error(ErrorCategory::input, "only " + std::to_string(candidates.size()) +
                                              " exceedances available for " + std::to_string(n) + " events");
    }
    Rng rng(derive_seed(seed, 2));
    std::vector<std::size_t> days;
    days.reserve(n);
    for (std::size_t idx : sample_without_replacement(candidates.size(), n, rng)) {
        days.push_back(candidates[idx] - lag);
    }
    return EventSeries(x.length(), std::move(days));
}

void SimConfig::validate() const {
    if (ma_orders.empty()) throw_invalid("at least one moving-average order is required");
    for (std::size_t q : ma_orders) {
        if (length < q + 1) throw_invalid("series length must exceed every moving-average order");
    }
    if (n_events > length) throw_invalid("more events than time steps");
    if (delta >= length) throw_invalid("time tolerance must be smaller than the series length");
    if (thresholds.empty()) throw_invalid("at least one threshold is required");
    if (replicates == 0) throw_invalid("at least one replicate is required");
}

NullComparison null_distribution_comparison(const SimConfig& config) {
    config.validate();
    const std::size_t n = config.n_events;
    const std::size_t n_tau = config.thresholds.size();
    NullComparison out;

    for (std::size_t oi = 0; oi < config.ma_orders.size(); ++oi) {
        const std::size_t order = config.ma_orders[oi];
        const TimeSeries x = gen_ma_exponential(config.length, order, derive_seed(config.seed, oi));
        const GevFit fit = fit_gev_mle(block_maxima(x, config.delta), config.fit);
        out.fits.push_back(fit.params);

        const std::vector<double> window_max = window_maxima(x, config.delta);
        const std::uint64_t replicate_seed = derive_seed(config.seed, 1000 + oi);
        // counts[r * n_tau + j]: trigger count of replicate r at threshold j.
        std::vector<std::size_t> counts(config.replicates * n_tau);
        parallel_for(config.replicates, config.workers, [&](std::size_t r) {
            const EventSeries e = gen_independent_events(config.length, n, derive_seed(replicate_seed, r));
            for (std::size_t j = 0; j < n_tau; ++j) {
                std::size_t k = 0;
                for (std::size_t t : e.occurrences()) {
                    if (t <= window_max.size() && window_max[t - 1] > config.thresholds[j]) ++k;
                }
                counts[r * n_tau + j] = k;
            }
        });

        for (std::size_t j = 0; j < n_tau; ++j) {
            const double tau = config.thresholds[j];
            NullComparisonCell cell;
            cell.order = order;
            cell.tau = tau;
            const double p_a = estimate_event_rate(exceedance_series(x, tau));
            cell.bernoulli_pi = bernoulli_null_pvalue(0, n, p_a, config.delta).success_prob;
            cell.gev_pi = gev_exceedance(tau, fit.params);

            std::vector<std::size_t> histogram(n + 1, 0);
            for (std::size_t r = 0; r < config.replicates; ++r) ++histogram[counts[r * n_tau + j]];
            std::size_t cumulative = 0;
            for (std::size_t k = 0; k <= n; ++k) {
                cumulative += histogram[k];
                NullComparisonRow row;
                row.k = k;
                row.order = order;
                row.tau = tau;
                row.empirical_cmf = static_cast<double>(cumulative) / static_cast<double>(config.replicates);
                row.bernoulli_cmf = binomial::cdf(k, n, cell.bernoulli_pi);
                row.gev_cmf = binomial::cdf(k, n, cell.gev_pi);
                cell.bernoulli_sup_distance =
                    std::max(cell.bernoulli_sup_distance, std::abs(row.empirical_cmf - row.bernoulli_cmf));
                cell.gev_sup_distance = std::max(cell.gev_sup_distance, std::abs(row.empirical_cmf - row.gev_cmf));
                out.rows.push_back(row);
            }
            out.cells.push_back(cell);
        }
    }
    return out;
}

void write_comparison_csv(std::ostream& out, const NullComparison& comparison) {
    out << "k,order,tau,empirical_cmf,bernoulli_cmf,gev_cmf\n";
    for (const auto& row : comparison.rows) {
        out << row.k << ',' << row.order << ',' << format_double(row.tau) << ','
            << format_double(row.empirical_cmf) << ',' << format_double(row.bernoulli_cmf) << ','
            << format_double(row.gev_cmf) << '\n';
    }
}

}  // namespace peca::sim
