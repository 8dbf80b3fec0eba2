#include "peca/multi_threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "peca/binomial.hpp"
#include "peca/error.hpp"
#include "peca/parallel.hpp"

namespace peca {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Tolerated relative overshoot of pi_i over pi_{i-1} before the ordering is
// considered violated; smaller overshoots are rounding and get clamped.
constexpr double ratio_slack = 1e-12;

void check_pis(std::span<const double> pis) {
    if (pis.empty()) throw_invalid("success probability vector is empty");
    for (std::size_t i = 0; i < pis.size(); ++i) {
        if (!(pis[i] > 0.0 && pis[i] <= 1.0)) {
            throw_invalid("success probability " + std::to_string(i + 1) + " must lie in (0, 1]");
        }
        if (i > 0 && pis[i] > pis[i - 1] * (1.0 + ratio_slack)) {
            throw_invalid("success probabilities must be non-increasing along the ladder");
        }
    }
}

double transition_ratio(std::span<const double> pis, std::size_t i) {
    return std::clamp(pis[i] / pis[i - 1], 0.0, 1.0);
}

}  // namespace

ThresholdLadder::ThresholdLadder(std::vector<double> thresholds, std::vector<double> levels,
                                 std::size_t requested_size)
    : thresholds_(std::move(thresholds)),
      levels_(std::move(levels)),
      requested_size_(requested_size == 0 ? thresholds_.size() : requested_size) {
    if (thresholds_.empty()) throw_invalid("threshold ladder must contain at least one threshold");
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
        if (!std::isfinite(thresholds_[i])) throw_invalid("thresholds must be finite");
        if (i > 0 && !(thresholds_[i] > thresholds_[i - 1])) {
            throw_invalid("thresholds must be strictly increasing");
        }
    }
    if (!levels_.empty()) {
        if (levels_.size() != thresholds_.size()) throw_invalid("one quantile level per threshold required");
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            if (!(levels_[i] >= 0.0 && levels_[i] <= 1.0)) throw_invalid("quantile levels must lie in [0, 1]");
            if (i > 0 && levels_[i] < levels_[i - 1]) throw_invalid("quantile levels must be non-decreasing");
        }
    }
}

double empirical_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw_invalid("empirical quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw_invalid("quantile level must lie in [0, 1]");
    const double n = static_cast<double>(sorted.size());
    // The small slack keeps p = j / T on the j-th order statistic despite rounding in p.
    const double rank = std::ceil(p * n - 1e-9);
    const auto index = static_cast<std::size_t>(std::clamp(rank, 1.0, n));
    return sorted[index - 1];
}

ThresholdLadder build_ladder_from_quantiles(const TimeSeries& x, double lo, double hi, std::size_t m) {
    if (m == 0) throw_invalid("ladder size must be at least 1");
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw_invalid("quantile range must satisfy 0 <= lo <= hi <= 1");
    if (m > 1 && !(lo < hi)) throw_invalid("quantile range must satisfy lo < hi for more than one threshold");

    std::vector<double> sorted(x.values().begin(), x.values().end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) {
        throw Error(ErrorCategory::input, "cannot build thresholds from a constant series");
    }

    std::vector<double> thresholds, levels;
    for (std::size_t j = 0; j < m; ++j) {
        double p = lo;
        if (m > 1) p = j + 1 == m ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m - 1);
        const double tau = empirical_quantile(sorted, p);
        if (!thresholds.empty() && tau <= thresholds.back()) continue;
        thresholds.push_back(tau);
        levels.push_back(p);
    }
    return ThresholdLadder(std::move(thresholds), std::move(levels), m);
}

ThresholdLadder canonical_ladder(const TimeSeries& x) {
    std::vector<double> sorted(x.values().begin(), x.values().end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> thresholds, levels;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        thresholds.push_back(sorted[i]);
        levels.push_back(static_cast<double>(i + 1) / n);
    }
    return ThresholdLadder(std::move(thresholds), std::move(levels));
}

TriggerCoincidenceProcess::TriggerCoincidenceProcess(std::vector<std::size_t> counts, std::size_t n_events)
    : counts_(std::move(counts)), n_events_(n_events) {
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] > n_events_) throw_invalid("trigger count exceeds the number of events");
        if (i > 0 && counts_[i] > counts_[i - 1]) {
            throw_invalid("trigger coincidence process must be non-increasing");
        }
    }
}

std::vector<double> success_probabilities(const ThresholdLadder& ladder, const GevParams& theta) {
    std::vector<double> pis;
    pis.reserve(ladder.size());
    // Thresholds past the fitted upper endpoint get the smallest positive
    // probability so the Markov model stays defined.
    for (double tau : ladder.thresholds()) {
        pis.push_back(std::max(gev_exceedance(tau, theta), std::numeric_limits<double>::min()));
    }
    return pis;
}

TcpEvaluator::TcpEvaluator(const TimeSeries& x, std::size_t delta, const ThresholdLadder& ladder)
    : length_(x.length()),
      delta_(delta),
      window_max_(window_maxima(x, delta)),
      thresholds_(ladder.thresholds().begin(), ladder.thresholds().end()) {}

TriggerCoincidenceProcess TcpEvaluator::operator()(const EventSeries& e) const {
    if (e.length() != length_) {
        throw_invalid("series lengths differ (" + std::to_string(e.length()) + " vs " +
                      std::to_string(length_) + ")");
    }
    // An event whose window maximum beats the first j thresholds adds one to
    // K_1..K_j; accumulate those as a difference array.
    std::vector<std::size_t> ends(thresholds_.size() + 1, 0);
    for (std::size_t t : e.occurrences()) {
        if (t > window_max_.size()) break;
        const double peak = window_max_[t - 1];
        const auto beaten = static_cast<std::size_t>(
            std::lower_bound(thresholds_.begin(), thresholds_.end(), peak) - thresholds_.begin());
        ++ends[beaten];
    }
    std::vector<std::size_t> counts(thresholds_.size());
    std::size_t running = 0;
    for (std::size_t m = thresholds_.size(); m-- > 0;) {
        running += ends[m + 1];
        counts[m] = running;
    }
    return TriggerCoincidenceProcess(std::move(counts), e.count());
}

TriggerCoincidenceProcess compute_tcp(const EventSeries& e, const TimeSeries& x, std::size_t delta,
                                      const ThresholdLadder& ladder) {
    if (e.length() != x.length()) throw_invalid("event series and time series lengths differ");
    return TcpEvaluator(x, delta, ladder)(e);
}

double tcp_nll(const TriggerCoincidenceProcess& process, std::span<const double> pis) {
    check_pis(pis);
    if (pis.size() != process.size()) throw_invalid("one success probability per threshold required");
    const auto k = process.counts();
    double s = -binomial::log_pmf(k[0], process.n_events(), pis[0]);
    for (std::size_t i = 1; i < k.size(); ++i) {
        s -= binomial::log_pmf(k[i], k[i - 1], transition_ratio(pis, i));
    }
    return s;
}

EventSeries permute_events(const EventSeries& e, Rng& rng) {
    const std::size_t t_len = e.length();
    const std::size_t n = e.count();
    // Floyd's sampling of n distinct positions out of t_len.
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t j = t_len - n + 1; j <= t_len; ++j) {
        const std::size_t candidate = static_cast<std::size_t>(rng.below(j)) + 1;
        auto it = std::lower_bound(chosen.begin(), chosen.end(), candidate);
        if (it != chosen.end() && *it == candidate) {
            chosen.insert(std::lower_bound(chosen.begin(), chosen.end(), j), j);
        } else {
            chosen.insert(it, candidate);
        }
    }
    return EventSeries(t_len, std::move(chosen));
}

namespace {

std::size_t count_at_least(double observed, std::span<const double> replicates) {
    return static_cast<std::size_t>(
        std::count_if(replicates.begin(), replicates.end(), [&](double s) { return s >= observed; }));
}

}  // namespace

double monte_carlo_pvalue(double observed, std::span<const double> replicates) {
    return static_cast<double>(1 + count_at_least(observed, replicates)) /
           static_cast<double>(replicates.size() + 1);
}

MultiTestResult mc_multi_threshold_test(const EventSeries& e, const TimeSeries& x, std::size_t delta,
                                        const ThresholdLadder& ladder, const GevParams& theta,
                                        std::size_t r, std::uint64_t seed, unsigned workers) {
    if (r == 0) throw_invalid("number of Monte Carlo replicates must be at least 1");
    const TcpEvaluator evaluate(x, delta, ladder);
    const std::vector<double> pis = success_probabilities(ladder, theta);

    MultiTestResult result;
    result.replicates = r;
    result.seed = seed;
    result.observed = evaluate(e);
    result.statistic = tcp_nll(result.observed, pis);
    result.null_statistics.resize(r);
    result.null_processes.resize(r);

    parallel_for(r, workers, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        result.null_processes[i] = evaluate(permute_events(e, rng));
        result.null_statistics[i] = tcp_nll(result.null_processes[i], pis);
    });

    result.exceedances = count_at_least(result.statistic, result.null_statistics);
    result.p_hat = monte_carlo_pvalue(result.statistic, result.null_statistics);

    std::vector<double> sorted = result.null_statistics;
    std::sort(sorted.begin(), sorted.end());
    result.null_summary.min = sorted.front();
    result.null_summary.max = sorted.back();
    result.null_summary.median = r % 2 == 1 ? sorted[r / 2] : 0.5 * (sorted[r / 2 - 1] + sorted[r / 2]);
    return result;
}

double gev_admissibility_distance(const MultiTestResult& result, std::span<const double> pis) {
    if (result.null_processes.empty()) return 0.0;
    const std::size_t n = result.observed.n_events();
    const std::size_t m_count = pis.size();
    const double r = static_cast<double>(result.null_processes.size());
    double sup = 0.0;
    std::vector<std::size_t> histogram(n + 1);
    for (std::size_t m = 0; m < m_count; ++m) {
        std::fill(histogram.begin(), histogram.end(), 0);
        for (const auto& proc : result.null_processes) ++histogram[proc.counts()[m]];
        std::size_t cumulative = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            cumulative += histogram[k];
            const double diff = std::abs(static_cast<double>(cumulative) / r - binomial::cdf(k, n, pis[m]));
            sup = std::max(sup, diff);
        }
    }
    return sup;
}

std::vector<BandPoint> expected_process_with_band(std::size_t n_events, std::span<const double> pis,
                                                  double level) {
    if (!(level > 0.0 && level < 1.0)) throw_invalid("band level must lie in (0, 1)");
    std::vector<BandPoint> band;
    band.reserve(pis.size());
    for (double pi : pis) {
        BandPoint point;
        point.expectation = static_cast<double>(n_events) * pi;
        point.lower = binomial::quantile((1.0 - level) / 2.0, n_events, pi);
        point.upper = binomial::quantile((1.0 + level) / 2.0, n_events, pi);
        band.push_back(point);
    }
    return band;
}

ExtremeProcess dp_extreme_nll(std::size_t n_events, std::span<const double> pis, Extreme direction) {
    check_pis(pis);
    const std::size_t m_count = pis.size();
    const std::size_t width = n_events + 1;
    const bool minimise = direction == Extreme::min;
    const double unreachable = minimise ? inf : -inf;
    auto better = [&](double a, double b) { return minimise ? a < b : a > b; };

    // value[k]: best partial NLL with K_m = k; choice[m][k]: K_{m-1} achieving it.
    std::vector<double> value(width);
    for (std::size_t k = 0; k < width; ++k) {
        const double cost = -binomial::log_pmf(k, n_events, pis[0]);
        value[k] = std::isfinite(cost) ? cost : unreachable;
    }
    std::vector<std::vector<std::size_t>> choice(m_count, std::vector<std::size_t>(width, 0));

    std::vector<double> next(width);
    for (std::size_t m = 1; m < m_count; ++m) {
        const double rho = transition_ratio(pis, m);
        std::fill(next.begin(), next.end(), unreachable);
        for (std::size_t prev = 0; prev < width; ++prev) {
            if (!std::isfinite(value[prev])) continue;
            for (std::size_t k = 0; k <= prev; ++k) {
                const double step = -binomial::log_pmf(k, prev, rho);
                if (!std::isfinite(step)) continue;
                const double candidate = value[prev] + step;
                if (!std::isfinite(next[k]) || better(candidate, next[k])) {
                    next[k] = candidate;
                    choice[m][k] = prev;
                }
            }
        }
        value.swap(next);
    }

    std::size_t best_k = width;
    for (std::size_t k = 0; k < width; ++k) {
        if (!std::isfinite(value[k])) continue;
        if (best_k == width || better(value[k], value[best_k])) best_k = k;
    }
    if (best_k == width) throw_invalid("no process has positive probability under these success probabilities");

    std::vector<std::size_t> counts(m_count);
    counts[m_count - 1] = best_k;
    for (std::size_t m = m_count - 1; m > 0; --m) counts[m - 1] = choice[m][counts[m]];
    return ExtremeProcess{value[best_k], TriggerCoincidenceProcess(std::move(counts), n_events)};
}

std::vector<PointwiseTestResult> pointwise_tests_along_ladder(const EventSeries& e, const TimeSeries& x,
                                                              std::size_t delta,
                                                              const ThresholdLadder& ladder,
                                                              const GevParams& theta) {
    const TriggerCoincidenceProcess process = compute_tcp(e, x, delta, ladder);
    std::vector<PointwiseTestResult> out;
    out.reserve(ladder.size());
    for (std::size_t m = 0; m < ladder.size(); ++m) {
        out.push_back(gev_null_pvalue(process.counts()[m], process.n_events(), ladder.thresholds()[m], theta));
    }
    return out;
}

}  // namespace peca
