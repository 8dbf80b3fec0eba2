#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "peca/core_series.hpp"
#include "peca/null_single.hpp"
#include "peca/rng.hpp"

namespace peca {

/// Strictly increasing thresholds, optionally tagged with the empirical
/// quantile levels they were taken from.
class ThresholdLadder {
public:
    ThresholdLadder() = default;
    explicit ThresholdLadder(std::vector<double> thresholds, std::vector<double> levels = {},
                             std::size_t requested_size = 0);

    std::size_t size() const noexcept { return thresholds_.size(); }
    std::span<const double> thresholds() const noexcept { return thresholds_; }
    std::span<const double> levels() const noexcept { return levels_; }
    bool has_levels() const noexcept { return !levels_.empty(); }

    /// Number of thresholds asked for before duplicates were collapsed.
    std::size_t requested_size() const noexcept { return requested_size_; }

private:
    std::vector<double> thresholds_;
    std::vector<double> levels_;
    std::size_t requested_size_ = 0;
};

/// Inverse-CDF empirical quantile on sorted data: level p maps to the
/// order statistic x_(ceil(p T)), and p = 0 maps to the minimum.
double empirical_quantile(std::span<const double> sorted, double p);

/// Thresholds at m equidistant quantile levels in [lo, hi]. Tied thresholds
/// are collapsed onto the lowest level that produced them.
ThresholdLadder build_ladder_from_quantiles(const TimeSeries& x, double lo, double hi, std::size_t m);

/// Thresholds at every distinct order statistic, with level t / T for x_(t).
ThresholdLadder canonical_ladder(const TimeSeries& x);

/// Trigger counts K_1 >= ... >= K_M over a ladder, plus the event count N.
class TriggerCoincidenceProcess {
public:
    TriggerCoincidenceProcess() = default;
    TriggerCoincidenceProcess(std::vector<std::size_t> counts, std::size_t n_events);

    std::span<const std::size_t> counts() const noexcept { return counts_; }
    std::size_t n_events() const noexcept { return n_events_; }
    std::size_t size() const noexcept { return counts_.size(); }

    friend bool operator==(const TriggerCoincidenceProcess&, const TriggerCoincidenceProcess&) = default;

private:
    std::vector<std::size_t> counts_;
    std::size_t n_events_ = 0;
};

/// pi_m = 1 - G(tau_m; theta) for every threshold of the ladder, floored at
/// the smallest positive double.
std::vector<double> success_probabilities(const ThresholdLadder& ladder, const GevParams& theta);

/// Computes trigger coincidence processes for many event series against one
/// fixed time series. The window maxima are computed once.
class TcpEvaluator {
public:
    TcpEvaluator(const TimeSeries& x, std::size_t delta, const ThresholdLadder& ladder);

    TriggerCoincidenceProcess operator()(const EventSeries& e) const;

    std::size_t length() const noexcept { return length_; }
    std::size_t delta() const noexcept { return delta_; }

private:
    std::size_t length_;
    std::size_t delta_;
    std::vector<double> window_max_;
    std::vector<double> thresholds_;
};

TriggerCoincidenceProcess compute_tcp(const EventSeries& e, const TimeSeries& x, std::size_t delta,
                                      const ThresholdLadder& ladder);

/// Negative log-likelihood of a process under the Markov null: Binomial(N, pi_1)
/// for the first count and Binomial(K_{i-1}, pi_i / pi_{i-1}) for each
/// transition. +infinity for processes that have probability zero.
double tcp_nll(const TriggerCoincidenceProcess& process, std::span<const double> pis);

/// Uniform placement of the same number of events over the same grid.
EventSeries permute_events(const EventSeries& e, Rng& rng);

struct NullSummary {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct MultiTestResult {
    double statistic = 0.0;
    std::size_t replicates = 0;
    std::size_t exceedances = 0;  // replicates with s' >= s
    double p_hat = 1.0;
    std::uint64_t seed = 0;
    NullSummary null_summary;
    TriggerCoincidenceProcess observed;
    std::vector<double> null_statistics;                   // indexed by replicate
    std::vector<TriggerCoincidenceProcess> null_processes;  // indexed by replicate
};

/// (1 + #{s' >= s}) / (R + 1).
double monte_carlo_pvalue(double observed, std::span<const double> replicates);

/// Monte Carlo multiple-threshold test. Replicate i draws its permutation from
/// Rng::stream(seed, i), so the result is identical for every worker count
/// (0 selects the hardware concurrency).
MultiTestResult mc_multi_threshold_test(const EventSeries& e, const TimeSeries& x, std::size_t delta,
                                        const ThresholdLadder& ladder, const GevParams& theta,
                                        std::size_t r, std::uint64_t seed, unsigned workers = 0);

/// Largest absolute difference, over thresholds and counts, between the
/// empirical CDF of the replicate counts and the Binomial(N, pi_m) CDF.
double gev_admissibility_distance(const MultiTestResult& result, std::span<const double> pis);

struct BandPoint {
    double expectation = 0.0;
    std::size_t lower = 0;
    std::size_t upper = 0;
};

/// N pi_m with the central Binomial(N, pi_m) interval at the given level.
std::vector<BandPoint> expected_process_with_band(std::size_t n_events, std::span<const double> pis,
                                                  double level = 0.95);

enum class Extreme { min, max };

struct ExtremeProcess {
    double statistic = 0.0;
    TriggerCoincidenceProcess process;
};

/// Exact optimum of tcp_nll over every monotone process bounded by n_events
/// that has positive probability, by dynamic programming over thresholds.
ExtremeProcess dp_extreme_nll(std::size_t n_events, std::span<const double> pis, Extreme direction);

/// One GEV-null pointwise test per ladder threshold.
std::vector<PointwiseTestResult> pointwise_tests_along_ladder(const EventSeries& e, const TimeSeries& x,
                                                              std::size_t delta,
                                                              const ThresholdLadder& ladder,
                                                              const GevParams& theta);

}  // namespace peca
