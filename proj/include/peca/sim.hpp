#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "peca/core_series.hpp"
#include "peca/null_single.hpp"

namespace peca::sim {

/// The moving-averaged Exponential(1) draws before standardisation.
std::vector<double> ma_exponential_raw(std::size_t t, std::size_t order, std::uint64_t seed);

/// Exponential(1) draws passed through a causal moving average of window
/// `order` (0 and 1 leave the draws untouched; early steps average the
/// available prefix), standardised by the sample mean and standard deviation
/// and shifted so the minimum is exactly 0.
TimeSeries gen_ma_exponential(std::size_t t, std::size_t order, std::uint64_t seed);

/// n distinct event days drawn uniformly from [1, t].
EventSeries gen_independent_events(std::size_t t, std::size_t n, std::uint64_t seed);

/// Samples n distinct days t with x_t > trigger_tau and t - lag >= 1, and
/// places an event at t - lag for each of them.
EventSeries gen_dependent_events(const TimeSeries& x, std::size_t n, double trigger_tau, std::size_t lag,
                                 std::uint64_t seed);

struct SimConfig {
    std::size_t length = 4096;
    std::vector<std::size_t> ma_orders{0, 32, 64};
    std::size_t n_events = 32;
    std::size_t delta = 7;
    std::vector<double> thresholds{3.0, 4.0, 5.0};
    std::size_t replicates = 1000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    GevFitOptions fit;

    void validate() const;
};

struct NullComparisonRow {
    std::size_t k = 0;
    std::size_t order = 0;
    double tau = 0.0;
    double empirical_cmf = 0.0;
    double bernoulli_cmf = 0.0;
    double gev_cmf = 0.0;
};

struct NullComparisonCell {
    std::size_t order = 0;
    double tau = 0.0;
    double bernoulli_pi = 0.0;
    double gev_pi = 0.0;
    double bernoulli_sup_distance = 0.0;
    double gev_sup_distance = 0.0;
};

struct NullComparison {
    std::vector<NullComparisonRow> rows;
    std::vector<NullComparisonCell> cells;
    std::vector<GevParams> fits;  // one per MA order
};

/// Empirical null distribution of the trigger count for independent event
/// series, side by side with the Bernoulli-based and GEV-based binomial
/// approximations, for every (MA order, threshold) pair.
NullComparison null_distribution_comparison(const SimConfig& config);

/// CSV with columns k,order,tau,empirical_cmf,bernoulli_cmf,gev_cmf.
void write_comparison_csv(std::ostream& out, const NullComparison& comparison);

}  // namespace peca::sim
