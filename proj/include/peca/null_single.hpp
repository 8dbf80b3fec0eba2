#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "peca/core_series.hpp"

namespace peca {

/// Generalized extreme value parameters: shape xi, location mu, scale sigma > 0.
struct GevParams {
    double shape = 0.0;
    double location = 0.0;
    double scale = 1.0;

    /// Throws unless scale > 0 and all fields are finite.
    void validate() const;
};

/// |xi| below this is treated as the Gumbel limit.
inline constexpr double gumbel_shape_cutoff = 1e-9;

/// G(z) = exp{-[1 + xi (z - mu) / sigma]^(-1/xi)}, clamped to 0 or 1 outside the support.
double gev_cdf(double z, const GevParams& theta);

/// 1 - G(z), computed without cancellation for large z.
double gev_exceedance(double z, const GevParams& theta);

/// Inverse CDF for p in (0, 1).
double gev_quantile(double p, const GevParams& theta);

/// Negative log-likelihood of a sample; +infinity if any point is outside the support.
double gev_nll(std::span<const double> sample, const GevParams& theta);

/// Maxima of consecutive non-overlapping blocks of size delta + 1. A trailing
/// partial block is dropped.
std::vector<double> block_maxima(const TimeSeries& x, std::size_t delta);

struct GevFitOptions {
    std::size_t min_samples = 20;
    double relative_tolerance = 1e-10;  // on the NLL, between simplex restarts
    std::size_t max_evaluations = 200000;
    double min_shape = -1.0;
    double max_shape = 2.0;
};

struct GevFit {
    GevParams params;
    double nll = 0.0;
    GevParams initial;
    double initial_nll = 0.0;
    std::size_t evaluations = 0;
    std::size_t restarts = 0;
    bool converged = false;
};

/// Probability-weighted-moment estimate (Hosking et al.), falling back to the
/// Gumbel method of moments when the PWM support excludes part of the sample.
GevParams gev_initial_estimate(std::span<const double> sample);

/// Maximum likelihood fit by a bounded Nelder-Mead search over
/// (mu, log sigma, xi), started from gev_initial_estimate. Throws a
/// numerical Error for degenerate samples or when the search does not converge.
GevFit fit_gev_mle(std::span<const double> sample, const GevFitOptions& options = {});

struct PointwiseTestResult {
    std::size_t k_observed = 0;
    std::size_t n_events = 0;
    double success_prob = 0.0;
    double p_value = 1.0;
};

/// Bernoulli-process null: pi = 1 - (1 - p_a)^(delta + 1), p-value P(K >= k).
PointwiseTestResult bernoulli_null_pvalue(std::size_t k, std::size_t n_b, double p_a,
                                          std::size_t delta);

/// GEV null: pi = 1 - G(tau; theta), p-value P(K >= k).
PointwiseTestResult gev_null_pvalue(std::size_t k, std::size_t n_e, double tau,
                                    const GevParams& theta);

/// N / T.
double estimate_event_rate(const EventSeries& e);

}  // namespace peca
