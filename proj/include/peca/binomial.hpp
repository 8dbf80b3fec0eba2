#pragma once

#include <cstddef>

// Binomial(n, p) probabilities evaluated in log space. All functions accept
// the boundary cases p = 0 and p = 1.
namespace peca::binomial {

/// log P(X = k); -infinity for impossible outcomes (including k > n).
double log_pmf(std::size_t k, std::size_t n, double p);

/// P(X >= k), summed with log-sum-exp. Exactly 1 at k = 0.
double upper_tail(std::size_t k, std::size_t n, double p);

/// P(X <= k).
double cdf(std::size_t k, std::size_t n, double p);

/// Smallest k with P(X <= k) >= q, for q in [0, 1].
std::size_t quantile(double q, std::size_t n, double p);

}  // namespace peca::binomial
