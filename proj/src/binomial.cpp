#include "peca/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "peca/error.hpp"

namespace peca::binomial {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw_invalid("success probability must lie in [0, 1]");
}

double log_choose(std::size_t n, std::size_t k) {
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
}

// log(sum(exp(terms))) without overflow.
double log_sum_exp(const std::vector<double>& terms) {
    double peak = neg_inf;
    for (double t : terms) peak = std::max(peak, t);
    if (peak == neg_inf) return neg_inf;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    return peak + std::log(acc);
}

double log_range_sum(std::size_t lo, std::size_t hi, std::size_t n, double p) {
    std::vector<double> terms;
    terms.reserve(hi - lo + 1);
    for (std::size_t j = lo; j <= hi; ++j) terms.push_back(log_pmf(j, n, p));
    return log_sum_exp(terms);
}

}  // namespace

double log_pmf(std::size_t k, std::size_t n, double p) {
    check_probability(p);
    if (k > n) return neg_inf;
    if (p == 0.0) return k == 0 ? 0.0 : neg_inf;
    if (p == 1.0) return k == n ? 0.0 : neg_inf;
    const double kk = static_cast<double>(k);
    const double rest = static_cast<double>(n - k);
    return log_choose(n, k) + kk * std::log(p) + rest * std::log1p(-p);
}

double upper_tail(std::size_t k, std::size_t n, double p) {
    check_probability(p);
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    return std::min(1.0, std::exp(log_range_sum(k, n, n, p)));
}

double cdf(std::size_t k, std::size_t n, double p) {
    check_probability(p);
    if (k >= n) return 1.0;
    return std::min(1.0, std::exp(log_range_sum(0, k, n, p)));
}

std::size_t quantile(double q, std::size_t n, double p) {
    check_probability(p);
    if (!(q >= 0.0 && q <= 1.0)) throw_invalid("quantile level must lie in [0, 1]");
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += std::exp(log_pmf(k, n, p));
        if (acc >= q) return k;
    }
    return n;
}

}  // namespace peca::binomial
