#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "peca/binomial.hpp"
#include "peca/error.hpp"
#include "peca/null_single.hpp"
#include "peca/rng.hpp"

using namespace peca;
using boost::multiprecision::cpp_rational;

namespace {

std::vector<double> gev_sample(const GevParams& theta, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = gev_quantile(rng.uniform(), theta);
    return out;
}

cpp_rational exact_pmf(unsigned k, unsigned n, const cpp_rational& p) {
    cpp_rational c = 1;
    for (unsigned i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    cpp_rational out = c;
    for (unsigned i = 0; i < k; ++i) out *= p;
    for (unsigned i = k; i < n; ++i) out *= (1 - p);
    return out;
}

}  // namespace

TEST_CASE("gev cdf") {
    for (double xi : {-0.5, 0.0, 0.3, 1.0}) {
        const GevParams theta{xi, 2.0, 1.5};
        CHECK(gev_cdf(2.0, theta) == doctest::Approx(std::exp(-1.0)));
        CHECK(gev_cdf(2.0, theta) + gev_exceedance(2.0, theta) == doctest::Approx(1.0));
    }
    // Gumbel limit is continuous.
    const GevParams gumbel{0.0, 0.0, 1.0};
    for (double z : {-2.0, 0.5, 3.0}) {
        CHECK(gev_cdf(z, GevParams{1e-12, 0.0, 1.0}) == doctest::Approx(gev_cdf(z, gumbel)).epsilon(1e-12));
        CHECK(gev_cdf(z, GevParams{1e-7, 0.0, 1.0}) == doctest::Approx(gev_cdf(z, gumbel)).epsilon(1e-6));
    }
    // Outside the support.
    CHECK(gev_cdf(-3.0, GevParams{0.5, 0.0, 1.0}) == 0.0);
    CHECK(gev_cdf(3.0, GevParams{-0.5, 0.0, 1.0}) == 1.0);
    CHECK(gev_exceedance(3.0, GevParams{-0.5, 0.0, 1.0}) == 0.0);
    // Tail without cancellation.
    CHECK(gev_exceedance(40.0, gumbel) == doctest::Approx(std::exp(-40.0)).epsilon(1e-9));
}

TEST_CASE("gev cdf is monotone and inverts the quantile") {
    for (double xi : {-0.8, -0.2, 0.0, 0.2, 1.5}) {
        const GevParams theta{xi, 1.0, 2.0};
        double prev = 0.0;
        for (double z = -10; z <= 30; z += 0.25) {
            const double g = gev_cdf(z, theta);
            CHECK(g >= prev);
            CHECK(g >= 0.0);
            CHECK(g <= 1.0);
            prev = g;
        }
        for (double p : {0.01, 0.3, 0.5, 0.9, 0.999}) {
            CHECK(gev_cdf(gev_quantile(p, theta), theta) == doctest::Approx(p).epsilon(1e-10));
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(gev_cdf(0.0, GevParams{0.1, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(gev_cdf(0.0, GevParams{0.1, NAN, 1.0}), Error);
}

TEST_CASE("block maxima") {
    const TimeSeries x({1, 5, 2, 8, 3, 4, 9});
    CHECK(block_maxima(x, 1) == std::vector<double>{5, 8, 4});
    CHECK(block_maxima(x, 0) == std::vector<double>(x.values().begin(), x.values().end()));
    CHECK(block_maxima(TimeSeries(std::vector<double>(4096, 1.0)), 7).size() == 512);
    CHECK_THROWS_AS(block_maxima(x, 7), Error);
}

TEST_CASE("gev fit recovers known parameters") {
    const GevParams truth{0.2, 3.0, 1.0};
    const auto sample = gev_sample(truth, 5000, 11);
    const GevFit fit = fit_gev_mle(sample);
    CHECK(fit.converged);
    CHECK(std::abs(fit.params.shape - truth.shape) < 0.1);
    CHECK(std::abs(fit.params.location - truth.location) < 0.1);
    CHECK(std::abs(fit.params.scale - truth.scale) < 0.1);
    CHECK(fit.nll <= fit.initial_nll);
    CHECK(fit.nll == doctest::Approx(gev_nll(sample, fit.params)));
}

TEST_CASE("gev fit on Gumbel data") {
    const auto sample = gev_sample(GevParams{0.0, 0.0, 1.0}, 5000, 12);
    CHECK(std::abs(fit_gev_mle(sample).params.shape) < 0.1);
}

TEST_CASE("gev fit does not move the NLL uphill from the initial estimate") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double xi = -0.4 + 0.05 * static_cast<double>(seed);
        const auto sample = gev_sample(GevParams{xi, 0.0, 2.0}, 200, seed);
        const GevFit fit = fit_gev_mle(sample);
        CHECK(fit.nll <= gev_nll(sample, fit.initial) + 1e-9);
        CHECK(std::isfinite(fit.nll));
    }
}

TEST_CASE("gev fit errors") {
    CHECK_THROWS_AS(fit_gev_mle(std::vector<double>(50, 3.0)), Error);
    CHECK_THROWS_AS(fit_gev_mle(gev_sample(GevParams{}, 10, 1)), Error);
    try {
        fit_gev_mle(std::vector<double>(50, 3.0));
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::numerical);
    }
}

TEST_CASE("binomial tails against exact rational arithmetic") {
    for (double p : {0.0, 1e-3, 1.0 / 7.0, 0.3, 0.5, 0.97, 1.0}) {
        const cpp_rational pr(p);
        for (unsigned n = 0; n <= 30; ++n) {
            for (unsigned k = 0; k <= n; ++k) {
                cpp_rational tail = 0;
                for (unsigned j = k; j <= n; ++j) tail += exact_pmf(j, n, pr);
                const double expected = static_cast<double>(tail);
                REQUIRE(binomial::upper_tail(k, n, p) == doctest::Approx(expected).epsilon(1e-12));
                const double pmf = static_cast<double>(exact_pmf(k, n, pr));
                REQUIRE(std::exp(binomial::log_pmf(k, n, p)) == doctest::Approx(pmf).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("bernoulli null") {
    const auto r = bernoulli_null_pvalue(3, 5, 0.1, 1);
    const double pi = 1 - 0.9 * 0.9;
    CHECK(r.success_prob == doctest::Approx(pi));
    double direct = 0;
    for (int k = 3; k <= 5; ++k) direct += std::tgamma(6) / std::tgamma(k + 1) / std::tgamma(6 - k) *
                                           std::pow(pi, k) * std::pow(1 - pi, 5 - k);
    CHECK(r.p_value == doctest::Approx(direct).epsilon(1e-12));
    CHECK(bernoulli_null_pvalue(0, 5, 0.3, 2).p_value == 1.0);
    CHECK(bernoulli_null_pvalue(1, 5, 0.0, 2).p_value == 0.0);
    CHECK(bernoulli_null_pvalue(0, 0, 0.3, 2).p_value == 1.0);
    CHECK_THROWS_AS(bernoulli_null_pvalue(6, 5, 0.3, 2), Error);
    CHECK_THROWS_AS(bernoulli_null_pvalue(1, 5, 1.2, 2), Error);
}

TEST_CASE("gev null") {
    const GevParams theta{0.1, 2.0, 1.0};
    CHECK(gev_null_pvalue(0, 10, 3.0, theta).p_value == 1.0);
    CHECK(gev_null_pvalue(7, 10, -1e300, GevParams{-0.5, 0.0, 1.0}).p_value == 1.0);
    CHECK(gev_null_pvalue(10, 10, 3.0, theta).success_prob == doctest::Approx(gev_exceedance(3.0, theta)));
    double prev = 1.0;
    for (std::size_t k = 0; k <= 20; ++k) {
        const double p = gev_null_pvalue(k, 20, 3.0, theta).p_value;
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        prev = p;
    }
}

TEST_CASE("event rate") {
    std::vector<std::size_t> occ;
    for (std::size_t i = 1; i <= 17; ++i) occ.push_back(i * 60);
    CHECK(estimate_event_rate(EventSeries(1096, occ)) == doctest::Approx(0.015511).epsilon(1e-4));
}
