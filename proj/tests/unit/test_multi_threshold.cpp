#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "peca/binomial.hpp"
#include "peca/error.hpp"
#include "peca/multi_threshold.hpp"
#include "peca/sim.hpp"

using namespace peca;

namespace {

// Every non-increasing sequence N >= K_1 >= ... >= K_M >= 0.
void for_each_process(std::size_t n, std::size_t m, const std::function<void(const TriggerCoincidenceProcess&)>& f) {
    std::vector<std::size_t> k(m);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t cap) {
        if (i == m) {
            f(TriggerCoincidenceProcess(k, n));
            return;
        }
        for (std::size_t v = 0; v <= cap; ++v) {
            k[i] = v;
            rec(i + 1, v);
        }
    };
    rec(0, n);
}

std::vector<double> random_pis(Rng& rng, std::size_t m) {
    std::vector<double> pis(m);
    for (auto& p : pis) p = rng.uniform();
    std::sort(pis.rbegin(), pis.rend());
    // Exercise exact ties and pi = 1 now and then.
    if (m > 1 && rng.below(4) == 0) pis[1] = pis[0];
    if (rng.below(5) == 0) pis[0] = 1.0;
    return pis;
}

TimeSeries shuffled_ramp(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 1.0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    return TimeSeries(v);
}

}  // namespace

TEST_CASE("empirical quantile") {
    const std::vector<double> sorted{1, 2, 3, 4};
    CHECK(empirical_quantile(sorted, 0.0) == 1);
    CHECK(empirical_quantile(sorted, 0.25) == 1);
    CHECK(empirical_quantile(sorted, 0.26) == 2);
    CHECK(empirical_quantile(sorted, 0.5) == 2);
    CHECK(empirical_quantile(sorted, 1.0) == 4);
}

TEST_CASE("ladder from quantiles") {
    const TimeSeries x = shuffled_ramp(100, 3);
    const auto two = build_ladder_from_quantiles(x, 0.75, 1.0, 2);
    CHECK(std::vector<double>(two.thresholds().begin(), two.thresholds().end()) == std::vector<double>{75, 100});
    const auto one = build_ladder_from_quantiles(x, 0.5, 0.5, 1);
    CHECK(one.size() == 1);
    CHECK(one.thresholds()[0] == 50);
    CHECK(build_ladder_from_quantiles(x, 0.75, 1.0, 32).size() == 26);
    const auto full = build_ladder_from_quantiles(shuffled_ramp(4096, 4), 0.75, 1.0, 32);
    CHECK(full.size() == 32);
    CHECK(full.levels().front() == 0.75);
    CHECK(full.levels().back() == 1.0);

    CHECK_THROWS_AS(build_ladder_from_quantiles(TimeSeries(std::vector<double>(10, 2.0)), 0.1, 0.9, 4), Error);
    CHECK_THROWS_AS(build_ladder_from_quantiles(x, 0.9, 0.5, 4), Error);
    CHECK_THROWS_AS(build_ladder_from_quantiles(x, 0.5, 0.5, 2), Error);
    CHECK_THROWS_AS(build_ladder_from_quantiles(x, 0.5, 0.9, 0), Error);
    CHECK_THROWS_AS(ThresholdLadder({1.0, 1.0}), Error);
}

TEST_CASE("tied thresholds collapse and the ladder stays strictly increasing") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(200);
        for (auto& d : v) d = static_cast<double>(rng.below(6));
        const TimeSeries x(v);
        const auto ladder = build_ladder_from_quantiles(x, 0.1, 1.0, 32);
        CHECK(ladder.requested_size() == 32);
        CHECK(ladder.size() <= 32);
        for (std::size_t i = 1; i < ladder.size(); ++i) {
            CHECK(ladder.thresholds()[i] > ladder.thresholds()[i - 1]);
            CHECK(ladder.levels()[i] > ladder.levels()[i - 1]);
        }
    }
}

TEST_CASE("canonical ladder") {
    const auto ladder = canonical_ladder(TimeSeries({3, 1, 3, 2}));
    CHECK(std::vector<double>(ladder.thresholds().begin(), ladder.thresholds().end()) == std::vector<double>{1, 2, 3});
    CHECK(std::vector<double>(ladder.levels().begin(), ladder.levels().end()) ==
          std::vector<double>{0.25, 0.5, 0.75});
}

TEST_CASE("trigger coincidence process") {
    const TimeSeries x = sim::gen_ma_exponential(500, 8, 2);
    const EventSeries e = sim::gen_independent_events(500, 20, 3);
    const std::size_t delta = 5;
    const auto ladder = build_ladder_from_quantiles(x, 0.2, 1.0, 16);
    const auto k = compute_tcp(e, x, delta, ladder);
    CHECK(k.n_events() == 20);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        CHECK(k.counts()[i] == count_trigger_exceedances(e, x, ladder.thresholds()[i], delta).count);
        if (i > 0) CHECK(k.counts()[i] <= k.counts()[i - 1]);
    }
    CHECK(k.counts().back() == 0);

    const ThresholdLadder below({-1.0, 0.0});
    const auto all = compute_tcp(e, x, delta, below);
    CHECK(all.counts()[0] == e.count() - events_past_horizon(e, delta).size());

    CHECK_THROWS_AS(TriggerCoincidenceProcess({2, 3}, 5), Error);
    CHECK_THROWS_AS(TriggerCoincidenceProcess({6}, 5), Error);
}

TEST_CASE("tcp nll") {
    CHECK(tcp_nll(TriggerCoincidenceProcess({4}, 4), std::vector<double>{1.0}) == 0.0);
    CHECK(tcp_nll(TriggerCoincidenceProcess({3}, 4), std::vector<double>{1.0}) == INFINITY);
    CHECK(tcp_nll(TriggerCoincidenceProcess({3, 3}, 4), std::vector<double>{0.5, 0.5}) ==
          doctest::Approx(-binomial::log_pmf(3, 4, 0.5)));
    CHECK(tcp_nll(TriggerCoincidenceProcess({3, 2}, 4), std::vector<double>{0.5, 0.5}) == INFINITY);
    CHECK(tcp_nll(TriggerCoincidenceProcess({3, 1}, 4), std::vector<double>{0.5, 0.25}) ==
          doctest::Approx(-binomial::log_pmf(3, 4, 0.5) - binomial::log_pmf(1, 3, 0.5)));
    CHECK_THROWS_AS(tcp_nll(TriggerCoincidenceProcess({1, 1}, 2), std::vector<double>{0.2, 0.5}), Error);
    CHECK_THROWS_AS(tcp_nll(TriggerCoincidenceProcess({1, 1}, 2), std::vector<double>{0.5}), Error);
    CHECK_THROWS_AS(tcp_nll(TriggerCoincidenceProcess({1}, 2), std::vector<double>{0.0}), Error);
}

TEST_CASE("process likelihood sums to one") {
    Rng rng(17);
    for (std::size_t m = 1; m <= 3; ++m) {
        for (std::size_t n = 0; n <= 6; ++n) {
            for (int trial = 0; trial < 20; ++trial) {
                const auto pis = random_pis(rng, m);
                double total = 0.0;
                for_each_process(n, m, [&](const TriggerCoincidenceProcess& p) { total += std::exp(-tcp_nll(p, pis)); });
                REQUIRE(total == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("permutation") {
    Rng rng(9);
    SUBCASE("edge cases") {
        const EventSeries full(5, {1, 2, 3, 4, 5});
        CHECK(permute_events(full, rng) == full);
        const EventSeries none(5, {});
        CHECK(permute_events(none, rng).count() == 0);
    }
    SUBCASE("uniform occupancy") {
        const std::size_t t_len = 20, n = 5, draws = 20000;
        const EventSeries e(t_len, {1, 2, 3, 4, 5});
        std::vector<std::size_t> hits(t_len + 1);
        for (std::size_t d = 0; d < draws; ++d) {
            const EventSeries p = permute_events(e, rng);
            REQUIRE(p.count() == n);
            REQUIRE(p.length() == t_len);
            for (std::size_t t : p.occurrences()) ++hits[t];
        }
        const double q = static_cast<double>(n) / t_len;
        const double se = std::sqrt(q * (1 - q) / draws);
        for (std::size_t t = 1; t <= t_len; ++t) {
            CHECK(std::abs(static_cast<double>(hits[t]) / draws - q) < 4 * se);
        }
    }
}

TEST_CASE("monte carlo p-value") {
    const std::vector<double> null{1.0, 2.0, 3.0, 4.0};
    CHECK(monte_carlo_pvalue(10.0, null) == doctest::Approx(1.0 / 5.0));
    CHECK(monte_carlo_pvalue(0.5, null) == 1.0);
    CHECK(monte_carlo_pvalue(3.0, null) == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("multiple-threshold test") {
    const std::size_t len = 1000, delta = 7;
    const TimeSeries x = sim::gen_ma_exponential(len, 8, 21);
    const GevParams theta = fit_gev_mle(block_maxima(x, delta)).params;
    const auto ladder = build_ladder_from_quantiles(x, 0.75, 1.0, 16);

    SUBCASE("deterministic across worker counts") {
        const EventSeries e = sim::gen_independent_events(len, 25, 4);
        const auto one = mc_multi_threshold_test(e, x, delta, ladder, theta, 300, 77, 1);
        const auto many = mc_multi_threshold_test(e, x, delta, ladder, theta, 300, 77, 7);
        CHECK(one.null_statistics == many.null_statistics);
        CHECK(one.p_hat == many.p_hat);
        CHECK(one.p_hat == doctest::Approx(static_cast<double>(1 + one.exceedances) / 301));
        CHECK(one.p_hat > 0.0);
        CHECK(one.p_hat <= 1.0);
        CHECK(one.null_summary.min <= one.null_summary.median);
        CHECK(one.null_summary.median <= one.null_summary.max);
    }
    SUBCASE("no replicate reaches a strongly dependent observation") {
        const EventSeries e = sim::gen_dependent_events(x, 25, empirical_quantile([&] {
            std::vector<double> v(x.values().begin(), x.values().end());
            std::sort(v.begin(), v.end());
            return v;
        }(), 0.97), 2, 5);
        const auto r = mc_multi_threshold_test(e, x, delta, ladder, theta, 200, 1, 0);
        CHECK(r.exceedances == 0);
        CHECK(r.p_hat == doctest::Approx(1.0 / 201));
    }
    SUBCASE("every event position occupied") {
        std::vector<std::size_t> all(len);
        std::iota(all.begin(), all.end(), std::size_t{1});
        const auto r = mc_multi_threshold_test(EventSeries(len, all), x, delta, ladder, theta, 50, 1, 0);
        CHECK(r.p_hat == 1.0);
    }
    CHECK_THROWS_AS(mc_multi_threshold_test(EventSeries(len, {3}), x, delta, ladder, theta, 0, 1), Error);
}

TEST_CASE("expected process and band") {
    const std::vector<double> pis{1.0, 0.5, 0.0};
    const auto band = expected_process_with_band(32, pis, 0.95);
    CHECK(band[0].expectation == 32);
    CHECK(band[0].lower == 32);
    CHECK(band[0].upper == 32);
    CHECK(band[2].expectation == 0);
    CHECK(band[2].lower == 0);
    CHECK(band[2].upper == 0);
    CHECK(band[1].expectation == 16);

    // Exact Binomial(32, 1/2) quantiles from integer counts.
    std::vector<std::uint64_t> choose(33);
    choose[0] = 1;
    for (std::size_t k = 1; k <= 32; ++k) choose[k] = choose[k - 1] * (33 - k) / k;
    const double total = std::ldexp(1.0, 32);
    auto exact_quantile = [&](double q) {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k <= 32; ++k) {
            acc += choose[k];
            if (static_cast<double>(acc) >= q * total) return k;
        }
        return std::size_t{32};
    };
    CHECK(band[1].lower == exact_quantile(0.025));
    CHECK(band[1].upper == exact_quantile(0.975));
    CHECK(band[1].lower < 16);
    CHECK(band[1].upper > 16);
}

TEST_CASE("dynamic programming extremes match exhaustive search") {
    Rng rng(23);
    auto check = [&](std::size_t n, const std::vector<double>& pis) {
        double lo = INFINITY, hi = -INFINITY;
        for_each_process(n, pis.size(), [&](const TriggerCoincidenceProcess& p) {
            const double s = tcp_nll(p, pis);
            if (!std::isfinite(s)) return;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        });
        const auto dmin = dp_extreme_nll(n, pis, Extreme::min);
        const auto dmax = dp_extreme_nll(n, pis, Extreme::max);
        REQUIRE(dmin.statistic == lo);
        REQUIRE(dmax.statistic == hi);
        REQUIRE(tcp_nll(dmin.process, pis) == lo);
        REQUIRE(tcp_nll(dmax.process, pis) == hi);
    };
    SUBCASE("single threshold is a linear scan") {
        for (double p : {0.05, 0.3, 0.5, 0.9}) check(12, {p});
    }
    SUBCASE("M = 3, N = 4") {
        std::size_t count = 0;
        for_each_process(4, 3, [&](const TriggerCoincidenceProcess&) { ++count; });
        CHECK(count == 35);
        check(4, {0.6, 0.3, 0.1});
    }
    SUBCASE("random instances up to M = 3, N = 6") {
        for (std::size_t m = 1; m <= 3; ++m) {
            for (std::size_t n = 0; n <= 6; ++n) {
                for (int trial = 0; trial < 25; ++trial) check(n, random_pis(rng, m));
            }
        }
    }
}

TEST_CASE("pointwise tests along the ladder") {
    const std::size_t len = 800, delta = 4;
    const TimeSeries x = sim::gen_ma_exponential(len, 4, 31);
    const GevParams theta = fit_gev_mle(block_maxima(x, delta)).params;
    const auto ladder = build_ladder_from_quantiles(x, 0.5, 1.0, 8);
    const EventSeries e = sim::gen_independent_events(len, 30, 8);
    const auto tests = pointwise_tests_along_ladder(e, x, delta, ladder, theta);
    REQUIRE(tests.size() == ladder.size());
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const auto single = gev_null_pvalue(tests[i].k_observed, e.count(), ladder.thresholds()[i], theta);
        CHECK(tests[i].p_value == single.p_value);
    }
    CHECK(tests.back().k_observed == 0);
    CHECK(tests.back().p_value == 1.0);

    const auto empty = pointwise_tests_along_ladder(EventSeries(len, {}), x, delta, ladder, theta);
    for (const auto& t : empty) CHECK(t.p_value == 1.0);
}
