#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "peca/error.hpp"
#include "peca/sim.hpp"

using namespace peca;

namespace {

double lag1_autocorrelation(std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        den += (v[i] - mean) * (v[i] - mean);
        if (i > 0) num += (v[i] - mean) * (v[i - 1] - mean);
    }
    return num / den;
}

}  // namespace

TEST_CASE("raw exponential draws have unit mean and variance") {
    const auto raw = sim::ma_exponential_raw(4096, 0, 7);
    const double n = static_cast<double>(raw.size());
    const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
    double var = 0;
    for (double v : raw) var += (v - mean) * (v - mean);
    var /= n - 1;
    CHECK(std::abs(mean - 1.0) < 5.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(8.0 / n));
    CHECK(sim::ma_exponential_raw(4096, 1, 7) == raw);
}

TEST_CASE("moving average is a causal window mean") {
    const auto raw = sim::ma_exponential_raw(50, 0, 3);
    const auto ma = sim::ma_exponential_raw(50, 4, 3);
    for (std::size_t t = 0; t < 50; ++t) {
        const std::size_t first = t >= 3 ? t - 3 : 0;
        double sum = 0;
        for (std::size_t s = first; s <= t; ++s) sum += raw[s];
        CHECK(ma[t] == doctest::Approx(sum / static_cast<double>(t - first + 1)));
    }
}

TEST_CASE("generated series") {
    for (std::size_t order : {0, 8, 32, 64}) {
        const TimeSeries x = sim::gen_ma_exponential(4096, order, 11);
        CHECK(x.length() == 4096);
        CHECK(*std::min_element(x.values().begin(), x.values().end()) == 0.0);
        for (double v : x.values()) REQUIRE(std::isfinite(v));
        const double n = 4096.0;
        const double mean = std::accumulate(x.values().begin(), x.values().end(), 0.0) / n;
        double var = 0;
        for (double v : x.values()) var += (v - mean) * (v - mean);
        CHECK(var / (n - 1) == doctest::Approx(1.0));
    }
    CHECK(lag1_autocorrelation(sim::gen_ma_exponential(4096, 32, 5).values()) >
          lag1_autocorrelation(sim::gen_ma_exponential(4096, 0, 5).values()));
    auto values = [](std::uint64_t seed) {
        const TimeSeries x = sim::gen_ma_exponential(300, 8, seed);
        return std::vector<double>(x.values().begin(), x.values().end());
    };
    CHECK(values(5) == values(5));
    CHECK(values(5) != values(6));
    CHECK_THROWS_AS(sim::gen_ma_exponential(8, 8, 1), Error);
}

TEST_CASE("independent events") {
    CHECK(sim::gen_independent_events(10, 0, 1).count() == 0);
    CHECK(sim::gen_independent_events(10, 10, 1).count() == 10);
    CHECK_THROWS_AS(sim::gen_independent_events(10, 11, 1), Error);
    std::vector<std::size_t> hits(41);
    const std::size_t draws = 20000;
    for (std::size_t s = 0; s < draws; ++s) {
        const auto e = sim::gen_independent_events(40, 4, s);
        REQUIRE(e.count() == 4);
        for (std::size_t t : e.occurrences()) ++hits[t];
    }
    const double q = 0.1, se = std::sqrt(q * (1 - q) / draws);
    for (std::size_t t = 1; t <= 40; ++t) CHECK(std::abs(static_cast<double>(hits[t]) / draws - q) < 4 * se);
}

TEST_CASE("dependent events") {
    const TimeSeries x = sim::gen_ma_exponential(4096, 8, 2);
    const double tau = 4.0;
    const std::size_t lag = 4;
    const EventSeries e = sim::gen_dependent_events(x, 32, tau, lag, 9);
    CHECK(e.count() == 32);
    for (std::size_t t : e.occurrences()) CHECK(x.at(t + lag) > tau);
    for (std::size_t delta = lag; delta <= lag + 3; ++delta) {
        if (events_past_horizon(e, delta).empty()) {
            const auto r = count_trigger_exceedances(e, x, tau, delta);
            CHECK(r.count == r.n_events);
        }
    }
    CHECK_THROWS_AS(sim::gen_dependent_events(x, 32, 1e9, lag, 9), Error);
    try {
        sim::gen_dependent_events(x, 32, 1e9, lag, 9);
    } catch (const Error& err) {
        CHECK(err.category() == ErrorCategory::input);
    }
}

TEST_CASE("null comparison structure") {
    sim::SimConfig config;
    config.length = 1024;
    config.ma_orders = {0, 8};
    config.n_events = 16;
    config.replicates = 100;
    config.thresholds = {2.0, 3.0};
    const auto cmp = sim::null_distribution_comparison(config);
    CHECK(cmp.cells.size() == 4);
    CHECK(cmp.fits.size() == 2);
    CHECK(cmp.rows.size() == 4 * 17);
    for (std::size_t c = 0; c < 4; ++c) {
        double prev = 0.0;
        for (std::size_t k = 0; k <= 16; ++k) {
            const auto& row = cmp.rows[c * 17 + k];
            CHECK(row.k == k);
            CHECK(row.empirical_cmf >= prev);
            prev = row.empirical_cmf;
        }
        CHECK(prev == 1.0);
        CHECK(cmp.rows[c * 17 + 16].bernoulli_cmf == doctest::Approx(1.0));
        CHECK(cmp.rows[c * 17 + 16].gev_cmf == doctest::Approx(1.0));
    }
    config.workers = 1;
    const auto serial = sim::null_distribution_comparison(config);
    std::ostringstream a, b;
    sim::write_comparison_csv(a, cmp);
    sim::write_comparison_csv(b, serial);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("k,order,tau,empirical_cmf,bernoulli_cmf,gev_cmf\n", 0) == 0);

    config.replicates = 0;
    CHECK_THROWS_AS(sim::null_distribution_comparison(config), Error);
}
