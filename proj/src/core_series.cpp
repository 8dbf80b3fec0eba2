#include "peca/core_series.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "peca/error.hpp"

namespace peca {

EventSeries::EventSeries(std::size_t length, std::vector<std::size_t> occurrences)
    : length_(length), occurrences_(std::move(occurrences)) {
    for (std::size_t i = 0; i < occurrences_.size(); ++i) {
        const std::size_t t = occurrences_[i];
        if (t < 1 || t > length_) {
            throw_invalid("event index " + std::to_string(t) + " outside [1, " +
                          std::to_string(length_) + "]");
        }
        if (i > 0 && occurrences_[i - 1] >= t) {
            throw_invalid("event indices must be strictly increasing");
        }
    }
}

EventSeries EventSeries::from_indicator(std::span<const unsigned char> indicator) {
    std::vector<std::size_t> occ;
    for (std::size_t i = 0; i < indicator.size(); ++i) {
        if (indicator[i] != 0) occ.push_back(i + 1);
    }
    return EventSeries(indicator.size(), std::move(occ));
}

bool EventSeries::occurs(std::size_t t) const {
    return std::binary_search(occurrences_.begin(), occurrences_.end(), t);
}

bool EventSeries::any_in(std::size_t first, std::size_t last) const {
    auto it = std::lower_bound(occurrences_.begin(), occurrences_.end(), first);
    return it != occurrences_.end() && *it <= last;
}

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw_invalid("time series must contain at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw_invalid("non-finite value at day " + std::to_string(i + 1));
        }
    }
}

namespace {

void require_aligned(std::size_t lhs, std::size_t rhs, std::size_t delta) {
    if (lhs != rhs) {
        throw_invalid("series lengths differ (" + std::to_string(lhs) + " vs " +
                      std::to_string(rhs) + ")");
    }
    if (delta >= lhs) {
        throw_invalid("time tolerance " + std::to_string(delta) +
                      " must be smaller than the series length " + std::to_string(lhs));
    }
}

}  // namespace

EventSeries exceedance_series(const TimeSeries& x, double tau) {
    std::vector<std::size_t> occ;
    const auto v = x.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > tau) occ.push_back(i + 1);
    }
    return EventSeries(v.size(), std::move(occ));
}

CoincidenceResult count_trigger(const EventSeries& b, const EventSeries& a, std::size_t delta) {
    require_aligned(b.length(), a.length(), delta);
    const std::size_t horizon = b.length() - delta;
    CoincidenceResult result{0, b.count()};
    for (std::size_t t : b.occurrences()) {
        if (t > horizon) break;
        if (a.any_in(t, t + delta)) ++result.count;
    }
    return result;
}

CoincidenceResult count_precursor(const EventSeries& b, const EventSeries& a, std::size_t delta) {
    require_aligned(b.length(), a.length(), delta);
    CoincidenceResult result{0, a.count()};
    for (std::size_t t : a.occurrences()) {
        if (t < delta + 1) continue;
        if (b.any_in(t - delta, t)) ++result.count;
    }
    return result;
}

CoincidenceResult count_trigger_exceedances(const EventSeries& e, const TimeSeries& x, double tau,
                                            std::size_t delta) {
    require_aligned(e.length(), x.length(), delta);
    const std::size_t horizon = e.length() - delta;
    const auto v = x.values();
    CoincidenceResult result{0, e.count()};
    for (std::size_t t : e.occurrences()) {
        if (t > horizon) break;
        const auto first = v.begin() + static_cast<std::ptrdiff_t>(t - 1);
        const double peak = *std::max_element(first, first + static_cast<std::ptrdiff_t>(delta + 1));
        if (peak > tau) ++result.count;
    }
    return result;
}

std::vector<double> window_maxima(const TimeSeries& x, std::size_t delta) {
    const auto v = x.values();
    if (delta >= v.size()) {
        throw_invalid("time tolerance must be smaller than the series length");
    }
    const std::size_t out_len = v.size() - delta;
    std::vector<double> out(out_len);
    // Monotone deque sliding-window maximum.
    std::deque<std::size_t> candidates;
    for (std::size_t i = 0; i < v.size(); ++i) {
        while (!candidates.empty() && v[candidates.back()] <= v[i]) candidates.pop_back();
        candidates.push_back(i);
        if (i >= delta) {
            const std::size_t start = i - delta;
            while (candidates.front() < start) candidates.pop_front();
            out[start] = v[candidates.front()];
        }
    }
    return out;
}

std::vector<std::size_t> events_past_horizon(const EventSeries& e, std::size_t delta) {
    std::vector<std::size_t> out;
    const std::size_t horizon = e.length() > delta ? e.length() - delta : 0;
    for (std::size_t t : e.occurrences()) {
        if (t > horizon) out.push_back(t);
    }
    return out;
}

TimeSeries preprocess(const TimeSeries& x, std::size_t window) {
    if (window == 0) throw_invalid("preprocessing window must be positive");
    const auto v = x.values();
    std::vector<double> logged(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0.0) {
            throw Error(ErrorCategory::input,
                        "negative value at day " + std::to_string(i + 1) + " cannot be log-transformed");
        }
        logged[i] = std::log2(v[i] + 1.0);
    }
    std::vector<double> out(v.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const std::size_t n_prev = std::min(i, window);
        // Differences against the current value keep a constant run at exactly 0.
        double sum = 0.0;
        for (std::size_t s = i - n_prev; s < i; ++s) sum += logged[i] - logged[s];
        out[i] = sum / static_cast<double>(n_prev) + 0.0;
    }
    return TimeSeries(std::move(out));
}

}  // namespace peca
