#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace peca {

/// Binary occurrence series on a grid of `length` time steps.
///
/// Occurrences are stored as strictly increasing 1-based day indices, so an
/// event on the first day has index 1 and the last admissible index equals
/// the length.
class EventSeries {
public:
    EventSeries() = default;

    /// Validates the occurrence list (sorted, unique, inside [1, length]).
    EventSeries(std::size_t length, std::vector<std::size_t> occurrences);

    /// Builds a series from a 0/1 indicator vector (index 0 is day 1).
    static EventSeries from_indicator(std::span<const unsigned char> indicator);

    std::size_t length() const noexcept { return length_; }
    std::size_t count() const noexcept { return occurrences_.size(); }
    std::span<const std::size_t> occurrences() const noexcept { return occurrences_; }

    /// True if an event occurs on 1-based day `t`.
    bool occurs(std::size_t t) const;

    /// True if any event occurs on a day in [first, last] (1-based, inclusive).
    bool any_in(std::size_t first, std::size_t last) const;

    friend bool operator==(const EventSeries&, const EventSeries&) = default;

private:
    std::size_t length_ = 0;
    std::vector<std::size_t> occurrences_;
};

/// Real-valued series x_1 ... x_T. All values are finite and T >= 1.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<double> values);

    std::size_t length() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    /// 1-based access, mirroring the day indices of EventSeries.
    double at(std::size_t t) const { return values_[t - 1]; }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
};

struct CoincidenceResult {
    std::size_t count = 0;
    std::size_t n_events = 0;

    /// count / n_events, empty when there are no events.
    std::optional<double> rate() const {
        if (n_events == 0) return std::nullopt;
        return static_cast<double>(count) / static_cast<double>(n_events);
    }
};

/// Events on days where x_t > tau (strict).
EventSeries exceedance_series(const TimeSeries& x, double tau);

/// Number of B events followed within `delta` steps by an A event. Only
/// B events with t <= T - delta can coincide, but every B event enters the
/// denominator.
CoincidenceResult count_trigger(const EventSeries& b, const EventSeries& a, std::size_t delta);

/// Number of A events preceded within `delta` steps by a B event.
CoincidenceResult count_precursor(const EventSeries& b, const EventSeries& a, std::size_t delta);

/// Trigger coincidences between `e` and the exceedances of `tau` in `x`,
/// evaluated through the window maximum max(x_t .. x_{t+delta}) > tau.
CoincidenceResult count_trigger_exceedances(const EventSeries& e, const TimeSeries& x, double tau,
                                            std::size_t delta);

/// Forward window maxima W_t = max(x_t, ..., x_{t+delta}) for t = 1 .. T - delta,
/// returned 0-based (element 0 is W_1).
std::vector<double> window_maxima(const TimeSeries& x, std::size_t delta);

/// Events that lie in the final `delta` steps and therefore can never count
/// as trigger coincidences.
std::vector<std::size_t> events_past_horizon(const EventSeries& e, std::size_t delta);

/// log2(x + 1) minus the running mean of the previous `window` transformed
/// values. The first step is compared with itself and early steps use the
/// prefix that is available, so the output keeps the input length.
TimeSeries preprocess(const TimeSeries& x, std::size_t window = 30);

}  // namespace peca
