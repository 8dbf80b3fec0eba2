#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "peca/cli.hpp"

namespace peca::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
    while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
    return s;
}

std::optional<int> parse_int(std::string_view s) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

[[noreturn]] void input_error(const std::string& message) { throw Error(ErrorCategory::input, message); }

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open " + path.string());
    return in;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    const auto y = parse_int(text.substr(0, 4));
    const auto m = parse_int(text.substr(5, 2));
    const auto d = parse_int(text.substr(8, 2));
    if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

Json to_json(const std::vector<Warning>& warnings) {
    Json out = Json::array();
    for (const auto& w : warnings) out.push_back(Json{{"code", w.code}, {"message", w.message}});
    return out;
}

DatedSeries ingest_timeseries(std::istream& in, bool fill_zero) {
    std::string line;
    if (!std::getline(in, line)) input_error("series file is empty");
    {
        std::string header(trim(line));
        if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
        if (header != "date,value") input_error("series header must be 'date,value', got '" + header + "'");
    }

    DatedSeries out;
    std::vector<double> values;
    std::optional<Date> previous;
    std::size_t line_no = 1;
    std::size_t filled = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            input_error("line " + std::to_string(line_no) + ": expected two comma-separated fields");
        }
        const auto date = parse_date(row.substr(0, comma));
        if (!date) input_error("line " + std::to_string(line_no) + ": invalid date '" +
                               std::string(row.substr(0, comma)) + "'");
        const std::string_view value_text = trim(row.substr(comma + 1));
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
        if (ec != std::errc{} || ptr != value_text.data() + value_text.size() || !std::isfinite(value)) {
            input_error("line " + std::to_string(line_no) + ": invalid value '" + std::string(value_text) + "'");
        }
        if (value < 0.0) input_error("line " + std::to_string(line_no) + ": negative value");

        if (!previous) {
            out.start = *date;
        } else if (*date == *previous) {
            input_error("duplicate date " + format_date(*date));
        } else if (*date < *previous) {
            input_error("dates out of order at " + format_date(*date));
        } else {
            for (Date gap = *previous + std::chrono::days(1); gap < *date; gap += std::chrono::days(1)) {
                if (!fill_zero) input_error("missing date " + format_date(gap) + " (use --fill-zero to insert zeros)");
                values.push_back(0.0);
                ++filled;
            }
        }
        values.push_back(value);
        previous = date;
    }
    if (values.empty()) input_error("series file contains no data rows");
    if (filled > 0) {
        out.warnings.push_back({"filled_gaps", std::to_string(filled) + " missing days filled with zeros"});
    }
    out.series = TimeSeries(std::move(values));
    return out;
}

DatedSeries ingest_timeseries(const std::filesystem::path& path, bool fill_zero) {
    auto in = open_input(path);
    return ingest_timeseries(in, fill_zero);
}

DatedEvents ingest_events(std::istream& in, const DatedSeries& grid) {
    DatedEvents out;
    std::set<std::size_t> days;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto date = parse_date(text);
        if (!date) input_error("events line " + std::to_string(line_no) + ": invalid date '" + std::string(text) + "'");
        if (*date < grid.start || *date > grid.end()) {
            input_error("event date " + format_date(*date) + " outside the series range " + format_date(grid.start) +
                        " .. " + format_date(grid.end()));
        }
        const auto day = static_cast<std::size_t>((*date - grid.start).count()) + 1;
        if (!days.insert(day).second) {
            out.warnings.push_back({"duplicate_event", "duplicate event date " + format_date(*date) + " collapsed"});
        }
    }
    if (days.empty()) out.warnings.push_back({"no_events", "event file contains no events"});
    out.events = EventSeries(grid.series.length(), std::vector<std::size_t>(days.begin(), days.end()));
    return out;
}

DatedEvents ingest_events(const std::filesystem::path& path, const DatedSeries& grid) {
    auto in = open_input(path);
    return ingest_events(in, grid);
}

}  // namespace peca::cli
