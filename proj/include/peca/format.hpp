#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace peca {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double value) {
    char buffer[32];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buffer, end);
}

}  // namespace peca
