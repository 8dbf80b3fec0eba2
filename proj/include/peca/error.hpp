#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace peca {

// Broad failure classes. The CLI maps each to a distinct exit code and
// reports the name in its machine-readable error object.
enum class ErrorCategory {
    invalid_argument,  // precondition or domain violation
    input,             // malformed or inconsistent input data
    numerical,         // fitting or optimisation failure
    io,                // filesystem problems
};

constexpr std::string_view to_string(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::invalid_argument: return "invalid_argument";
        case ErrorCategory::input: return "input";
        case ErrorCategory::numerical: return "numerical";
        case ErrorCategory::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void throw_invalid(const std::string& message) {
    throw Error(ErrorCategory::invalid_argument, message);
}

}  // namespace peca
