#pragma once

#include <stdexcept>
#include <string>

namespace sdgeom {

enum class ErrorKind {
    invalid_argument,
    degenerate,
    step_too_small,
    non_finite,
    line_search,
    precondition,
    io,
    config,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::step_too_small: return "step_too_small";
        case ErrorKind::non_finite: return "non_finite";
        case ErrorKind::line_search: return "line_search";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::io: return "io";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

// All library failures are reported through this type; `kind()` lets callers
// branch without parsing the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace sdgeom
