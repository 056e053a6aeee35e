#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcov {

enum class ErrorKind {
    invalid_parameter,
    construction_degenerate,
    undefined_exponent,
    zero_measure_restriction,
    no_mass_above_threshold,
    extrapolation_refused,
    precision_not_reached,
    io_error,
    internal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thrown when a certified bracket could not be tightened to the requested
// tolerance within the budget. The bracket itself is still valid.
class PrecisionError : public Error {
public:
    PrecisionError(double lower, double upper, const std::string& what);
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
    if (!cond) {
        fail(kind, what);
    }
}

} // namespace rcov
