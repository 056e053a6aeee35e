#include "rcov/error.hpp"

namespace rcov {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::construction_degenerate: return "construction-degenerate";
    case ErrorKind::undefined_exponent: return "undefined-exponent";
    case ErrorKind::zero_measure_restriction: return "zero-measure-restriction";
    case ErrorKind::no_mass_above_threshold: return "no-mass-above-threshold";
    case ErrorKind::extrapolation_refused: return "extrapolation-refused";
    case ErrorKind::precision_not_reached: return "precision-not-reached";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

PrecisionError::PrecisionError(double lower, double upper, const std::string& what)
    : Error(ErrorKind::precision_not_reached, what), lower_(lower), upper_(upper)
{
}

void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace rcov
