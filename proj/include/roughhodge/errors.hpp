#ifndef ROUGHHODGE_ERRORS_HPP
#define ROUGHHODGE_ERRORS_HPP

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rhodge {

enum class ErrorKind {
    NotHermitian,
    NotPositiveDefinite,
    NotNilpotent,
    DimensionMismatch,
    RankAmbiguous,
    MetricMismatch,
    NotComplementary,
    DimMismatchKernel,
    GradingViolation,
    SplitCheckFailed,
    NotAComplex,
    EmptyGrid,
    NotSubcomplex,
    NotFlat,
    NotOdd,
    NonIntegerEntries,
    CarrierMismatch,
    FactorNotElliptic,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/**
 * Every failure raised by the library. `diagnostic()` carries the offending
 * numeric quantity where one exists (nilpotency residual, holonomy defect,
 * asymmetry, ...), NaN otherwise.
 */
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          double diagnostic = std::numeric_limits<double>::quiet_NaN());

    ErrorKind kind() const noexcept { return kind_; }
    double diagnostic() const noexcept { return diagnostic_; }

private:
    ErrorKind kind_;
    double diagnostic_;
};

}  // namespace rhodge

#endif
