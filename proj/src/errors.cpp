#include "roughhodge/errors.hpp"

namespace rhodge {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotNilpotent: return "NotNilpotent";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankAmbiguous: return "RankAmbiguous";
    case ErrorKind::MetricMismatch: return "MetricMismatch";
    case ErrorKind::NotComplementary: return "NotComplementary";
    case ErrorKind::DimMismatchKernel: return "DimMismatchKernel";
    case ErrorKind::GradingViolation: return "GradingViolation";
    case ErrorKind::SplitCheckFailed: return "SplitCheckFailed";
    case ErrorKind::NotAComplex: return "NotAComplex";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::NotSubcomplex: return "NotSubcomplex";
    case ErrorKind::NotFlat: return "NotFlat";
    case ErrorKind::NotOdd: return "NotOdd";
    case ErrorKind::NonIntegerEntries: return "NonIntegerEntries";
    case ErrorKind::CarrierMismatch: return "CarrierMismatch";
    case ErrorKind::FactorNotElliptic: return "FactorNotElliptic";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, double diagnostic)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      diagnostic_(diagnostic)
{
}

}  // namespace rhodge
