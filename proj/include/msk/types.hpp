#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace msk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class ErrorCode {
    InvalidPoint,
    DuplicatePoint,
    SizeCapExceeded,
    LowAccuracy,
    NodeEvaluationFailure,
    DegenerateKernel,
    ThresholdUnreachable,
    SearchExhausted,
    SingularBasis,
    HypothesisViolated,
    NotApplicable,
    NotCoprime,
    OptimizationStalled,
    GroupLawViolation,
    NotPositiveDefinite,
    ContractionRepairFailed,
    ParseError,
};

inline std::string_view toString(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::LowAccuracy: return "LowAccuracy";
    case ErrorCode::NodeEvaluationFailure: return "NodeEvaluationFailure";
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::ThresholdUnreachable: return "ThresholdUnreachable";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::OptimizationStalled: return "OptimizationStalled";
    case ErrorCode::GroupLawViolation: return "GroupLawViolation";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ContractionRepairFailed: return "ContractionRepairFailed";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure in the library is reported through this exception; the code
/// lets callers (and the CLI exit-status mapping) branch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(toString(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Boundary sampling size used by sup-norm and quadrature routines.
/// The MSK_GRID environment variable overrides the default of 4096.
inline int boundaryGridSize() {
    if (const char* env = std::getenv("MSK_GRID")) {
        char* end = nullptr;
        long value = std::strtol(env, &end, 10);
        if (end != env && value >= 64 && value <= (1L << 22)) return static_cast<int>(value);
    }
    return 4096;
}

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFiveRootTwo = 7.0710678118654752440;  // 5*sqrt(2)

} // namespace msk
