// error.hpp - Error kinds shared by every oppc module

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oppc {

enum class ErrorKind {
    DimensionMismatch,
    NonHermitianDipole,
    NonHermitianObservable,
    NonNegligibleImaginaryPart,
    NonFinitePhase,
    GridTooCoarse,
    OutOfWindow,
    NonPositiveBeta,
    QuadratureNonConvergent,
    GridMismatch,
    KernelNotDecayed,
    StepTooLarge,
    TraceDrift,
    HistoryExhausted,
    FrequencyOffGrid,
    NotAFixedPoint,
    OrderTooHigh,
    TruncationSuspect,
    DimensionGuard,
    MaskAmplitudeMismatch,
    ContrastBelowNoiseFloor,
    ParseError,
    ValidationError,
    UnknownParameter,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

} // namespace oppc
