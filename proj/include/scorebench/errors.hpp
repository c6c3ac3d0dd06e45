// Typed error codes shared across the scorebench library.
#pragma once

#include <stdexcept>
#include <string>

namespace scorebench {

enum class Err {
    // ingest
    MissingColumn,
    UnparseableDate,
    NonFiniteValue,
    NonMonotoneDates,
    NonPositiveLevel,
    DegenerateColumn,
    // scoring
    BetaOutOfRange,
    DegenerateEnsemble,
    NonPositiveOrder,
    NonMonotoneQuantileFunction,
    RangeExcludesObservation,
    SingularCovariance,
    // models
    RankDeficientWindow,
    SolverDivergence,
    NonConvergence,
    CholeskyFailure,
    InsufficientWindow,
    // harness
    InsufficientHistory,
    BadGridSpec,
    // metrics
    AllPairsExcluded,
    LengthMismatch,
    EmptyInput,
    SubsampleExceedsN,
    TooFewPoints,
    DegenerateDgpScore,
    MissingTensor,
    // cli
    ConfigError,
    IoError,
};

const char* err_name(Err code);

// Exception type carrying a machine-checkable code plus a human message
// with row/column/file context where applicable.
class Error : public std::runtime_error {
  public:
    Error(Err code, const std::string& message)
        : std::runtime_error(std::string(err_name(code)) + ": " + message), code_(code) {}

    Err code() const { return code_; }

  private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace scorebench
