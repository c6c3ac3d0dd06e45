#include "scorebench/errors.hpp"

namespace scorebench {

const char* err_name(Err code) {
    switch (code) {
        case Err::MissingColumn: return "MissingColumn";
        case Err::UnparseableDate: return "UnparseableDate";
        case Err::NonFiniteValue: return "NonFiniteValue";
        case Err::NonMonotoneDates: return "NonMonotoneDates";
        case Err::NonPositiveLevel: return "NonPositiveLevel";
        case Err::DegenerateColumn: return "DegenerateColumn";
        case Err::BetaOutOfRange: return "BetaOutOfRange";
        case Err::DegenerateEnsemble: return "DegenerateEnsemble";
        case Err::NonPositiveOrder: return "NonPositiveOrder";
        case Err::NonMonotoneQuantileFunction: return "NonMonotoneQuantileFunction";
        case Err::RangeExcludesObservation: return "RangeExcludesObservation";
        case Err::SingularCovariance: return "SingularCovariance";
        case Err::RankDeficientWindow: return "RankDeficientWindow";
        case Err::SolverDivergence: return "SolverDivergence";
        case Err::NonConvergence: return "NonConvergence";
        case Err::CholeskyFailure: return "CholeskyFailure";
        case Err::InsufficientWindow: return "InsufficientWindow";
        case Err::InsufficientHistory: return "InsufficientHistory";
        case Err::BadGridSpec: return "BadGridSpec";
        case Err::AllPairsExcluded: return "AllPairsExcluded";
        case Err::LengthMismatch: return "LengthMismatch";
        case Err::EmptyInput: return "EmptyInput";
        case Err::SubsampleExceedsN: return "SubsampleExceedsN";
        case Err::TooFewPoints: return "TooFewPoints";
        case Err::DegenerateDgpScore: return "DegenerateDgpScore";
        case Err::MissingTensor: return "MissingTensor";
        case Err::ConfigError: return "ConfigError";
        case Err::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace scorebench
