#include "specest/errors.hpp"

namespace specest {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSchurStable: return "NotSchurStable";
    case ErrorCode::RankDeficientB: return "RankDeficientB";
    case ErrorCode::NotReachable: return "NotReachable";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::DimensionMismatchWithTheory: return "DimensionMismatchWithTheory";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotCompanionForm: return "NotCompanionForm";
    case ErrorCode::NormalizationFailure: return "NormalizationFailure";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace specest
