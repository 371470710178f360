#pragma once

#include <stdexcept>
#include <string>

namespace specest {

enum class ErrorCode {
  Ok = 0,
  NotHermitian,
  NotPositiveDefinite,
  NotPSD,
  NotPD,
  ConvergenceFailure,
  DimensionMismatch,
  NotSchurStable,
  RankDeficientB,
  NotReachable,
  GridMismatch,
  NotStable,
  DimensionMismatchWithTheory,
  NotAdmissible,
  SolverDivergence,
  Infeasible,
  NotCompanionForm,
  NormalizationFailure,
  DegreeMismatch,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace specest
