// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_ERRORS_HPP
#define QCOMPAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qcompat {

enum class ErrorCode {
  NotHermitian,
  NumericalFailure,
  AlgebraMismatch,
  NotStarAlgebra,
  ToleranceBreakdown,
  ShapeMismatch,
  NotCP,
  InvalidPovm,
  NotCommutativeDomain,
  NotFullyQuantum,
  CodomainNotFullBlock,
  IllFormedProblem,
  CodomainMismatch,
  DimMismatch,
  ParameterMismatch,
  InvalidInstrument,
  InvalidExperiment,
  BadAxis,
  BadEta,
  ParseError,
  HashMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace qcompat

#endif
