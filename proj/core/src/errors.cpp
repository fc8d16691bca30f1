// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include "qcompat/errors.hpp"

namespace qcompat {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::NotStarAlgebra: return "NotStarAlgebra";
    case ErrorCode::ToleranceBreakdown: return "ToleranceBreakdown";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotCP: return "NotCP";
    case ErrorCode::InvalidPovm: return "InvalidPovm";
    case ErrorCode::NotCommutativeDomain: return "NotCommutativeDomain";
    case ErrorCode::NotFullyQuantum: return "NotFullyQuantum";
    case ErrorCode::CodomainNotFullBlock: return "CodomainNotFullBlock";
    case ErrorCode::IllFormedProblem: return "IllFormedProblem";
    case ErrorCode::CodomainMismatch: return "CodomainMismatch";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ParameterMismatch: return "ParameterMismatch";
    case ErrorCode::InvalidInstrument: return "InvalidInstrument";
    case ErrorCode::InvalidExperiment: return "InvalidExperiment";
    case ErrorCode::BadAxis: return "BadAxis";
    case ErrorCode::BadEta: return "BadEta";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::HashMismatch: return "HashMismatch";
  }
  return "UnknownError";
}

}  // namespace qcompat
