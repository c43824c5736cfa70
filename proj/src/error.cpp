// SPDX-License-Identifier: Apache-2.0
#include "loadfc/error.hpp"

namespace loadfc {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::GapTooLarge: return "GapTooLarge";
    case ErrorKind::NegativeDemand: return "NegativeDemand";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotScalarLoss: return "NotScalarLoss";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::DivisionByZeroTerm: return "DivisionByZeroTerm";
    case ErrorKind::StaleGradient: return "StaleGradient";
    case ErrorKind::NoAverageAvailable: return "NoAverageAvailable";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::ZeroActual: return "ZeroActual";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage:
      return 1;
    case ErrorKind::NonFiniteLoss:
    case ErrorKind::NotScalarLoss:
    case ErrorKind::StaleGradient:
    case ErrorKind::NoAverageAvailable:
    case ErrorKind::DivisionByZeroTerm:
      return 3;
    default:
      return 2;
  }
}

}  // namespace loadfc
