// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loadfc {

enum class ErrorKind {
  // data_ingest
  MalformedRow,
  DuplicateTimestamp,
  EmptySeries,
  GapTooLarge,
  NegativeDemand,
  // features
  SeriesTooShort,
  ZeroVariance,
  WindowTooLarge,
  // nn_core
  ShapeMismatch,
  NotScalarLoss,
  BadShape,
  DivisionByZeroTerm,
  StaleGradient,
  NoAverageAvailable,
  // train_eval
  NonFiniteLoss,
  ZeroActual,
  // cli / checkpoints
  SchemaMismatch,
  Io,
  Usage,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit code a CLI should use for an error of this kind:
/// 1 usage, 2 data, 3 numerical failure.
int exit_code_for(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace loadfc
