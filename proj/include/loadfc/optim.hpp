// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "loadfc/tensor.hpp"

namespace loadfc {

/// value -= eta * grad, then clears the gradients. Throws StaleGradient if
/// any parameter has not been through a backward pass since its last step.
void sgd_step(std::span<Parameter* const> params, double eta);

/// Folds the current value into the running mean of snapshots.
void asgd_accumulate(Parameter& p);

/// Swaps averaged weights in for prediction and restores the raw training
/// weights when destroyed.
class AsgdSwap {
 public:
  /// Throws NoAverageAvailable if any parameter has no snapshot yet.
  explicit AsgdSwap(std::span<Parameter* const> params);
  ~AsgdSwap();
  AsgdSwap(const AsgdSwap&) = delete;
  AsgdSwap& operator=(const AsgdSwap&) = delete;

 private:
  std::vector<Parameter*> params_;
};

/// True when every parameter has at least one ASGD snapshot.
bool asgd_ready(std::span<Parameter* const> params) noexcept;

}  // namespace loadfc
