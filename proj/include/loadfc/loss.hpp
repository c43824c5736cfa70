// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

#include "loadfc/tape.hpp"

namespace loadfc {

// F = forecast (trainable path), A = actual. All return a [1,1] node.

/// mean |F - A|
Var loss_mae(Var forecast, Var actual);
/// mean 2|F - A| / (|F| + |A|). Throws DivisionByZeroTerm where F = A = 0.
Var loss_smape(Var forecast, Var actual);
/// mean 2|F - A| / max(|F| + |A| + eps, 0.5 + eps)
Var loss_ssmape(Var forecast, Var actual, double epsilon);
/// 1/(2n) sum (A - F)^2 over the n elements.
Var loss_quadratic(Var forecast, Var actual);
/// (beta/2) sum R^2
Var l2_activation_penalty(Var rnn_outputs, double beta);

enum class LossKind { Ssmape, Mae };
std::string_view to_string(LossKind k) noexcept;
std::optional<LossKind> parse_loss(std::string_view tag) noexcept;

}  // namespace loadfc
