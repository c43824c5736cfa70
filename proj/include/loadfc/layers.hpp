// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loadfc/init.hpp"
#include "loadfc/tape.hpp"

namespace loadfc {

std::string_view to_string(Activation act) noexcept;
std::optional<Activation> parse_activation(std::string_view tag) noexcept;
/// sigma'(0): 1 for identity and tanh, 0.25 for sigmoid.
double activation_derivative_at_zero(Activation act) noexcept;

/// Fully connected output layer, out = act(input * weight + bias).
struct DenseParams {
  Parameter weight;  // [in, out]
  Parameter bias;    // [out]
  Activation activation = Activation::Identity;

  DenseParams() = default;
  /// Weight from `init`; bias zero for every scheme.
  DenseParams(std::string_view name, std::size_t in, std::size_t out,
              Activation act, Initializer init, CounterRng& rng,
              std::uint64_t seed);

  std::size_t in() const noexcept { return weight.value.rows(); }
  std::size_t out() const noexcept { return weight.value.cols(); }
  std::vector<Parameter*> parameters() { return {&weight, &bias}; }
};

/// GRU cell: z = s(xW_z + hU_z + b_z), r = s(xW_r + hU_r + b_r),
/// h~ = tanh(xW_h + (r*h)U_h + b_h), h' = (1 - z)*h + z*h~.
struct GruParams {
  Parameter w_z, w_r, w_h;  // [input_dim, hidden]
  Parameter u_z, u_r, u_h;  // [hidden, hidden]
  Parameter b_z, b_r, b_h;  // [hidden]

  GruParams() = default;
  /// Xavier-uniform weights, zero biases.
  GruParams(std::string_view name, std::size_t input_dim, std::size_t hidden,
            CounterRng& rng, std::uint64_t seed);

  std::size_t input_dim() const noexcept { return w_z.value.rows(); }
  std::size_t hidden() const noexcept { return u_z.value.rows(); }
  std::vector<Parameter*> parameters() {
    return {&w_z, &w_r, &w_h, &u_z, &u_r, &u_h, &b_z, &b_r, &b_h};
  }
};

/// input [batch, in] -> [batch, out]
Var dense_forward(DenseParams& params, Var input);

/// x [batch, in], h_prev [batch, hidden] -> h' [batch, hidden]
Var gru_step(GruParams& params, Var x, Var h_prev);
/// Same cell spelled out in primitive tape ops; the reference for gru_step.
Var gru_step_composed(GruParams& params, Var x, Var h_prev);

/// Runs the cell over every row of `sequence` [T, in] starting from `h0`;
/// returns the T hidden states.
std::vector<Var> gru_sequence(GruParams& params, Var sequence, Var h0);

}  // namespace loadfc
