// SPDX-License-Identifier: Apache-2.0
#include "loadfc/layers.hpp"

#include <array>
#include <string>

#include "loadfc/error.hpp"

namespace loadfc {

std::string_view to_string(Activation act) noexcept {
  switch (act) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "unknown";
}

std::optional<Activation> parse_activation(std::string_view tag) noexcept {
  for (Activation a : {Activation::Identity, Activation::Tanh, Activation::Sigmoid})
    if (to_string(a) == tag) return a;
  return std::nullopt;
}

double activation_derivative_at_zero(Activation act) noexcept {
  switch (act) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: return 1.0;  // sech^2(0)
    case Activation::Sigmoid: return 0.25;  // s(0)(1 - s(0))
  }
  return 0.0;
}

DenseParams::DenseParams(std::string_view name, std::size_t in, std::size_t out,
                         Activation act, Initializer init, CounterRng& rng,
                         std::uint64_t seed)
    : weight(std::string(name) + ".weight", initialize(init, Shape{in, out}, rng),
             std::string(to_string(init)), seed),
      bias(std::string(name) + ".bias", init_zero(Shape{out}), "zero", seed),
      activation(act) {}

GruParams::GruParams(std::string_view name, std::size_t input_dim,
                     std::size_t hidden, CounterRng& rng, std::uint64_t seed) {
  const std::string n(name);
  const std::string tag(to_string(Initializer::XavierUniform));
  auto w = [&](const char* suffix, std::size_t rows) {
    return Parameter(n + suffix, init_xavier_uniform(Shape{rows, hidden}, rng),
                     tag, seed);
  };
  w_z = w(".w_z", input_dim);
  w_r = w(".w_r", input_dim);
  w_h = w(".w_h", input_dim);
  u_z = w(".u_z", hidden);
  u_r = w(".u_r", hidden);
  u_h = w(".u_h", hidden);
  b_z = Parameter(n + ".b_z", init_zero(Shape{hidden}), "zero", seed);
  b_r = Parameter(n + ".b_r", init_zero(Shape{hidden}), "zero", seed);
  b_h = Parameter(n + ".b_h", init_zero(Shape{hidden}), "zero", seed);
}

Var dense_forward(DenseParams& params, Var input) {
  Tape& t = *input.tape();
  if (input.value().cols() != params.in()) {
    throw Error(ErrorKind::ShapeMismatch,
                "dense input has " + std::to_string(input.value().cols()) +
                    " columns, layer expects " + std::to_string(params.in()));
  }
  const Var z = add(matmul(input, t.param(params.weight)), t.param(params.bias));
  return activate(z, params.activation);
}

namespace {

void check_gru_shapes(GruParams& p, Var x, Var h_prev) {
  if (x.value().cols() != p.input_dim() || h_prev.value().cols() != p.hidden() ||
      x.value().rows() != h_prev.value().rows()) {
    throw Error(ErrorKind::ShapeMismatch,
                "gru_step x " + x.value().shape().str() + ", h " +
                    h_prev.value().shape().str() + " for cell " +
                    std::to_string(p.input_dim()) + "->" +
                    std::to_string(p.hidden()));
  }
}

}  // namespace

Var gru_step(GruParams& p, Var x, Var h_prev) {
  check_gru_shapes(p, x, h_prev);
  Tape& t = *x.tape();
  const std::array<Var, 9> ps = {t.param(p.w_z), t.param(p.w_r), t.param(p.w_h),
                                 t.param(p.u_z), t.param(p.u_r), t.param(p.u_h),
                                 t.param(p.b_z), t.param(p.b_r), t.param(p.b_h)};
  return gru_cell(x, h_prev, ps);
}

Var gru_step_composed(GruParams& p, Var x, Var h_prev) {
  check_gru_shapes(p, x, h_prev);
  Tape& t = *x.tape();
  const Var z = sigmoid(add(add(matmul(x, t.param(p.w_z)),
                                matmul(h_prev, t.param(p.u_z))),
                            t.param(p.b_z)));
  const Var r = sigmoid(add(add(matmul(x, t.param(p.w_r)),
                                matmul(h_prev, t.param(p.u_r))),
                            t.param(p.b_r)));
  const Var candidate =
      tanh(add(add(matmul(x, t.param(p.w_h)),
                   matmul(mul(r, h_prev), t.param(p.u_h))),
               t.param(p.b_h)));
  // (1 - z)*h + z*h~ written as h + z*(h~ - h)
  return add(h_prev, mul(z, sub(candidate, h_prev)));
}

std::vector<Var> gru_sequence(GruParams& params, Var sequence, Var h0) {
  const std::size_t steps = sequence.value().rows();
  std::vector<Var> states;
  states.reserve(steps);
  Var h = h0;
  for (std::size_t s = 0; s < steps; ++s) {
    h = gru_step(params, slice_rows(sequence, s, 1), h);
    states.push_back(h);
  }
  return states;
}

}  // namespace loadfc
