// SPDX-License-Identifier: Apache-2.0
#include "loadfc/loss.hpp"

#include <string>

#include "loadfc/error.hpp"

namespace loadfc {

namespace {

void check_pair(Var f, Var a, const char* name) {
  const Tensor& fv = f.value();
  const Tensor& av = a.value();
  if (fv.rows() != av.rows() || fv.cols() != av.cols()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(name) + ": forecast " +
                                              fv.shape().str() + " vs actual " +
                                              av.shape().str());
  }
}

}  // namespace

Var loss_mae(Var forecast, Var actual) {
  check_pair(forecast, actual, "mae");
  return mean(abs(sub(forecast, actual)));
}

Var loss_smape(Var forecast, Var actual) {
  check_pair(forecast, actual, "smape");
  const Tensor& fv = forecast.value();
  const Tensor& av = actual.value();
  for (std::size_t i = 0; i < fv.size(); ++i) {
    if (fv[i] == 0.0 && av[i] == 0.0) {
      throw Error(ErrorKind::DivisionByZeroTerm,
                  "forecast and actual both zero at element " + std::to_string(i));
    }
  }
  const Var num = scale(abs(sub(forecast, actual)), 2.0);
  const Var den = add(abs(forecast), abs(actual));
  return mean(div(num, den));
}

Var loss_ssmape(Var forecast, Var actual, double epsilon) {
  check_pair(forecast, actual, "ssmape");
  const Var num = scale(abs(sub(forecast, actual)), 2.0);
  const Var den = max_scalar(
      add_scalar(add(abs(forecast), abs(actual)), epsilon), 0.5 + epsilon);
  return mean(div(num, den));
}

Var loss_quadratic(Var forecast, Var actual) {
  check_pair(forecast, actual, "quadratic");
  return scale(mean(square(sub(actual, forecast))), 0.5);
}

Var l2_activation_penalty(Var rnn_outputs, double beta) {
  return scale(sum(square(rnn_outputs)), 0.5 * beta);
}

std::string_view to_string(LossKind k) noexcept {
  return k == LossKind::Ssmape ? "ssmape" : "mae";
}

std::optional<LossKind> parse_loss(std::string_view tag) noexcept {
  if (tag == "ssmape") return LossKind::Ssmape;
  if (tag == "mae") return LossKind::Mae;
  return std::nullopt;
}

}  // namespace loadfc
