// SPDX-License-Identifier: Apache-2.0
#include "loadfc/optim.hpp"

#include <utility>

#include "loadfc/error.hpp"

namespace loadfc {

void sgd_step(std::span<Parameter* const> params, double eta) {
  for (const Parameter* p : params) {
    if (!p->grad_ready)
      throw Error(ErrorKind::StaleGradient, p->name + " has no fresh gradient");
  }
  for (Parameter* p : params) {
    auto v = p->value.data();
    const auto g = p->grad.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= eta * g[i];
    p->zero_grad();
  }
}

void asgd_accumulate(Parameter& p) {
  if (!p.asgd_avg) {
    p.asgd_avg = p.value;
    p.asgd_count = 1;
    return;
  }
  const double n = static_cast<double>(p.asgd_count);
  auto avg = p.asgd_avg->data();
  const auto v = p.value.data();
  for (std::size_t i = 0; i < avg.size(); ++i)
    avg[i] = (avg[i] * n + v[i]) / (n + 1.0);
  ++p.asgd_count;
}

bool asgd_ready(std::span<Parameter* const> params) noexcept {
  for (const Parameter* p : params)
    if (p->asgd_count == 0 || !p->asgd_avg) return false;
  return true;
}

AsgdSwap::AsgdSwap(std::span<Parameter* const> params)
    : params_(params.begin(), params.end()) {
  for (const Parameter* p : params_) {
    if (p->asgd_count == 0 || !p->asgd_avg)
      throw Error(ErrorKind::NoAverageAvailable, p->name + " has no ASGD snapshot");
  }
  for (Parameter* p : params_) std::swap(p->value, *p->asgd_avg);
}

AsgdSwap::~AsgdSwap() {
  for (Parameter* p : params_) std::swap(p->value, *p->asgd_avg);
}

}  // namespace loadfc
