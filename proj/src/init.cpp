// SPDX-License-Identifier: Apache-2.0
#include "loadfc/init.hpp"

#include <cmath>
#include <random>

#include "loadfc/error.hpp"

namespace loadfc {

std::string_view to_string(Initializer init) noexcept {
  switch (init) {
    case Initializer::Zero: return "zero";
    case Initializer::XavierNormal: return "xavier_normal";
    case Initializer::XavierUniform: return "xavier_uniform";
    case Initializer::HeNormal: return "he_normal";
    case Initializer::HeUniform: return "he_uniform";
    case Initializer::Identity: return "identity";
  }
  return "unknown";
}

std::optional<Initializer> parse_initializer(std::string_view tag) noexcept {
  for (Initializer i : kAllInitializers)
    if (to_string(i) == tag) return i;
  return std::nullopt;
}

Fans fans_of(const Shape& shape) {
  if (shape.rank() < 2) {
    throw Error(ErrorKind::BadShape,
                "initializer needs an [in, out] shape, got " + shape.str());
  }
  double receptive = 1.0;
  for (std::size_t i = 0; i + 2 < shape.rank(); ++i) receptive *= double(shape[i]);
  return {double(shape[shape.rank() - 2]) * receptive,
          double(shape[shape.rank() - 1]) * receptive};
}

double xavier_normal_stddev(const Shape& shape) {
  const Fans f = fans_of(shape);
  return std::sqrt(2.0 / (f.in + f.out));
}

double xavier_uniform_limit(const Shape& shape) {
  const Fans f = fans_of(shape);
  return std::sqrt(6.0 / (f.in + f.out));
}

double he_normal_stddev(const Shape& shape) {
  return std::sqrt(2.0 / fans_of(shape).in);
}

double he_uniform_limit(const Shape& shape) {
  return std::sqrt(6.0 / fans_of(shape).in);
}

Tensor init_zero(const Shape& shape) { return Tensor(shape, 0.0); }

Tensor init_xavier_normal(const Shape& shape, CounterRng& rng) {
  std::normal_distribution<double> dist(0.0, xavier_normal_stddev(shape));
  Tensor t(shape);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

Tensor init_xavier_uniform(const Shape& shape, CounterRng& rng) {
  const double limit = xavier_uniform_limit(shape);
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(shape);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

Tensor init_he_normal(const Shape& shape, CounterRng& rng) {
  const double stddev = he_normal_stddev(shape);
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(shape);
  for (double& v : t.data()) {
    do {
      v = dist(rng);
    } while (std::abs(v) > 2.0 * stddev);
  }
  return t;
}

Tensor init_he_uniform(const Shape& shape, CounterRng& rng) {
  const double limit = he_uniform_limit(shape);
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(shape);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

Tensor init_identity(const Shape& shape) {
  if (shape.rank() != 2)
    throw Error(ErrorKind::BadShape, "identity needs a matrix, got " + shape.str());
  Tensor t(shape);
  const std::size_t n = std::min(shape[0], shape[1]);
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

Tensor initialize(Initializer init, const Shape& shape, CounterRng& rng) {
  switch (init) {
    case Initializer::Zero: return init_zero(shape);
    case Initializer::XavierNormal: return init_xavier_normal(shape, rng);
    case Initializer::XavierUniform: return init_xavier_uniform(shape, rng);
    case Initializer::HeNormal: return init_he_normal(shape, rng);
    case Initializer::HeUniform: return init_he_uniform(shape, rng);
    case Initializer::Identity: return init_identity(shape);
  }
  return init_zero(shape);
}

}  // namespace loadfc
