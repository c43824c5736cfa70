// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "loadfc/rng.hpp"
#include "loadfc/tensor.hpp"

namespace loadfc {

enum class Initializer {
  Zero,
  XavierNormal,
  XavierUniform,
  HeNormal,
  HeUniform,
  Identity,
};

inline constexpr std::array<Initializer, 6> kAllInitializers = {
    Initializer::Zero,     Initializer::XavierNormal, Initializer::XavierUniform,
    Initializer::HeNormal, Initializer::HeUniform,    Initializer::Identity};

std::string_view to_string(Initializer init) noexcept;
std::optional<Initializer> parse_initializer(std::string_view tag) noexcept;

struct Fans {
  double in = 0;
  double out = 0;
};
/// Fan-in/out of a weight shape [..., in, out]; leading dims act as a
/// receptive field multiplier. Throws BadShape for rank < 2.
Fans fans_of(const Shape& shape);

double xavier_normal_stddev(const Shape& shape);
double xavier_uniform_limit(const Shape& shape);
double he_normal_stddev(const Shape& shape);
double he_uniform_limit(const Shape& shape);

Tensor init_zero(const Shape& shape);
Tensor init_xavier_normal(const Shape& shape, CounterRng& rng);
Tensor init_xavier_uniform(const Shape& shape, CounterRng& rng);
/// Normal with stddev sqrt(2/in), redrawing any sample beyond two stddevs.
Tensor init_he_normal(const Shape& shape, CounterRng& rng);
Tensor init_he_uniform(const Shape& shape, CounterRng& rng);
/// Ones on the leading diagonal of a (possibly rectangular) matrix.
Tensor init_identity(const Shape& shape);

Tensor initialize(Initializer init, const Shape& shape, CounterRng& rng);

}  // namespace loadfc
