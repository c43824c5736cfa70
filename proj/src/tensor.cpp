// SPDX-License-Identifier: Apache-2.0
#include "loadfc/tensor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "loadfc/error.hpp"

namespace loadfc {

Shape::Shape(std::initializer_list<std::size_t> dims)
    : Shape(std::span<const std::size_t>(dims.begin(), dims.size())) {}

Shape::Shape(std::span<const std::size_t> dims) {
  if (dims.size() > kMaxRank)
    throw Error(ErrorKind::BadShape, "rank above 4 unsupported");
  for (std::size_t d : dims) {
    if (d == 0) throw Error(ErrorKind::BadShape, "zero extent");
    dims_[rank_++] = d;
  }
}

std::size_t Shape::numel() const noexcept {
  std::size_t n = 1;
  for (std::size_t i = 0; i < rank_; ++i) n *= dims_[i];
  return n;
}

std::size_t Shape::rows() const noexcept {
  if (rank_ <= 1) return 1;
  return numel() / dims_[rank_ - 1];
}

std::string Shape::str() const {
  std::string s;
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) s += 'x';
    s += std::to_string(dims_[i]);
  }
  return s;
}

Shape Shape::parse(std::string_view text) {
  std::vector<std::size_t> dims;
  while (!text.empty()) {
    const auto x = text.find('x');
    const auto part = text.substr(0, x);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      throw Error(ErrorKind::BadShape, "bad shape '" + std::string(text) + "'");
    dims.push_back(v);
    if (x == std::string_view::npos) break;
    text.remove_prefix(x + 1);
  }
  return Shape(std::span<const std::size_t>(dims));
}

bool Shape::operator==(const Shape& o) const noexcept {
  if (rank_ != o.rank_) return false;
  for (std::size_t i = 0; i < rank_; ++i)
    if (dims_[i] != o.dims_[i]) return false;
  return true;
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(shape), data_(shape.numel(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.numel()) {
    throw Error(ErrorKind::ShapeMismatch,
                "shape " + shape_.str() + " needs " +
                    std::to_string(shape_.numel()) + " values, got " +
                    std::to_string(data_.size()));
  }
}

Tensor Tensor::row(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor(Shape{1, n}, std::move(v));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> v) {
  return Tensor(Shape{rows, cols}, std::move(v));
}

void Tensor::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Tensor::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Parameter::Parameter(std::string name_, Tensor value_, std::string init,
                     std::uint64_t seed_)
    : name(std::move(name_)),
      value(std::move(value_)),
      grad(value.shape()),
      initializer(std::move(init)),
      seed(seed_) {}

void Parameter::zero_grad() noexcept {
  grad.fill(0.0);
  grad_ready = false;
}

}  // namespace loadfc
