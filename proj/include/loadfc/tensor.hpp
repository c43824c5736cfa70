// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace loadfc {

/// Up to four positive extents, stored inline.
class Shape {
 public:
  static constexpr std::size_t kMaxRank = 4;

  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims);
  explicit Shape(std::span<const std::size_t> dims);

  std::size_t rank() const noexcept { return rank_; }
  std::size_t operator[](std::size_t i) const noexcept { return dims_[i]; }
  std::size_t numel() const noexcept;
  /// Matrix view: rank-1 [n] is a single row.
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept { return rank_ ? dims_[rank_ - 1] : 1; }

  std::string str() const;  // "3x2"
  static Shape parse(std::string_view text);

  bool operator==(const Shape& o) const noexcept;

 private:
  std::array<std::size_t, kMaxRank> dims_{};
  std::size_t rank_ = 0;
};

/// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double v) { return Tensor(Shape{1, 1}, {v}); }
  static Tensor row(std::vector<double> v);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> v);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t rows() const noexcept { return shape_.rows(); }
  std::size_t cols() const noexcept { return shape_.cols(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& vec() const noexcept { return data_; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& at(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols() + c];
  }
  double at(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols() + c];
  }

  void fill(double v) noexcept;
  bool all_finite() const noexcept;
  double max_abs() const noexcept;

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Trainable tensor with gradient accumulator and ASGD running average.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value, std::string initializer = "",
            std::uint64_t seed = 0);

  std::string name;
  Tensor value;
  Tensor grad;
  std::optional<Tensor> asgd_avg;
  std::size_t asgd_count = 0;
  /// Set by backward, cleared by sgd_step.
  bool grad_ready = false;
  std::string initializer;
  std::uint64_t seed = 0;

  void zero_grad() noexcept;
};

}  // namespace loadfc
