// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "loadfc/data_ingest.hpp"

namespace loadfc {

/// Lag in half-hour steps: 365 days, and 365.25/4 days.
inline constexpr std::size_t kAnnualLagSteps = 17520;
inline constexpr std::size_t kQuarterLagSteps = 4383;

/// One "month" of lag offset is 365.25/12 days.
constexpr std::size_t month_lag_steps(int months) {
  const double steps = months * (365.25 / 12.0) * kStepsPerDay;
  return static_cast<std::size_t>(steps + 0.5);
}

inline constexpr std::array<int, 4> kLagMonths = {3, 6, 9, 12};

struct AutocorrFeature {
  std::size_t lag_steps = 0;
  double value = 0.0;
};

struct AutocorrPair {
  AutocorrFeature year;
  AutocorrFeature quarter;
};

/// Pearson correlation between values[0, n-lag) and values[lag, n).
double pearson_autocorr(std::span<const double> values, std::size_t lag);

/// 0.5 corr(lag) + 0.25 corr(lag-1) + 0.25 corr(lag+1).
AutocorrFeature smoothed_autocorr(std::span<const double> values,
                                  std::size_t lag);

AutocorrPair annual_quarterly_autocorr(std::span<const double> values);

/// (cos, sin) of weekday_index * 2pi/7, Monday = 0.
std::pair<double, double> dow_encoding(Timestamp ts);

enum class Column : std::size_t {
  Demand = 0,
  DowCos,
  DowSin,
  Lag3m,
  Lag6m,
  Lag9m,
  Lag12m,
  AutocorrYear,
  AutocorrQuarter,
};

inline constexpr std::size_t kFeatureCount = 9;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "demand",  "dow_cos", "dow_sin",       "lag_3m",          "lag_6m",
    "lag_9m",  "lag_12m", "autocorr_year", "autocorr_quarter"};

/// Row-major [rows, kFeatureCount] matrix. Row r corresponds to source
/// series index first_index + r.
struct FeatureMatrix {
  std::vector<Timestamp> timestamps;
  std::vector<double> values;
  std::size_t first_index = 0;

  std::size_t rows() const noexcept { return timestamps.size(); }
  static constexpr std::size_t cols() noexcept { return kFeatureCount; }
  double at(std::size_t row, Column c) const noexcept {
    return values[row * kFeatureCount + static_cast<std::size_t>(c)];
  }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values.data() + r * kFeatureCount, kFeatureCount};
  }
  std::vector<double> column(Column c) const;

  bool operator==(const FeatureMatrix&) const = default;
};

/// Lagged demand columns [rows, 4] (3/6/9/12 months), row-major, for source
/// indices [max_lag, n). Throws SeriesTooShort when no row has full history.
std::vector<double> lagged_features(std::span<const double> values);

FeatureMatrix build_feature_matrix(const TransformedSeries& series,
                                   const AutocorrPair& autocorr);
/// Autocorrelation taken over the whole input series.
FeatureMatrix build_feature_matrix(const TransformedSeries& series);

struct WindowSpan {
  std::size_t x_begin = 0;  // feature-matrix rows, half-open
  std::size_t x_end = 0;
  std::size_t y_begin = 0;
  std::size_t y_end = 0;
};

/// Paired input/target windows over a shared feature matrix.
class FeatureWindows {
 public:
  FeatureWindows() = default;
  FeatureWindows(std::shared_ptr<const FeatureMatrix> matrix,
                 std::size_t training_window, std::size_t predict_window,
                 std::vector<WindowSpan> spans);

  std::size_t size() const noexcept { return spans_.size(); }
  bool empty() const noexcept { return spans_.empty(); }
  std::size_t training_window() const noexcept { return training_window_; }
  std::size_t predict_window() const noexcept { return predict_window_; }
  const std::vector<WindowSpan>& spans() const noexcept { return spans_; }
  const FeatureMatrix& matrix() const noexcept { return *matrix_; }
  std::shared_ptr<const FeatureMatrix> matrix_ptr() const noexcept {
    return matrix_;
  }

  /// [training_window, kFeatureCount]
  std::vector<double> x(std::size_t i) const;
  /// [predict_window] transformed demand
  std::vector<double> y_targets(std::size_t i) const;
  /// [predict_window, kFeatureCount - 1], every column except demand
  std::vector<double> y_features(std::size_t i) const;

 private:
  std::shared_ptr<const FeatureMatrix> matrix_;
  std::size_t training_window_ = 0;
  std::size_t predict_window_ = 0;
  std::vector<WindowSpan> spans_;
};

inline constexpr std::size_t kDefaultPredictWindow = 96;
inline constexpr std::size_t kDefaultTrainingWindow = 672;

/// Windows over rows [row_begin, row_end) of `features`.
FeatureWindows make_windows(std::shared_ptr<const FeatureMatrix> features,
                            std::size_t training_window,
                            std::size_t predict_window, std::size_t stride,
                            std::size_t row_begin, std::size_t row_end);
FeatureWindows make_windows(std::shared_ptr<const FeatureMatrix> features,
                            std::size_t training_window,
                            std::size_t predict_window, std::size_t stride);

std::string write_feature_csv(const FeatureMatrix& m);
FeatureMatrix read_feature_csv(std::string_view text,
                               std::string_view source_name = "<features>");

}  // namespace loadfc
