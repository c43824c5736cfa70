// SPDX-License-Identifier: Apache-2.0
#include "loadfc/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "loadfc/error.hpp"

namespace loadfc {

double pearson_autocorr(std::span<const double> values, std::size_t lag) {
  if (lag < 1) throw Error(ErrorKind::SeriesTooShort, "lag must be >= 1");
  if (values.size() <= lag + 1) {
    throw Error(ErrorKind::SeriesTooShort,
                "need more than " + std::to_string(lag + 1) +
                    " values for lag " + std::to_string(lag) + ", got " +
                    std::to_string(values.size()));
  }
  const std::size_t m = values.size() - lag;
  const auto head = values.subspan(0, m);
  const auto tail = values.subspan(lag, m);

  double mean_a = 0.0, mean_b = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_a += head[i];
    mean_b += tail[i];
    scale = std::max({scale, std::abs(head[i]), std::abs(tail[i])});
  }
  mean_a /= double(m);
  mean_b /= double(m);

  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double da = head[i] - mean_a;
    const double db = tail[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  // Deviations of a constant slice are pure round-off.
  const double floor = double(m) * (1e-12 * scale) * (1e-12 * scale);
  if (saa <= floor || sbb <= floor) {
    throw Error(ErrorKind::ZeroVariance,
                "constant slice at lag " + std::to_string(lag));
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

AutocorrFeature smoothed_autocorr(std::span<const double> values,
                                  std::size_t lag) {
  if (lag < 2) throw Error(ErrorKind::SeriesTooShort, "lag must be >= 2");
  const double c0 = pearson_autocorr(values, lag);
  const double cm = pearson_autocorr(values, lag - 1);
  const double cp = pearson_autocorr(values, lag + 1);
  return {lag, 0.5 * c0 + 0.25 * cm + 0.25 * cp};
}

AutocorrPair annual_quarterly_autocorr(std::span<const double> values) {
  if (values.size() <= std::size_t{366} * kStepsPerDay) {
    throw Error(ErrorKind::SeriesTooShort,
                "autocorrelation features need more than 366 days, got " +
                    std::to_string(values.size()) + " half-hours");
  }
  return {smoothed_autocorr(values, kAnnualLagSteps),
          smoothed_autocorr(values, kQuarterLagSteps)};
}

std::pair<double, double> dow_encoding(Timestamp ts) {
  const double normed =
      double(ts.weekday_index()) / (7.0 / (2.0 * std::numbers::pi));
  return {std::cos(normed), std::sin(normed)};
}

std::vector<double> FeatureMatrix::column(Column c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::vector<double> lagged_features(std::span<const double> values) {
  constexpr std::size_t max_lag = month_lag_steps(kLagMonths.back());
  if (values.size() <= max_lag) {
    throw Error(ErrorKind::SeriesTooShort,
                "lagged features need more than " + std::to_string(max_lag) +
                    " half-hours of history, got " +
                    std::to_string(values.size()));
  }
  const std::size_t rows = values.size() - max_lag;
  std::vector<double> out(rows * kLagMonths.size());
  for (std::size_t k = 0; k < kLagMonths.size(); ++k) {
    const std::size_t lag = month_lag_steps(kLagMonths[k]);
    for (std::size_t r = 0; r < rows; ++r) {
      out[r * kLagMonths.size() + k] = values[r + max_lag - lag];
    }
  }
  return out;
}

FeatureMatrix build_feature_matrix(const TransformedSeries& series,
                                   const AutocorrPair& autocorr) {
  constexpr std::size_t max_lag = month_lag_steps(kLagMonths.back());
  const auto lags = lagged_features(series.values);
  const std::size_t rows = series.size() - max_lag;

  FeatureMatrix m;
  m.first_index = max_lag;
  m.timestamps.assign(series.timestamps.begin() + long(max_lag),
                      series.timestamps.end());
  m.values.resize(rows * kFeatureCount);
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = m.values.data() + r * kFeatureCount;
    const auto [c, s] = dow_encoding(m.timestamps[r]);
    row[0] = series.values[r + max_lag];
    row[1] = c;
    row[2] = s;
    for (std::size_t k = 0; k < kLagMonths.size(); ++k)
      row[3 + k] = lags[r * kLagMonths.size() + k];
    row[7] = autocorr.year.value;
    row[8] = autocorr.quarter.value;
  }
  return m;
}

FeatureMatrix build_feature_matrix(const TransformedSeries& series) {
  return build_feature_matrix(series, annual_quarterly_autocorr(series.values));
}

FeatureWindows::FeatureWindows(std::shared_ptr<const FeatureMatrix> matrix,
                               std::size_t training_window,
                               std::size_t predict_window,
                               std::vector<WindowSpan> spans)
    : matrix_(std::move(matrix)),
      training_window_(training_window),
      predict_window_(predict_window),
      spans_(std::move(spans)) {}

std::vector<double> FeatureWindows::x(std::size_t i) const {
  const auto& s = spans_.at(i);
  return {matrix_->values.begin() + long(s.x_begin * kFeatureCount),
          matrix_->values.begin() + long(s.x_end * kFeatureCount)};
}

std::vector<double> FeatureWindows::y_targets(std::size_t i) const {
  const auto& s = spans_.at(i);
  std::vector<double> out;
  out.reserve(predict_window_);
  for (std::size_t r = s.y_begin; r < s.y_end; ++r)
    out.push_back(matrix_->at(r, Column::Demand));
  return out;
}

std::vector<double> FeatureWindows::y_features(std::size_t i) const {
  const auto& s = spans_.at(i);
  std::vector<double> out;
  out.reserve(predict_window_ * (kFeatureCount - 1));
  for (std::size_t r = s.y_begin; r < s.y_end; ++r) {
    const auto row = matrix_->row(r);
    out.insert(out.end(), row.begin() + 1, row.end());
  }
  return out;
}

FeatureWindows make_windows(std::shared_ptr<const FeatureMatrix> features,
                            std::size_t training_window,
                            std::size_t predict_window, std::size_t stride,
                            std::size_t row_begin, std::size_t row_end) {
  if (training_window < 1 || predict_window < 1 || stride < 1) {
    throw Error(ErrorKind::WindowTooLarge,
                "training_window, predict_window and stride must be >= 1");
  }
  row_end = std::min(row_end, features->rows());
  const std::size_t rows = row_end > row_begin ? row_end - row_begin : 0;
  if (rows < training_window + predict_window) {
    throw Error(ErrorKind::WindowTooLarge,
                "training_window " + std::to_string(training_window) +
                    " + predict_window " + std::to_string(predict_window) +
                    " exceeds " + std::to_string(rows) + " rows");
  }
  const std::size_t count =
      (rows - training_window - predict_window) / stride + 1;
  std::vector<WindowSpan> spans;
  spans.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t xb = row_begin + i * stride;
    spans.push_back({xb, xb + training_window, xb + training_window,
                     xb + training_window + predict_window});
  }
  return FeatureWindows(std::move(features), training_window, predict_window,
                        std::move(spans));
}

FeatureWindows make_windows(std::shared_ptr<const FeatureMatrix> features,
                            std::size_t training_window,
                            std::size_t predict_window, std::size_t stride) {
  const std::size_t rows = features->rows();
  return make_windows(std::move(features), training_window, predict_window,
                      stride, 0, rows);
}

std::string write_feature_csv(const FeatureMatrix& m) {
  std::string out = "timestamp";
  for (auto name : kFeatureNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.timestamps[r].iso();
    for (double v : m.row(r)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix read_feature_csv(std::string_view text,
                               std::string_view source_name) {
  FeatureMatrix m;
  std::size_t line_no = 0;
  bool header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where =
        std::string(source_name) + ":" + std::to_string(line_no);
    if (!header) {
      bool ok = fields.size() == kFeatureCount + 1 && fields[0] == "timestamp";
      for (std::size_t i = 0; ok && i < kFeatureCount; ++i)
        ok = fields[i + 1] == kFeatureNames[i];
      if (!ok) {
        throw Error(ErrorKind::SchemaMismatch,
                    where + ": feature header does not match schema");
      }
      header = true;
      continue;
    }
    if (fields.size() != kFeatureCount + 1)
      throw Error(ErrorKind::MalformedRow, where + ": wrong field count");
    const auto ts = parse_timestamp(fields[0]);
    if (!ts) throw Error(ErrorKind::MalformedRow, where + ": bad timestamp");
    m.timestamps.push_back(*ts);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      const auto& f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v))
        throw Error(ErrorKind::MalformedRow, where + ": bad value '" + f + "'");
      m.values.push_back(v);
    }
  }
  if (m.rows() == 0)
    throw Error(ErrorKind::EmptySeries, std::string(source_name) + ": no rows");
  return m;
}

}  // namespace loadfc
