// SPDX-License-Identifier: Apache-2.0
#include "loadfc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loadfc/error.hpp"

namespace loadfc {

namespace {

// Demand-valued columns: demand itself and the four lags.
constexpr std::array<std::size_t, 5> kScaledColumns = {0, 3, 4, 5, 6};

std::size_t index_at_or_after(const std::vector<Timestamp>& ts, Timestamp t) {
  return static_cast<std::size_t>(
      std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
}

std::size_t to_count(const KeyValues& kv, std::string_view key) {
  const std::string s = kv.require(key);
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    throw Error(ErrorKind::SchemaMismatch, std::string(key) + " is not a count: " + s);
  }
}

}  // namespace

Scaler fit_scaler(const FeatureMatrix& m, std::size_t row_begin,
                  std::size_t row_end) {
  row_end = std::min(row_end, m.rows());
  if (row_end <= row_begin) throw Error(ErrorKind::EmptySeries, "no rows to fit scaler");
  double mean = 0.0;
  for (std::size_t r = row_begin; r < row_end; ++r) mean += m.at(r, Column::Demand);
  mean /= double(row_end - row_begin);
  double var = 0.0;
  for (std::size_t r = row_begin; r < row_end; ++r) {
    const double d = m.at(r, Column::Demand) - mean;
    var += d * d;
  }
  var /= double(row_end - row_begin);
  const double sd = std::sqrt(var);
  return {mean, sd > 0.0 ? sd : 1.0};
}

WindowInput scale_input(std::vector<double> x, std::vector<double> y,
                        std::size_t training_window, std::size_t predict_window,
                        const Scaler& scaler) {
  constexpr std::size_t ycols = kFeatureCount - 1;
  if (x.size() != training_window * kFeatureCount || y.size() != predict_window * ycols)
    throw Error(ErrorKind::ShapeMismatch, "window rows do not match the feature schema");
  for (std::size_t r = 0; r < training_window; ++r)
    for (std::size_t c : kScaledColumns) {
      double& v = x[r * kFeatureCount + c];
      v = scaler.apply(v);
    }
  for (std::size_t r = 0; r < predict_window; ++r)
    for (std::size_t c : kScaledColumns) {
      if (c == 0) continue;
      double& v = y[r * ycols + c - 1];
      v = scaler.apply(v);
    }
  return {Tensor::matrix(training_window, kFeatureCount, std::move(x)),
          Tensor::matrix(predict_window, ycols, std::move(y))};
}

WindowInput make_input(const FeatureWindows& windows, std::size_t i,
                       const Scaler& scaler) {
  return scale_input(windows.x(i), windows.y_features(i), windows.training_window(),
                     windows.predict_window(), scaler);
}

std::vector<double> make_targets(const FeatureWindows& windows, std::size_t i,
                                 const Scaler& scaler) {
  std::vector<double> y = windows.y_targets(i);
  for (double& v : y) v = scaler.apply(v);
  return y;
}

std::vector<double> future_covariates(const TransformedSeries& series,
                                      const AutocorrPair& autocorr,
                                      std::size_t horizon) {
  const std::size_t n = series.size();
  constexpr std::size_t min_lag = month_lag_steps(kLagMonths.front());
  constexpr std::size_t max_lag = month_lag_steps(kLagMonths.back());
  if (horizon > min_lag || n < max_lag) {
    throw Error(ErrorKind::SeriesTooShort,
                "cannot build lag covariates for a horizon of " +
                    std::to_string(horizon) + " after " + std::to_string(n) +
                    " half-hours");
  }
  constexpr std::size_t ycols = kFeatureCount - 1;
  std::vector<double> out(horizon * ycols);
  const Timestamp last = series.timestamps.back();
  for (std::size_t k = 0; k < horizon; ++k) {
    double* row = out.data() + k * ycols;
    const auto [c, s] =
        dow_encoding(last + static_cast<std::int64_t>(k + 1) * kStepMinutes);
    row[0] = c;
    row[1] = s;
    for (std::size_t j = 0; j < kLagMonths.size(); ++j)
      row[2 + j] = series.values[n + k - month_lag_steps(kLagMonths[j])];
    row[6] = autocorr.year.value;
    row[7] = autocorr.quarter.value;
  }
  return out;
}

Dataset prepare_dataset(const LoadSeries& series, const SplitOptions& split,
                        const WindowOptions& windows) {
  if (!series.uniform()) {
    throw Error(ErrorKind::GapTooLarge,
                "series must be gap-free; run repair_gaps first");
  }
  const TransformedSeries tr = log1p_series(series);
  const std::size_t n = tr.size();

  constexpr std::size_t offset = month_lag_steps(kLagMonths.back());
  if (n <= offset) {
    throw Error(ErrorKind::SeriesTooShort,
                std::to_string(n) + " half-hours leave no rows after the 12-month lag history");
  }
  const std::size_t usable = n - offset;
  std::size_t train_end =
      split.train_end ? index_at_or_after(tr.timestamps, *split.train_end)
                      : offset + static_cast<std::size_t>(double(usable) * split.train_fraction);
  std::size_t val_end =
      split.val_end ? index_at_or_after(tr.timestamps, *split.val_end)
                    : offset + static_cast<std::size_t>(double(usable) *
                                                        (split.train_fraction + split.val_fraction));
  train_end = std::min(train_end, n);
  val_end = std::clamp(val_end, train_end, n);
  if (train_end <= offset) {
    throw Error(ErrorKind::SeriesTooShort,
                "training split ends inside the 12-month lag history");
  }

  const AutocorrPair autocorr = annual_quarterly_autocorr(
      std::span<const double>(tr.values).subspan(0, train_end));

  auto matrix = std::make_shared<const FeatureMatrix>(build_feature_matrix(tr, autocorr));

  Dataset d;
  d.matrix = matrix;
  d.autocorr = autocorr;
  d.windows = windows;
  d.split.train_begin = 0;
  d.split.train_end = train_end - offset;
  d.split.val_begin = d.split.train_end;
  d.split.val_end = val_end - offset;
  d.split.test_begin = d.split.val_end;
  d.split.test_end = n - offset;
  d.scaler = fit_scaler(*matrix, d.split.train_begin, d.split.train_end);

  const auto& w = windows;
  d.train = make_windows(matrix, w.training_window, w.predict_window, w.stride,
                         d.split.train_begin, d.split.train_end);
  if (d.split.val_end - d.split.val_begin >= w.training_window + w.predict_window) {
    d.val = make_windows(matrix, w.training_window, w.predict_window, w.stride,
                         d.split.val_begin, d.split.val_end);
  }
  d.test = make_windows(matrix, w.training_window, w.predict_window, w.stride,
                        d.split.test_begin, d.split.test_end);
  return d;
}

KeyValues window_index(const Dataset& d) {
  KeyValues kv;
  kv.set("training_window", std::to_string(d.windows.training_window));
  kv.set("predict_window", std::to_string(d.windows.predict_window));
  kv.set("stride", std::to_string(d.windows.stride));
  kv.set("train_begin", std::to_string(d.split.train_begin));
  kv.set("train_end", std::to_string(d.split.train_end));
  kv.set("val_begin", std::to_string(d.split.val_begin));
  kv.set("val_end", std::to_string(d.split.val_end));
  kv.set("test_begin", std::to_string(d.split.test_begin));
  kv.set("test_end", std::to_string(d.split.test_end));
  kv.set("rows", std::to_string(d.matrix->rows()));
  kv.set("train_windows", std::to_string(d.train.size()));
  kv.set("val_windows", std::to_string(d.val.size()));
  kv.set("test_windows", std::to_string(d.test.size()));
  return kv;
}

Dataset dataset_from_files(FeatureMatrix matrix, const KeyValues& index) {
  Dataset d;
  d.windows.training_window = to_count(index, "training_window");
  d.windows.predict_window = to_count(index, "predict_window");
  d.windows.stride = to_count(index, "stride");
  d.split = {to_count(index, "train_begin"), to_count(index, "train_end"),
             to_count(index, "val_begin"),   to_count(index, "val_end"),
             to_count(index, "test_begin"),  to_count(index, "test_end")};
  if (to_count(index, "rows") != matrix.rows()) {
    throw Error(ErrorKind::SchemaMismatch,
                "window index describes " + index.require("rows") +
                    " rows, feature file has " + std::to_string(matrix.rows()));
  }
  matrix.first_index = month_lag_steps(kLagMonths.back());
  d.autocorr = {{kAnnualLagSteps, matrix.at(0, Column::AutocorrYear)},
                {kQuarterLagSteps, matrix.at(0, Column::AutocorrQuarter)}};
  auto m = std::make_shared<const FeatureMatrix>(std::move(matrix));
  d.matrix = m;
  d.scaler = fit_scaler(*m, d.split.train_begin, d.split.train_end);
  const auto& w = d.windows;
  d.train = make_windows(m, w.training_window, w.predict_window, w.stride,
                         d.split.train_begin, d.split.train_end);
  if (d.split.val_end - d.split.val_begin >= w.training_window + w.predict_window) {
    d.val = make_windows(m, w.training_window, w.predict_window, w.stride,
                         d.split.val_begin, d.split.val_end);
  }
  d.test = make_windows(m, w.training_window, w.predict_window, w.stride,
                        d.split.test_begin, d.split.test_end);
  return d;
}

std::string write_window_csv(const Dataset& d) {
  std::string out = "split,window_index,x_begin,x_end,y_begin,y_end,y_start\n";
  auto emit = [&](const char* name, const FeatureWindows& w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto& s = w.spans()[i];
      out += name;
      for (std::size_t v : {i, s.x_begin, s.x_end, s.y_begin, s.y_end}) {
        out += ',';
        out += std::to_string(v);
      }
      out += ',';
      out += d.matrix->timestamps[s.y_begin].iso();
      out += '\n';
    }
  };
  emit("train", d.train);
  emit("val", d.val);
  emit("test", d.test);
  return out;
}

}  // namespace loadfc
