// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loadfc/data_ingest.hpp"
#include "loadfc/features.hpp"
#include "loadfc/keyvalue.hpp"
#include "loadfc/models.hpp"

namespace loadfc {

/// Standardizes demand-valued feature columns (demand and the four lags)
/// with statistics of the training rows. Network inputs and outputs live in
/// this space; everything user-facing is in log1p or megawatt space.
struct Scaler {
  double mean = 0.0;
  double scale = 1.0;

  double apply(double v) const noexcept { return (v - mean) / scale; }
  double invert(double v) const noexcept { return v * scale + mean; }
};

Scaler fit_scaler(const FeatureMatrix& m, std::size_t row_begin,
                  std::size_t row_end);

/// Network input from raw feature rows: x is [training_window, 9] in schema
/// order, y_features [predict_window, 8] without demand.
WindowInput scale_input(std::vector<double> x, std::vector<double> y_features,
                        std::size_t training_window, std::size_t predict_window,
                        const Scaler& scaler);
/// Network input for window `i`, with demand-valued columns standardized.
WindowInput make_input(const FeatureWindows& windows, std::size_t i,
                       const Scaler& scaler);
/// Standardized targets of window `i`.
std::vector<double> make_targets(const FeatureWindows& windows, std::size_t i,
                                 const Scaler& scaler);

/// Horizon covariates (every schema column except demand) for the `horizon`
/// half-hours following the end of `series`. Row-major [horizon, 8].
std::vector<double> future_covariates(const TransformedSeries& series,
                                      const AutocorrPair& autocorr,
                                      std::size_t horizon);

struct SplitOptions {
  /// Fractions of the feature-matrix rows (the series minus its first
  /// 12 months of lag history); the remainder is the test split. On a
  /// three-year series the defaults give year 2 / first half of year 3 /
  /// second half of year 3.
  double train_fraction = 0.5;
  double val_fraction = 0.25;
  /// Explicit boundaries override the fractions (first timestamp of the
  /// validation / test split).
  std::optional<Timestamp> train_end;
  std::optional<Timestamp> val_end;
};

struct WindowOptions {
  std::size_t training_window = kDefaultTrainingWindow;
  std::size_t predict_window = kDefaultPredictWindow;
  std::size_t stride = kDefaultPredictWindow;
};

/// Contiguous, chronological, disjoint row ranges of the feature matrix.
struct SplitRows {
  std::size_t train_begin = 0, train_end = 0;
  std::size_t val_begin = 0, val_end = 0;
  std::size_t test_begin = 0, test_end = 0;
};

struct Dataset {
  std::shared_ptr<const FeatureMatrix> matrix;
  AutocorrPair autocorr;
  SplitRows split;
  WindowOptions windows;
  Scaler scaler;
  FeatureWindows train;
  FeatureWindows val;
  FeatureWindows test;
};

/// log1p, autocorrelation over the training part of the series only,
/// feature matrix, chronological split and windows.
Dataset prepare_dataset(const LoadSeries& series, const SplitOptions& split,
                        const WindowOptions& windows);

/// Rebuilds a Dataset from an exported feature matrix and its window index.
Dataset dataset_from_files(FeatureMatrix matrix, const KeyValues& index);

/// Split boundaries and window geometry as key=value; enough to rebuild the
/// windows from the feature matrix.
KeyValues window_index(const Dataset& d);
/// Every window as CSV: split, window_index, x_begin, x_end, y_begin, y_end,
/// y_start_timestamp.
std::string write_window_csv(const Dataset& d);

}  // namespace loadfc
