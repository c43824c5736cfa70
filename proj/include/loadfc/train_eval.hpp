// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "loadfc/keyvalue.hpp"
#include "loadfc/loss.hpp"
#include "loadfc/models.hpp"
#include "loadfc/pipeline.hpp"

namespace loadfc {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t n_repeat = 3;
  double eta = 0.01;
  double epsilon = 0.1;
  double beta = 1e-4;
  std::size_t asgd_start_epoch = 20;
  LossKind loss = LossKind::Ssmape;
  std::uint64_t seed = 0;

  void validate() const;
  KeyValues to_kv() const;
};

/// FC weights (then bias) after every optimizer step once ASGD is active,
/// next to their running averages.
struct VarianceTrace {
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> averaged;
};

/// Optional per-step instrumentation. Filled as training progresses, so it
/// holds the partial history when training aborts.
struct TrainObserver {
  std::vector<double> step_loss;
  std::vector<double> epoch_loss;
  VarianceTrace* variance = nullptr;
};

struct TrainedModel {
  std::unique_ptr<Model> model;
  std::vector<double> history;  // mean loss per epoch
  std::uint64_t seed = 0;
};

/// Runs epochs x n_repeat passes over the windows in their stored order with
/// one SGD step per window. Throws NonFiniteLoss naming the epoch.
TrainedModel train(std::unique_ptr<Model> model, const FeatureWindows& windows,
                   const Scaler& scaler, const TrainConfig& cfg,
                   TrainObserver* observer = nullptr);

/// Forecast loss plus the L2 penalty on every RNN block's outputs.
Var training_loss(const ForwardResult& fr, Var actual, const TrainConfig& cfg);

/// expm1, clip at zero, round half away from zero.
std::vector<std::int64_t> postprocess_predictions(std::span<const double> transformed);

/// (100/N) sum |F - A| / A. Throws ZeroActual if any A <= 0.
double mape_percent(std::span<const std::int64_t> forecast,
                    std::span<const double> actual);

struct EvalReport {
  std::vector<double> per_window_mape;
  double mean_mape = 0.0;
  double std_mape = 0.0;  // sample standard deviation across windows
};

/// Sample mean and standard deviation (n - 1 denominator; 0 for n < 2).
std::pair<double, double> mean_and_std(std::span<const double> v);

/// Transformed-space (log1p) predictions for window `i`; uses ASGD averages
/// for the FC layer when they exist.
std::vector<double> predict_window(Model& model, const FeatureWindows& windows,
                                   std::size_t i, const Scaler& scaler);

EvalReport evaluate_mape(Model& model, const FeatureWindows& test,
                         const Scaler& scaler);

struct ArmResult {
  Initializer initializer = Initializer::Zero;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string status;  // "ok" or "failed:<reason>"
  EvalReport report;
  std::vector<double> step_loss;
  std::vector<double> epoch_loss;
};

struct AggregateRow {
  Initializer initializer = Initializer::Zero;
  double average_mape = 0.0;
  double std_mape = 0.0;  // across seeds
  std::size_t succeeded = 0;
  std::size_t attempted = 0;
};

struct ExperimentResult {
  std::vector<ArmResult> arms;  // initializer-major, seed-minor

  /// One row per initializer in first-appearance order; failed arms are
  /// excluded from the statistics (NaN when none succeeded).
  std::vector<AggregateRow> aggregate() const;
};

/// Every (initializer, seed) arm on the same dataset. Non-FC parameters are
/// identical across arms for a given seed. Arms run on up to `jobs` OpenMP
/// threads; results do not depend on `jobs`.
ExperimentResult compare_initializers(const Dataset& data, const ModelConfig& base,
                                      const TrainConfig& cfg,
                                      std::span<const Initializer> initializers,
                                      std::span<const std::uint64_t> seeds,
                                      int jobs = 1);

std::string write_results_csv(const ExperimentResult& r);
std::string write_aggregate_csv(const ExperimentResult& r);
std::string write_loss_trace_csv(std::span<const double> step_loss);
std::string write_mape_trace_csv(const EvalReport& report);
std::string write_variance_trace_csv(const VarianceTrace& trace);

}  // namespace loadfc
