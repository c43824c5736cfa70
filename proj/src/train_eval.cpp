// SPDX-License-Identifier: Apache-2.0
#include "loadfc/train_eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <tuple>

#include "loadfc/data_ingest.hpp"
#include "loadfc/error.hpp"
#include "loadfc/optim.hpp"

namespace loadfc {

void TrainConfig::validate() const {
  if (n_repeat < 1) throw Error(ErrorKind::Usage, "n_repeat must be >= 1");
  if (asgd_start_epoch > epochs)
    throw Error(ErrorKind::Usage, "asgd_start_epoch must be <= epochs");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(ErrorKind::Usage, "eta must be > 0");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Usage, "epsilon must be > 0");
  if (!(beta >= 0.0)) throw Error(ErrorKind::Usage, "beta must be >= 0");
}

KeyValues TrainConfig::to_kv() const {
  KeyValues kv;
  kv.set("epochs", std::to_string(epochs));
  kv.set("n_repeat", std::to_string(n_repeat));
  kv.set("eta", format_double(eta));
  kv.set("epsilon", format_double(epsilon));
  kv.set("beta", format_double(beta));
  kv.set("asgd_start_epoch", std::to_string(asgd_start_epoch));
  kv.set("loss", std::string(to_string(loss)));
  kv.set("seed", std::to_string(seed));
  return kv;
}

Var training_loss(const ForwardResult& fr, Var actual, const TrainConfig& cfg) {
  Var loss = cfg.loss == LossKind::Ssmape
                 ? loss_ssmape(fr.prediction, actual, cfg.epsilon)
                 : loss_mae(fr.prediction, actual);
  if (cfg.beta > 0.0) {
    for (Var r : fr.rnn_outputs) loss = add(loss, l2_activation_penalty(r, cfg.beta));
  }
  return loss;
}

TrainedModel train(std::unique_ptr<Model> model, const FeatureWindows& windows,
                   const Scaler& scaler, const TrainConfig& cfg,
                   TrainObserver* observer) {
  cfg.validate();
  if (windows.empty()) throw Error(ErrorKind::EmptySeries, "no training windows");

  std::vector<WindowInput> inputs;
  std::vector<std::vector<double>> targets;
  inputs.reserve(windows.size());
  targets.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    inputs.push_back(make_input(windows, i, scaler));
    targets.push_back(make_targets(windows, i, scaler));
  }

  const std::vector<Parameter*> params = model->parameters();
  const std::vector<Parameter*> fc = model->fc_parameters();
  for (Parameter* p : params) p->zero_grad();

  TrainedModel out;
  out.seed = model->config().seed;
  Tape tape;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const bool averaging = epoch >= cfg.asgd_start_epoch;
    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t rep = 0; rep < cfg.n_repeat; ++rep) {
      for (std::size_t i = 0; i < windows.size(); ++i) {
        tape.clear();
        const ForwardResult fr = model->forward(tape, inputs[i]);
        const Var actual =
            tape.constant(Tensor(fr.prediction.value().shape(), targets[i]));
        const Var loss = training_loss(fr, actual, cfg);
        const double lv = loss.item();
        if (!std::isfinite(lv)) {
          if (observer) observer->epoch_loss = out.history;
          throw Error(ErrorKind::NonFiniteLoss,
                      "loss became " + format_double(lv) + " in epoch " +
                          std::to_string(epoch));
        }
        tape.backward(loss);
        sgd_step(params, cfg.eta);
        if (averaging) {
          for (Parameter* p : fc) asgd_accumulate(*p);
          if (observer && observer->variance) {
            std::vector<double> raw, avg;
            for (Parameter* p : fc) {
              raw.insert(raw.end(), p->value.vec().begin(), p->value.vec().end());
              avg.insert(avg.end(), p->asgd_avg->vec().begin(), p->asgd_avg->vec().end());
            }
            observer->variance->raw.push_back(std::move(raw));
            observer->variance->averaged.push_back(std::move(avg));
          }
        }
        if (observer) observer->step_loss.push_back(lv);
        total += lv;
        ++steps;
      }
    }
    out.history.push_back(total / double(steps));
    if (observer) observer->epoch_loss = out.history;
  }
  out.model = std::move(model);
  return out;
}

std::vector<std::int64_t> postprocess_predictions(std::span<const double> transformed) {
  std::vector<std::int64_t> out;
  out.reserve(transformed.size());
  for (double v : transformed) {
    const double mw = std::max(std::expm1(v), 0.0);
    out.push_back(static_cast<std::int64_t>(std::llround(mw)));
  }
  return out;
}

double mape_percent(std::span<const std::int64_t> forecast,
                    std::span<const double> actual) {
  if (forecast.size() != actual.size() || actual.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "forecast/actual length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!(actual[i] > 0.0))
      throw Error(ErrorKind::ZeroActual, "actual demand " + format_double(actual[i]));
    acc += std::abs(double(forecast[i]) - actual[i]) / actual[i];
  }
  return 100.0 * acc / double(actual.size());
}

std::pair<double, double> mean_and_std(std::span<const double> v) {
  if (v.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / double(v.size() - 1))};
}

std::vector<double> predict_window(Model& model, const FeatureWindows& windows,
                                   std::size_t i, const Scaler& scaler) {
  const auto fc = model.fc_parameters();
  std::optional<AsgdSwap> swap;
  if (asgd_ready(fc)) swap.emplace(fc);
  Tape tape;
  const ForwardResult fr = model.forward(tape, make_input(windows, i, scaler));
  std::vector<double> out(fr.prediction.value().vec());
  for (double& v : out) v = scaler.invert(v);
  return out;
}

EvalReport evaluate_mape(Model& model, const FeatureWindows& test,
                         const Scaler& scaler) {
  EvalReport report;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto pred = postprocess_predictions(predict_window(model, test, i, scaler));
    const auto actual = expm1_inverse(test.y_targets(i));
    report.per_window_mape.push_back(mape_percent(pred, actual));
  }
  std::tie(report.mean_mape, report.std_mape) = mean_and_std(report.per_window_mape);
  return report;
}

std::vector<AggregateRow> ExperimentResult::aggregate() const {
  std::vector<AggregateRow> rows;
  for (const ArmResult& arm : arms) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& r) {
      return r.initializer == arm.initializer;
    });
    if (it == rows.end()) {
      rows.push_back({arm.initializer, 0.0, 0.0, 0, 0});
      it = rows.end() - 1;
    }
    ++it->attempted;
  }
  for (AggregateRow& row : rows) {
    std::vector<double> means;
    for (const ArmResult& arm : arms)
      if (arm.initializer == row.initializer && arm.ok)
        means.push_back(arm.report.mean_mape);
    row.succeeded = means.size();
    std::tie(row.average_mape, row.std_mape) = mean_and_std(means);
  }
  return rows;
}

ExperimentResult compare_initializers(const Dataset& data, const ModelConfig& base,
                                      const TrainConfig& cfg,
                                      std::span<const Initializer> initializers,
                                      std::span<const std::uint64_t> seeds,
                                      int jobs) {
  if (initializers.size() < 2 || seeds.size() < 3) {
    throw Error(ErrorKind::Usage,
                "comparison needs >= 2 initializers and >= 3 seeds");
  }
  cfg.validate();
  ExperimentResult result;
  result.arms.resize(initializers.size() * seeds.size());
  for (std::size_t a = 0; a < initializers.size(); ++a)
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      ArmResult& arm = result.arms[a * seeds.size() + s];
      arm.initializer = initializers[a];
      arm.seed = seeds[s];
    }

  const auto n_arms = static_cast<long>(result.arms.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
  for (long k = 0; k < n_arms; ++k) {
    ArmResult& arm = result.arms[std::size_t(k)];
    ModelConfig mc = base;
    mc.fc_initializer = arm.initializer;
    mc.seed = arm.seed;
    TrainConfig tc = cfg;
    tc.seed = arm.seed;
    TrainObserver obs;
    try {
      TrainedModel tm = train(Model::create(mc), data.train, data.scaler, tc, &obs);
      arm.report = evaluate_mape(*tm.model, data.test, data.scaler);
      arm.ok = true;
      arm.status = "ok";
    } catch (const Error& e) {
      arm.ok = false;
      arm.status = "failed:" + std::string(to_string(e.kind()));
    }
    arm.step_loss = std::move(obs.step_loss);
    arm.epoch_loss = std::move(obs.epoch_loss);
  }
  return result;
}

namespace {

std::string fmt_pct(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string write_results_csv(const ExperimentResult& r) {
  std::string out = "initializer,seed,mean_mape_pct,std_mape_pct,status\n";
  for (const ArmResult& arm : r.arms) {
    out += std::string(to_string(arm.initializer)) + "," + std::to_string(arm.seed) +
           "," + (arm.ok ? fmt_pct(arm.report.mean_mape) : "nan") + "," +
           (arm.ok ? fmt_pct(arm.report.std_mape) : "nan") + "," + arm.status + "\n";
  }
  return out;
}

std::string write_aggregate_csv(const ExperimentResult& r) {
  std::string out = "initializer,average_mape_pct,std_pct\n";
  for (const AggregateRow& row : r.aggregate()) {
    out += std::string(to_string(row.initializer)) + "," + fmt_pct(row.average_mape) +
           "," + fmt_pct(row.std_mape) + "\n";
  }
  return out;
}

std::string write_loss_trace_csv(std::span<const double> step_loss) {
  std::string out = "step,loss\n";
  for (std::size_t i = 0; i < step_loss.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(step_loss[i]) + "\n";
  return out;
}

std::string write_mape_trace_csv(const EvalReport& report) {
  std::string out = "window_index,mape_pct\n";
  for (std::size_t i = 0; i < report.per_window_mape.size(); ++i)
    out += std::to_string(i) + "," + format_double(report.per_window_mape[i]) + "\n";
  return out;
}

std::string write_variance_trace_csv(const VarianceTrace& trace) {
  std::string out = "step,param_index,raw,averaged\n";
  for (std::size_t s = 0; s < trace.raw.size(); ++s)
    for (std::size_t j = 0; j < trace.raw[s].size(); ++j)
      out += std::to_string(s + 1) + "," + std::to_string(j) + "," +
             format_double(trace.raw[s][j]) + "," +
             format_double(trace.averaged[s][j]) + "\n";
  return out;
}

}  // namespace loadfc
