// SPDX-License-Identifier: Apache-2.0
#include "loadfc/forecast.hpp"

#include <optional>

#include "loadfc/error.hpp"
#include "loadfc/optim.hpp"
#include "loadfc/train_eval.hpp"

namespace loadfc {

std::vector<ForecastPoint> forecast(Model& model, const Scaler& scaler,
                                    const AutocorrPair& autocorr,
                                    const LoadSeries& series, std::size_t horizon) {
  const ModelConfig& cfg = model.config();
  if (cfg.input_dim != kFeatureCount) {
    throw Error(ErrorKind::SchemaMismatch,
                "model expects " + std::to_string(cfg.input_dim) +
                    " input features, schema has " + std::to_string(kFeatureCount));
  }
  if (horizon < 1 || horizon > cfg.predict_window) {
    throw Error(ErrorKind::Usage, "horizon must be in [1, " +
                                      std::to_string(cfg.predict_window) + "]");
  }
  if (!series.uniform())
    throw Error(ErrorKind::GapTooLarge, "series must be gap-free; run repair_gaps first");

  const TransformedSeries tr = log1p_series(series);
  const FeatureMatrix m = build_feature_matrix(tr, autocorr);
  const std::size_t tw = cfg.training_window;
  if (m.rows() < tw) {
    throw Error(ErrorKind::SeriesTooShort,
                std::to_string(m.rows()) + " feature rows, model needs " + std::to_string(tw));
  }
  std::vector<double> x(m.values.end() - long(tw * kFeatureCount), m.values.end());
  std::vector<double> y = future_covariates(tr, autocorr, cfg.predict_window);
  const WindowInput input =
      scale_input(std::move(x), std::move(y), tw, cfg.predict_window, scaler);

  const auto fc = model.fc_parameters();
  std::optional<AsgdSwap> swap;
  if (asgd_ready(fc)) swap.emplace(fc);
  Tape tape;
  const ForwardResult fr = model.forward(tape, input);
  std::vector<double> pred(fr.prediction.value().vec());
  pred.resize(horizon);
  for (double& v : pred) v = scaler.invert(v);
  const auto mw = postprocess_predictions(pred);

  std::vector<ForecastPoint> out;
  const Timestamp last = tr.timestamps.back();
  for (std::size_t k = 0; k < horizon; ++k)
    out.push_back({last + static_cast<std::int64_t>(k + 1) * kStepMinutes, mw[k]});
  return out;
}

std::string write_forecast_csv(const std::vector<ForecastPoint>& points) {
  std::string out = "timestamp,forecast_mw\n";
  for (const ForecastPoint& p : points)
    out += p.timestamp.iso() + "," + std::to_string(p.mw) + "\n";
  return out;
}

}  // namespace loadfc
