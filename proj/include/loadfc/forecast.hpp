// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loadfc/data_ingest.hpp"
#include "loadfc/features.hpp"
#include "loadfc/models.hpp"
#include "loadfc/pipeline.hpp"

namespace loadfc {

struct ForecastPoint {
  Timestamp timestamp;
  std::int64_t mw = 0;
};

/// Forecasts the `horizon` half-hours after the end of `series` from its last
/// training_window feature rows. horizon must not exceed the model's
/// predict_window. Uses ASGD averages for the FC layer when present.
std::vector<ForecastPoint> forecast(Model& model, const Scaler& scaler,
                                    const AutocorrPair& autocorr,
                                    const LoadSeries& series, std::size_t horizon);

/// Header "timestamp,forecast_mw".
std::string write_forecast_csv(const std::vector<ForecastPoint>& points);

}  // namespace loadfc
