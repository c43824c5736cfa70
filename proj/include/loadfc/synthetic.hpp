// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "loadfc/data_ingest.hpp"

namespace loadfc {

/// Half-hourly demand: base level plus daily, weekly and annual sinusoids,
/// scaled by (1 + noise * N(0, 1)).
struct SyntheticOptions {
  std::size_t days = 730;
  double base_mw = 8000.0;
  double daily_mw = 1500.0;
  double weekly_mw = 500.0;
  double annual_mw = 300.0;
  double noise = 0.02;
  Timestamp start = Timestamp::from_civil(2015, 1, 1, 0, 30);
  std::string region = "NSW1";
  std::uint64_t seed = 0;
};

LoadSeries synthetic_series(const SyntheticOptions& opts);

/// AEMO price-and-demand layout: REGION,SETTLEMENTDATE,TOTALDEMAND,RRP,PERIODTYPE.
std::string write_aemo_csv(const LoadSeries& series);

}  // namespace loadfc
