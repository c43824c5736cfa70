// SPDX-License-Identifier: Apache-2.0
#include "loadfc/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "loadfc/rng.hpp"

namespace loadfc {

LoadSeries synthetic_series(const SyntheticOptions& opts) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double steps_per_year = 365.25 * kStepsPerDay;
  CounterRng rng(opts.seed, rng_stream::kSynthetic);
  std::normal_distribution<double> gauss(0.0, 1.0);

  LoadSeries s;
  s.region = opts.region;
  const std::size_t n = opts.days * kStepsPerDay;
  s.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp ts = opts.start + static_cast<std::int64_t>(i) * kStepMinutes;
    const double t = double(i);
    // Daily peak late afternoon, trough before dawn.
    const double daily = -std::cos(two_pi * (ts.minute_of_day() / 1440.0 - 0.125));
    const double weekly = std::cos(two_pi * (ts.weekday_index() + 0.5) / 7.0 - 0.6);
    const double annual = std::cos(two_pi * t / steps_per_year);
    double mw = opts.base_mw + opts.daily_mw * daily + opts.weekly_mw * weekly +
                opts.annual_mw * annual;
    mw *= 1.0 + opts.noise * gauss(rng);
    s.records.push_back({ts, std::max(mw, 0.0)});
  }
  return s;
}

std::string write_aemo_csv(const LoadSeries& series) {
  std::string out = "REGION,SETTLEMENTDATE,TOTALDEMAND,RRP,PERIODTYPE\n";
  char date[32];
  for (const LoadRecord& r : series.records) {
    const auto ymd = std::chrono::year_month_day(r.timestamp.day());
    const int mod = r.timestamp.minute_of_day();
    std::snprintf(date, sizeof date, "%04d/%02u/%02u %02d:%02d:00", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), mod / 60, mod % 60);
    char demand[32];
    std::snprintf(demand, sizeof demand, "%.2f", r.demand);
    out += series.region + "," + date + "," + demand + ",0,TRADE\n";
  }
  return out;
}

}  // namespace loadfc
