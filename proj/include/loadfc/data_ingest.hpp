// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loadfc/datetime.hpp"

namespace loadfc {

struct LoadRecord {
  Timestamp timestamp;
  double demand = 0.0;  // MW

  bool operator==(const LoadRecord&) const = default;
};

/// Half-hourly demand series, strictly increasing in time.
struct LoadSeries {
  std::string region;
  std::vector<LoadRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  std::vector<double> demands() const;
  bool uniform() const noexcept;

  bool operator==(const LoadSeries&) const = default;
};

/// log(1 + demand), index-aligned with its source series.
struct TransformedSeries {
  std::vector<Timestamp> timestamps;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

/// Splits one CSV line into fields. Double quotes delimit fields that may
/// contain commas; "" inside a quoted field is a literal quote.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses AEMO price-and-demand CSV text (REGION, SETTLEMENTDATE,
/// TOTALDEMAND, other columns ignored). Errors name `source_name` and the
/// 1-based line number.
LoadSeries parse_aemo_csv(std::string_view text,
                          std::optional<std::string_view> region = std::nullopt,
                          std::string_view source_name = "<input>");

/// Merges already-parsed series (e.g. one per monthly file) and rejects
/// timestamps that appear in more than one input.
LoadSeries merge_series(std::span<const LoadSeries> parts);

inline constexpr std::size_t kDefaultMaxGap = 4;

/// Fills runs of at most `max_gap` missing half-hours by linear
/// interpolation between the flanking demands.
LoadSeries repair_gaps(const LoadSeries& series,
                       std::size_t max_gap = kDefaultMaxGap);

TransformedSeries log1p_series(const LoadSeries& series);
std::vector<double> expm1_inverse(std::span<const double> values);

/// Canonical series file: header "timestamp,demand", ISO-8601 timestamps,
/// shortest round-trip decimal demands.
std::string write_series_csv(const LoadSeries& series);
LoadSeries read_series_csv(std::string_view text,
                           std::string_view source_name = "<series>");

std::string format_double(double v);

}  // namespace loadfc
