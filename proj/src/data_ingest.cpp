// SPDX-License-Identifier: Apache-2.0
#include "loadfc/data_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "loadfc/error.hpp"

namespace loadfc {

namespace {

std::string upper_trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Calls fn(line, line_number) for every non-empty line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

void sort_and_check_duplicates(LoadSeries& series, std::string_view source) {
  std::stable_sort(series.records.begin(), series.records.end(),
                   [](const LoadRecord& a, const LoadRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  const auto dup = std::adjacent_find(
      series.records.begin(), series.records.end(),
      [](const LoadRecord& a, const LoadRecord& b) {
        return a.timestamp == b.timestamp;
      });
  if (dup != series.records.end()) {
    throw Error(ErrorKind::DuplicateTimestamp,
                std::string(source) + ": " + dup->timestamp.iso() +
                    " appears more than once");
  }
}

}  // namespace

std::vector<double> LoadSeries::demands() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.demand);
  return out;
}

bool LoadSeries::uniform() const noexcept {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].timestamp - records[i - 1].timestamp != kStepMinutes)
      return false;
  }
  return true;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

LoadSeries parse_aemo_csv(std::string_view text,
                          std::optional<std::string_view> region,
                          std::string_view source_name) {
  LoadSeries series;
  if (region) series.region = upper_trim(*region);

  long col_region = -1, col_date = -1, col_demand = -1;
  bool have_header = false;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split_csv_line(line);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = upper_trim(fields[i]);
        if (name == "REGION" || name == "REGIONID") col_region = long(i);
        if (name == "SETTLEMENTDATE") col_date = long(i);
        if (name == "TOTALDEMAND") col_demand = long(i);
      }
      if (col_date < 0 || col_demand < 0) {
        throw Error(ErrorKind::MalformedRow,
                    where(source_name, line_no) +
                        ": header lacks SETTLEMENTDATE/TOTALDEMAND columns");
      }
      have_header = true;
      return;
    }
    const auto need = static_cast<std::size_t>(
        std::max({col_region, col_date, col_demand}) + 1);
    if (fields.size() < need) {
      throw Error(ErrorKind::MalformedRow,
                  where(source_name, line_no) + ": expected at least " +
                      std::to_string(need) + " fields");
    }
    std::string row_region;
    if (col_region >= 0) row_region = upper_trim(fields[std::size_t(col_region)]);
    if (region && row_region != series.region) return;

    const auto ts = parse_timestamp(fields[std::size_t(col_date)]);
    if (!ts) {
      throw Error(ErrorKind::MalformedRow,
                  where(source_name, line_no) + ": bad settlement date '" +
                      fields[std::size_t(col_date)] + "'");
    }
    if (ts->minute_of_day() % kStepMinutes != 0) {
      throw Error(ErrorKind::MalformedRow,
                  where(source_name, line_no) +
                      ": settlement date not on a half-hour boundary");
    }
    const auto demand = parse_double(fields[std::size_t(col_demand)]);
    if (!demand || !std::isfinite(*demand) || *demand < 0.0) {
      throw Error(ErrorKind::MalformedRow,
                  where(source_name, line_no) + ": bad demand '" +
                      fields[std::size_t(col_demand)] + "'");
    }
    if (series.region.empty()) series.region = row_region;
    series.records.push_back({*ts, *demand});
  });

  if (!have_header) {
    throw Error(ErrorKind::MalformedRow,
                std::string(source_name) + ": missing header row");
  }
  if (series.records.empty()) {
    throw Error(ErrorKind::EmptySeries,
                std::string(source_name) + ": no demand rows" +
                    (region ? " for region " + series.region : std::string{}));
  }
  sort_and_check_duplicates(series, source_name);
  return series;
}

LoadSeries merge_series(std::span<const LoadSeries> parts) {
  LoadSeries merged;
  for (const auto& p : parts) {
    if (merged.region.empty()) merged.region = p.region;
    merged.records.insert(merged.records.end(), p.records.begin(),
                          p.records.end());
  }
  if (merged.records.empty()) throw Error(ErrorKind::EmptySeries, "no records");
  sort_and_check_duplicates(merged, "merged input");
  return merged;
}

LoadSeries repair_gaps(const LoadSeries& series, std::size_t max_gap) {
  if (series.records.empty()) throw Error(ErrorKind::EmptySeries, "no records");
  LoadSeries out;
  out.region = series.region;
  out.records.reserve(series.records.size());
  out.records.push_back(series.records.front());
  for (std::size_t i = 1; i < series.records.size(); ++i) {
    const LoadRecord& a = series.records[i - 1];
    const LoadRecord& b = series.records[i];
    const std::int64_t delta = b.timestamp - a.timestamp;
    if (delta <= 0) {
      throw Error(ErrorKind::DuplicateTimestamp,
                  "records not strictly increasing at " + b.timestamp.iso());
    }
    if (delta % kStepMinutes != 0) {
      throw Error(ErrorKind::MalformedRow,
                  "off-grid timestamp " + b.timestamp.iso());
    }
    const std::int64_t steps = delta / kStepMinutes;
    const auto missing = static_cast<std::size_t>(steps - 1);
    if (missing > max_gap) {
      throw Error(ErrorKind::GapTooLarge,
                  std::to_string(missing) + " missing half-hours after " +
                      a.timestamp.iso() + " (max " + std::to_string(max_gap) +
                      ")");
    }
    for (std::int64_t k = 1; k < steps; ++k) {
      const double frac = double(k) / double(steps);
      out.records.push_back({a.timestamp + k * kStepMinutes,
                             a.demand + frac * (b.demand - a.demand)});
    }
    out.records.push_back(b);
  }
  return out;
}

TransformedSeries log1p_series(const LoadSeries& series) {
  TransformedSeries out;
  out.timestamps.reserve(series.size());
  out.values.reserve(series.size());
  for (const auto& r : series.records) {
    if (!(r.demand >= 0.0)) {
      throw Error(ErrorKind::NegativeDemand,
                  "demand " + format_double(r.demand) + " at " +
                      r.timestamp.iso());
    }
    out.timestamps.push_back(r.timestamp);
    out.values.push_back(std::log1p(r.demand));
  }
  return out;
}

std::vector<double> expm1_inverse(std::span<const double> values) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](double v) { return std::expm1(v); });
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string write_series_csv(const LoadSeries& series) {
  std::string out = "timestamp,demand\n";
  for (const auto& r : series.records) {
    out += r.timestamp.iso();
    out += ',';
    out += format_double(r.demand);
    out += '\n';
  }
  return out;
}

LoadSeries read_series_csv(std::string_view text,
                           std::string_view source_name) {
  LoadSeries series;
  bool header = false;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (!header) {
      header = true;
      return;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw Error(ErrorKind::MalformedRow,
                  where(source_name, line_no) + ": expected 2 fields");
    }
    const auto ts = parse_timestamp(fields[0]);
    const auto d = parse_double(fields[1]);
    if (!ts || !d || !std::isfinite(*d) || *d < 0.0) {
      throw Error(ErrorKind::MalformedRow,
                  where(source_name, line_no) + ": bad row");
    }
    series.records.push_back({*ts, *d});
  });
  if (series.records.empty())
    throw Error(ErrorKind::EmptySeries, std::string(source_name));
  sort_and_check_duplicates(series, source_name);
  return series;
}

}  // namespace loadfc
