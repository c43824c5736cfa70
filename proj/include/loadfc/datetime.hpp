// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace loadfc {

/// Naive local calendar time with minute resolution, stored as minutes since
/// 1970-01-01T00:00. Daylight saving is deliberately not modelled.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t minutes) : minutes_(minutes) {}

  static Timestamp from_civil(int year, unsigned month, unsigned day,
                              int hour = 0, int minute = 0);

  constexpr std::int64_t minutes() const noexcept { return minutes_; }
  std::chrono::sys_days day() const noexcept;
  int minute_of_day() const noexcept;
  /// Monday = 0 ... Sunday = 6.
  int weekday_index() const noexcept;

  constexpr Timestamp operator+(std::int64_t mins) const noexcept {
    return Timestamp(minutes_ + mins);
  }
  constexpr std::int64_t operator-(Timestamp other) const noexcept {
    return minutes_ - other.minutes_;
  }
  constexpr auto operator<=>(const Timestamp&) const = default;

  /// "YYYY-MM-DDTHH:MM:SS"
  std::string iso() const;

 private:
  std::int64_t minutes_ = 0;
};

/// Parses "YYYY/MM/DD HH:MM:SS" (AEMO) or "YYYY-MM-DDTHH:MM:SS" (ISO-8601,
/// also accepted with a space separator). Seconds must be zero.
std::optional<Timestamp> parse_timestamp(std::string_view text);

inline constexpr std::int64_t kStepMinutes = 30;
inline constexpr int kStepsPerDay = 48;

}  // namespace loadfc
