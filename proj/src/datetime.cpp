// SPDX-License-Identifier: Apache-2.0
#include "loadfc/datetime.hpp"

#include <charconv>
#include <cstdio>

namespace loadfc {

namespace {

constexpr std::int64_t kMinutesPerDay = 24 * 60;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool read_int(std::string_view text, std::size_t pos, std::size_t len,
              int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Timestamp Timestamp::from_civil(int year, unsigned month, unsigned day,
                                int hour, int minute) {
  using namespace std::chrono;
  const sys_days d = std::chrono::year{year} / std::chrono::month{month} /
                     std::chrono::day{day};
  return Timestamp(static_cast<std::int64_t>(d.time_since_epoch().count()) *
                       kMinutesPerDay +
                   hour * 60 + minute);
}

std::chrono::sys_days Timestamp::day() const noexcept {
  return std::chrono::sys_days{
      std::chrono::days{floor_div(minutes_, kMinutesPerDay)}};
}

int Timestamp::minute_of_day() const noexcept {
  return static_cast<int>(minutes_ - floor_div(minutes_, kMinutesPerDay) *
                                         kMinutesPerDay);
}

int Timestamp::weekday_index() const noexcept {
  // iso_encoding: Monday = 1 ... Sunday = 7
  return static_cast<int>(std::chrono::weekday{day()}.iso_encoding()) - 1;
}

std::string Timestamp::iso() const {
  const std::chrono::year_month_day ymd{day()};
  const int mod = minute_of_day();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:00",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), mod / 60, mod % 60);
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  // Tolerate surrounding whitespace from hand-edited files.
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r'))
    text.remove_suffix(1);
  if (text.size() != 19 && text.size() != 16) return std::nullopt;

  const char dsep = text[4];
  if (!((dsep == '/' || dsep == '-') && text[7] == dsep)) return std::nullopt;
  if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
  if (text[13] != ':') return std::nullopt;

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) ||
      !read_int(text, 8, 2, d) || !read_int(text, 11, 2, h) ||
      !read_int(text, 14, 2, mi))
    return std::nullopt;
  if (text.size() == 19) {
    if (text[16] != ':' || !read_int(text, 17, 2, s)) return std::nullopt;
  }
  const std::chrono::year_month_day ymd{
      std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
      std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59)
    return std::nullopt;
  if (s != 0) return std::nullopt;
  return Timestamp::from_civil(y, static_cast<unsigned>(mo),
                               static_cast<unsigned>(d), h, mi);
}

}  // namespace loadfc
