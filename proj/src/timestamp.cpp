#include "medfg/timestamp.hpp"

#include <array>
#include <cstdio>

namespace medfg {
namespace {

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 +
         static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
  static constexpr std::array<unsigned, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                     31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

bool read_fixed_uint(std::string_view text, std::size_t pos, std::size_t len,
                     unsigned& out) {
  if (pos + len > text.size()) return false;
  unsigned value = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const char c = text[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + static_cast<unsigned>(c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
  unsigned year = 0, month = 0, day = 0;
  if (!read_fixed_uint(text, 0, 4, year)) return std::nullopt;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_fixed_uint(text, 5, 2, month)) return std::nullopt;
  if (!read_fixed_uint(text, 8, 2, day)) return std::nullopt;
  if (year < 1 || month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > days_in_month(static_cast<int>(year), month))
    return std::nullopt;

  unsigned hour = 0, minute = 0, second = 0;
  if (text.size() > 10) {
    if (text.size() != 19) return std::nullopt;
    if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
    if (text[13] != ':' || text[16] != ':') return std::nullopt;
    if (!read_fixed_uint(text, 11, 2, hour)) return std::nullopt;
    if (!read_fixed_uint(text, 14, 2, minute)) return std::nullopt;
    if (!read_fixed_uint(text, 17, 2, second)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  }

  const std::int64_t days =
      days_from_civil(static_cast<int>(year), month, day);
  return Timestamp{days * 86400 + hour * 3600 + minute * 60 + second};
}

std::string Timestamp::to_string() const {
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lld", y, m,
                d, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return std::string(buf);
}

}  // namespace medfg
