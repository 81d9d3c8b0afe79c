#include "kgforge/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "kgforge/error.hpp"

namespace kgforge {

bool Date::valid() const noexcept {
  if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1) return false;
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{static_cast<unsigned>(month)},
                                  std::chrono::day{static_cast<unsigned>(day)}};
  return ymd.ok();
}

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  return std::from_chars(text.data() + pos, text.data() + pos + len, out).ec == std::errc();
}

}  // namespace

Date Date::parse(std::string_view text) {
  Date d;
  bool ok = (text.size() == 7 || text.size() == 10) && parse_fixed(text, 0, 4, d.year) &&
            text[4] == '-' && parse_fixed(text, 5, 2, d.month);
  if (ok && text.size() == 10) {
    ok = text[7] == '-' && parse_fixed(text, 8, 2, d.day);
  }
  if (!ok || !d.valid()) {
    throw Error("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  return d;
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

}  // namespace kgforge
