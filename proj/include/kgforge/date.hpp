#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace kgforge {

// A calendar date (proleptic Gregorian).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  bool valid() const noexcept;

  // Accepts "YYYY-MM-DD" and "YYYY-MM" (day 1). Throws kgforge::Error on
  // malformed or impossible dates.
  static Date parse(std::string_view text);

  // "YYYY-MM-DD"
  std::string str() const;

  friend bool operator==(const Date&, const Date&) = default;
  friend std::strong_ordering operator<=>(const Date&, const Date&) = default;
};

}  // namespace kgforge
