#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace bearraid {

/// Calendar date at day resolution. Trading days are whatever dates the input
/// data carries; there is no holiday calendar.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int y, unsigned m, unsigned d)
      : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}}) {}

  /// Strict ISO-8601 `YYYY-MM-DD`; nullopt on anything else or an invalid day.
  static std::optional<Date> parse(std::string_view text);

  std::string to_string() const;
  constexpr std::chrono::sys_days sys_days() const { return days_; }
  std::chrono::weekday weekday() const { return std::chrono::weekday{days_}; }

  Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Next Monday-to-Friday date strictly after `d`.
Date next_weekday(Date d);

}  // namespace bearraid
