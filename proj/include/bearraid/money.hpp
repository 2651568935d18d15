#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bearraid {

__extension__ using int128 = __int128;

/// Per-share money amount held as integer hundredths of a cent.
struct Price {
  static constexpr std::int64_t kUnitsPerDollar = 10'000;

  std::int64_t units = 0;

  static constexpr Price from_units(std::int64_t u) { return Price{u}; }
  static constexpr Price from_cents(std::int64_t cents) { return Price{cents * 100}; }

  /// Decimal text such as `42.31`, `-0.5` or `7`. Digits past the fourth
  /// decimal place are rounded half away from zero.
  static std::optional<Price> parse(std::string_view text);

  /// Nearest representable price to a dollar value.
  static Price from_dollars(double dollars);

  double dollars() const { return static_cast<double>(units) / kUnitsPerDollar; }

  /// Shortest exact decimal text (`42.31`, `10`, `-2.85`).
  std::string to_string() const;

  constexpr Price operator-() const { return Price{-units}; }
  constexpr Price operator+(Price o) const { return Price{units + o.units}; }
  constexpr Price operator-(Price o) const { return Price{units - o.units}; }
  constexpr Price& operator+=(Price o) { units += o.units; return *this; }
  constexpr Price& operator-=(Price o) { units -= o.units; return *this; }

  friend constexpr auto operator<=>(const Price&, const Price&) = default;
};

/// Aggregate money (share count times per-share price) in integer cents.
struct Cents {
  int128 value = 0;

  /// Exact share-count times price, rounded half away from zero to the cent.
  static Cents from_shares(std::int64_t shares, Price price);

  double dollars() const { return static_cast<double>(value) / 100.0; }

  /// Plain decimal dollars with two fraction digits, e.g. `626600000.00`.
  std::string to_dollar_string() const;

  friend constexpr auto operator<=>(const Cents&, const Cents&) = default;
};

}  // namespace bearraid
