#include "bearraid/money.hpp"

#include <cmath>
#include <cstdlib>

namespace bearraid {

namespace {

std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  bool negative = v < 0;
  // Work in the negative range so the minimum value formats correctly.
  int128 n = negative ? v : -v;
  std::string digits;
  while (n != 0) {
    digits.push_back(static_cast<char>('0' - static_cast<int>(n % 10)));
    n /= 10;
  }
  if (negative) digits.push_back('-');
  return {digits.rbegin(), digits.rend()};
}

}  // namespace

std::optional<Price> Price::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  int128 whole = 0;
  std::size_t whole_digits = 0;
  for (; i < text.size() && text[i] != '.'; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') return std::nullopt;
    whole = whole * 10 + (c - '0');
    if (++whole_digits > 14) return std::nullopt;
  }
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  bool round_up = false;
  if (i < text.size()) {
    ++i;  // '.'
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c < '0' || c > '9') return std::nullopt;
      if (frac_digits < 4) {
        frac = frac * 10 + (c - '0');
      } else if (frac_digits == 4) {
        round_up = c >= '5';
      }
      ++frac_digits;
    }
    if (frac_digits == 0 && whole_digits == 0) return std::nullopt;
  } else if (whole_digits == 0) {
    return std::nullopt;
  }
  for (std::size_t k = std::min<std::size_t>(frac_digits, 4); k < 4; ++k) frac *= 10;
  int128 units = whole * kUnitsPerDollar + frac + (round_up ? 1 : 0);
  return Price{static_cast<std::int64_t>(negative ? -units : units)};
}

Price Price::from_dollars(double dollars) {
  return Price{static_cast<std::int64_t>(std::llround(dollars * kUnitsPerDollar))};
}

std::string Price::to_string() const {
  std::int64_t whole = units / kUnitsPerDollar;
  std::int64_t frac = std::llabs(units % kUnitsPerDollar);
  std::string out = (units < 0 && whole == 0) ? "-" : "";
  out += std::to_string(whole);
  if (frac != 0) {
    std::string f = std::to_string(frac);
    f.insert(0, 4 - f.size(), '0');
    while (f.back() == '0') f.pop_back();
    out += '.';
    out += f;
  }
  return out;
}

Cents Cents::from_shares(std::int64_t shares, Price price) {
  int128 scaled = static_cast<int128>(shares) * price.units;  // hundredths of a cent
  int128 q = scaled / 100;
  int128 r = scaled % 100;
  if (r >= 50) ++q;
  if (r <= -50) --q;
  return Cents{q};
}

std::string Cents::to_dollar_string() const {
  int128 abs = value < 0 ? -value : value;
  std::string frac = int128_to_string(abs % 100);
  if (frac.size() < 2) frac.insert(0, 1, '0');
  return (value < 0 ? "-" : "") + int128_to_string(abs / 100) + "." + frac;
}

}  // namespace bearraid
