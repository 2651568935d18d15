#pragma once

// Hand-built daily series shaped like a November 2007 large-bank episode:
// a 130M-share borrowing spike on 171M volume, a dividend ex-date the same
// day, and a 202M-share covering day on 121M volume six trading days later.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bearraid/market_data.hpp"

namespace bearraid::testing {

struct CitiFixture {
  static constexpr std::size_t kOpen = 70;
  static constexpr std::size_t kCover = kOpen + 6;
  static constexpr std::size_t kDays = 90;

  std::string price_csv;
  std::string short_csv;
  MarketSeries series;
};

/// Trading dates (Mon-Fri) placing index `anchor_index` on 2007-11-01.
inline std::vector<Date> citi_dates(std::size_t n, std::size_t anchor_index) {
  Date d{2007, 11, 1};
  for (std::size_t k = 0; k < anchor_index; ++k) {
    do {
      d = d.plus_days(-1);
    } while (d.weekday() == std::chrono::Saturday || d.weekday() == std::chrono::Sunday);
  }
  std::vector<Date> out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(d);
    d = next_weekday(d);
  }
  return out;
}

inline CitiFixture make_citi_fixture() {
  constexpr std::size_t n = CitiFixture::kDays;
  constexpr std::size_t t0 = CitiFixture::kOpen;
  constexpr std::size_t tc = CitiFixture::kCover;
  const auto dates = citi_dates(n, t0);

  std::vector<std::int64_t> volume(n, 46'000'000);
  // Trailing 63-day mean at t0 is 46,216,216 shares so that Q(t0) = 3.70.
  for (std::size_t k = t0 - 63; k < t0 - 1; ++k) volume[k] = 45'784'219;
  volume[t0 - 2] = 45'784'249;
  volume[t0 - 1] = 73'000'000;
  volume[t0] = 171'000'000;
  for (std::size_t k = t0 + 1; k < tc; ++k) volume[k] = 60'000'000;
  volume[tc] = 121'000'000;

  // S ramps linearly to 115M over the 63 days before t0, mean 64.47M, so
  // S(t0) = 245M is 3.8 times its trailing mean.
  std::vector<std::int64_t> shorts(n, 13'947'368);
  for (std::size_t k = 0; k < 63; ++k) {
    shorts[t0 - 63 + k] = 13'947'368 + (115'000'000 - 13'947'368) * static_cast<std::int64_t>(k) / 62;
  }
  shorts[t0] = 245'000'000;
  for (std::size_t k = t0 + 1; k < tc; ++k) shorts[k] = shorts[k - 1] + 14'000'000;  // reaches 315M
  shorts[tc] = shorts[tc - 1] - 202'000'000;                                            // 113M
  for (std::size_t k = tc + 1; k < n; ++k) shorts[k] = shorts[tc];

  // Raw closes: 41.85 before the ex-date (adjusted 41.31 after the 0.54
  // dividend), 38.46 on the open day, 33.64 (4.82 lower) on the cover day.
  std::vector<std::string> close(n, "41.85");
  std::vector<std::string> high(n, "42.30");
  std::vector<std::string> low(n, "41.40");
  close[t0] = "38.46";
  high[t0] = "41.90";
  low[t0] = "38.0835";  // 9% under the previous raw close
  const char* walk[] = {"37.50", "36.40", "35.20", "34.60", "34.10"};
  for (std::size_t k = t0 + 1; k < tc; ++k) {
    close[k] = walk[k - t0 - 1];
    high[k] = close[k];
    low[k] = close[k];
  }
  for (std::size_t k = tc; k < n; ++k) {
    close[k] = "33.64";
    high[k] = "34.00";
    low[k] = "33.20";
  }

  CitiFixture fx;
  fx.price_csv = std::string(kPriceCsvHeader) + "\n";
  fx.short_csv = std::string(kShortCsvHeader) + "\n";
  for (std::size_t k = 0; k < n; ++k) {
    fx.price_csv += dates[k].to_string() + "," + high[k] + "," + low[k] + "," + close[k] + "," +
                    std::to_string(volume[k]) + "," + (k == t0 ? "0.54" : "0") + "\n";
    fx.short_csv += dates[k].to_string() + "," + std::to_string(shorts[k]) + "," +
                    (k == t0 ? "130000000" : "") + "\n";
  }
  auto bars = parse_price_csv(fx.price_csv);
  auto recs = parse_short_csv(fx.short_csv);
  fx.series = build_series(bars, recs, "C").series;
  return fx;
}

/// Lending records with random-signed daily changes, except that positive
/// changes are suppressed on records [ban_first + shift, ban_last + shift].
/// The records just outside that block are positive so its edges are observable.
inline std::vector<ShortRecord> ban_records(std::uint64_t seed, std::size_t n, std::size_t ban_first,
                                            std::size_t ban_last, std::size_t shift) {
  std::mt19937_64 rng(seed);
  std::vector<ShortRecord> out;
  Date d{2008, 6, 2};
  std::int64_t s = 100'000'000;
  for (std::size_t t = 0; t < n; ++t) {
    std::int64_t delta = static_cast<std::int64_t>(rng() % 2'000'001) - 1'000'000;
    const bool suppressed = t >= ban_first + shift && t <= ban_last + shift;
    const bool edge = t + 1 == ban_first + shift || t == ban_last + shift + 1;
    if ((suppressed && delta > 0) || (edge && delta < 0)) delta = -delta;
    if (edge && delta == 0) delta = 1;
    if (t > 0) s += delta;
    ShortRecord r;
    r.date = d;
    r.total_short_interest = s;
    out.push_back(r);
    d = next_weekday(d);
  }
  return reconcile_deltas(std::move(out));
}

}  // namespace bearraid::testing
