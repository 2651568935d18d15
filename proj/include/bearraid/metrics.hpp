#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bearraid/market_data.hpp"

namespace bearraid {

inline constexpr std::size_t kTrailingWindow = 63;

/// Alternative uptick rule: restrictions apply once the day's low falls more
/// than `max_drop` below the previous close.
struct UptickRule {
  double max_drop = 0.10;
  /// When true a drop of exactly `max_drop` also triggers.
  bool inclusive = false;
};

struct MetricsConfig {
  std::size_t window = kTrailingWindow;
  /// R(t) uses ΔS(t + lag) against V(t).
  std::size_t lag = 0;
  UptickRule uptick;
};

/// Per-day anomaly ratios. Undefined values are nullopt.
struct DayMetrics {
  Date date;
  std::optional<double> r;               ///< ΔS / V
  std::optional<double> q;               ///< V / trailing mean of V
  std::optional<double> si_level_ratio;  ///< S / trailing mean of S
  std::optional<Price> adj_change;
  std::optional<double> adj_change_pct;
  bool alt_uptick = false;

  bool scannable() const { return r.has_value() && q.has_value(); }
};

struct PriceChange {
  Price absolute;
  double pct = 0.0;
};

/// Mean of values[t - window .. t - 1]; the current value is never included.
/// nullopt when fewer than `window` prior values exist.
std::optional<double> trailing_mean(std::span<const double> values, std::size_t t,
                                    std::size_t window = kTrailingWindow);

std::optional<double> short_change_ratio(std::optional<std::int64_t> delta, std::int64_t volume);
std::optional<double> short_change_ratio(const MarketDay& day);

std::optional<double> volume_ratio(const MarketSeries& series, std::size_t t,
                                   std::size_t window = kTrailingWindow);
std::optional<double> level_ratio(const MarketSeries& series, std::size_t t,
                                  std::size_t window = kTrailingWindow);

/// Change in adjusted close from t-1 to t; nullopt at t = 0. Throws
/// std::domain_error when the previous adjusted close is zero.
std::optional<PriceChange> adjusted_price_change(const MarketSeries& series, std::size_t t);

/// Compares the raw low against the raw previous close with exact integer
/// arithmetic. Throws std::invalid_argument for a non-positive previous close.
bool alt_uptick_triggered(const MarketDay& day, Price prev_close, const UptickRule& rule = {});

std::vector<DayMetrics> compute_metrics(const MarketSeries& series, const MetricsConfig& config = {});

inline constexpr std::string_view kMetricsCsvHeader =
    "date,R,Q,si_level_ratio,adj_change,adj_change_pct,alt_uptick";

std::string write_metrics_csv(std::span<const DayMetrics> metrics);

}  // namespace bearraid
