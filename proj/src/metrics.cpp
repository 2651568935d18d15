#include "bearraid/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "bearraid/format.hpp"

namespace bearraid {

namespace {

/// S(t) or V(t) against the mean of the `window` prior values, computed from an
/// exact integer sum.
template <class Field>
std::optional<double> ratio_to_trailing(const MarketSeries& series, std::size_t t,
                                        std::size_t window, Field field) {
  if (window == 0 || t >= series.size() || t < window) return std::nullopt;
  int128 sum = 0;
  for (std::size_t k = t - window; k < t; ++k) sum += field(series[k]);
  if (sum <= 0) return std::nullopt;
  long double numerator = static_cast<long double>(field(series[t])) * static_cast<long double>(window);
  return static_cast<double>(numerator / static_cast<long double>(sum));
}

}  // namespace

std::optional<double> trailing_mean(std::span<const double> values, std::size_t t,
                                    std::size_t window) {
  if (window == 0 || t >= values.size() || t < window) return std::nullopt;
  double sum = 0.0;
  for (std::size_t k = t - window; k < t; ++k) sum += values[k];
  return sum / static_cast<double>(window);
}

std::optional<double> short_change_ratio(std::optional<std::int64_t> delta, std::int64_t volume) {
  if (!delta || volume == 0) return std::nullopt;
  return static_cast<double>(*delta) / static_cast<double>(volume);
}

std::optional<double> short_change_ratio(const MarketDay& day) {
  return short_change_ratio(day.delta_short, day.volume);
}

std::optional<double> volume_ratio(const MarketSeries& series, std::size_t t, std::size_t window) {
  return ratio_to_trailing(series, t, window, [](const MarketDay& d) { return d.volume; });
}

std::optional<double> level_ratio(const MarketSeries& series, std::size_t t, std::size_t window) {
  return ratio_to_trailing(series, t, window, [](const MarketDay& d) { return d.short_interest; });
}

std::optional<PriceChange> adjusted_price_change(const MarketSeries& series, std::size_t t) {
  if (t == 0 || t >= series.size()) return std::nullopt;
  Price prev = series.adjusted_close()[t - 1];
  if (prev.units == 0) {
    throw std::domain_error("adjusted close on " + series[t - 1].date.to_string() + " is zero");
  }
  Price change = series.adjusted_close()[t] - prev;
  return PriceChange{change, static_cast<double>(change.units) / static_cast<double>(prev.units)};
}

bool alt_uptick_triggered(const MarketDay& day, Price prev_close, const UptickRule& rule) {
  if (prev_close.units <= 0) throw std::invalid_argument("previous close must be positive");
  constexpr std::int64_t kScale = 1'000'000;
  std::int64_t keep = kScale - std::llround(rule.max_drop * kScale);
  int128 lhs = static_cast<int128>(day.low.units) * kScale;
  int128 rhs = static_cast<int128>(prev_close.units) * keep;
  return rule.inclusive ? lhs <= rhs : lhs < rhs;
}

std::vector<DayMetrics> compute_metrics(const MarketSeries& series, const MetricsConfig& config) {
  std::vector<DayMetrics> out;
  out.reserve(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    const MarketDay& day = series[t];
    DayMetrics m;
    m.date = day.date;
    if (t + config.lag < series.size()) {
      m.r = short_change_ratio(series[t + config.lag].delta_short, day.volume);
    }
    m.q = volume_ratio(series, t, config.window);
    m.si_level_ratio = level_ratio(series, t, config.window);
    if (t > 0 && series.adjusted_close()[t - 1].units != 0) {
      auto change = adjusted_price_change(series, t);
      m.adj_change = change->absolute;
      m.adj_change_pct = change->pct;
    }
    if (t > 0 && series[t - 1].close.units > 0) {
      m.alt_uptick = alt_uptick_triggered(day, series[t - 1].close, config.uptick);
    }
    out.push_back(m);
  }
  return out;
}

std::string write_metrics_csv(std::span<const DayMetrics> metrics) {
  std::string out(kMetricsCsvHeader);
  out += '\n';
  for (const auto& m : metrics) {
    out += m.date.to_string();
    out += ',' + format_optional(m.r);
    out += ',' + format_optional(m.q);
    out += ',' + format_optional(m.si_level_ratio);
    out += ',' + (m.adj_change ? m.adj_change->to_string() : std::string());
    out += ',' + format_optional(m.adj_change_pct);
    out += ',';
    out += m.alt_uptick ? "1" : "0";
    out += '\n';
  }
  return out;
}

}  // namespace bearraid
