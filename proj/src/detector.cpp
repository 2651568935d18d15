#include "bearraid/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bearraid/error.hpp"

namespace bearraid {

void DetectorConfig::validate() const {
  if (!(r_open_min > 0.0)) throw InputError("r_open_min must be positive");
  if (!(q_min > 0.0)) throw InputError("q_min must be positive");
  if (pairing_window < 1) throw InputError("pairing_window must be at least 1");
  if (!(baseline_tolerance > 0.0 && baseline_tolerance < 1.0)) {
    throw InputError("baseline_tolerance must lie strictly between 0 and 1");
  }
  if (joint_window < 1) throw InputError("joint_window must be at least 1");
  if (trading_days_per_year < 1) throw InputError("trading_days_per_year must be positive");
  if (!(x_min_quantile >= 0.0 && x_min_quantile < 1.0)) {
    throw InputError("x_min_quantile must lie in [0, 1)");
  }
  if (metrics.window < 1) throw InputError("metrics window must be at least 1");
  if (!(metrics.uptick.max_drop > 0.0 && metrics.uptick.max_drop < 1.0)) {
    throw InputError("alternative uptick drop must lie strictly between 0 and 1");
  }
}

std::vector<Anomaly> scan_anomalies(std::span<const DayMetrics> metrics, const DetectorConfig& config) {
  std::vector<Anomaly> out;
  for (std::size_t t = 0; t < metrics.size(); ++t) {
    const DayMetrics& m = metrics[t];
    if (!m.scannable()) continue;
    std::optional<AnomalyKind> kind;
    if (*m.r >= config.r_open_min && *m.q >= config.q_min) {
      kind = AnomalyKind::OpenSpike;
    } else if (*m.r <= -config.r_open_min) {
      kind = AnomalyKind::CoverSpike;
    }
    if (!kind) continue;
    Anomaly a;
    a.date = m.date;
    a.index = t;
    a.kind = *kind;
    a.r = *m.r;
    a.q = *m.q;
    a.si_level_ratio = m.si_level_ratio;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<RaidCandidate> pair_candidates(std::span<const Anomaly> anomalies,
                                           const MarketSeries& series, const DetectorConfig& config) {
  for (std::size_t i = 1; i < anomalies.size(); ++i) {
    if (!(anomalies[i - 1].date < anomalies[i].date)) {
      throw std::invalid_argument("anomalies must be strictly date-ordered");
    }
  }
  std::vector<const Anomaly*> covers;
  for (const auto& a : anomalies) {
    if (a.kind == AnomalyKind::CoverSpike) covers.push_back(&a);
  }
  std::vector<bool> used(covers.size(), false);

  std::vector<RaidCandidate> out;
  for (const auto& open : anomalies) {
    if (open.kind != AnomalyKind::OpenSpike || open.index == 0) continue;
    const std::int64_t s_pre = series[open.index - 1].short_interest;
    std::optional<std::size_t> best;
    std::int64_t best_gap = 0;
    for (std::size_t c = 0; c < covers.size(); ++c) {
      const Anomaly& cover = *covers[c];
      if (used[c] || cover.index <= open.index) continue;
      if (cover.index > open.index + config.pairing_window) break;
      std::int64_t gap = series[cover.index].short_interest - s_pre;
      if (gap < 0) gap = -gap;
      if (!best || gap < best_gap) {
        best = c;
        best_gap = gap;
      }
    }
    if (!best) continue;
    if (static_cast<double>(best_gap) > config.baseline_tolerance * static_cast<double>(s_pre)) continue;
    used[*best] = true;

    RaidCandidate cand;
    cand.open = open;
    cand.cover = *covers[*best];
    cand.separation = cand.cover.index - open.index;
    cand.baseline_gap_shares = best_gap;
    cand.baseline_gap = s_pre > 0 ? static_cast<double>(best_gap) / static_cast<double>(s_pre) : 0.0;
    out.push_back(std::move(cand));
  }
  return out;
}

EventProbability event_probability(const Anomaly& anomaly, const TailFits& fits) {
  EventProbability out;
  if (anomaly.kind == AnomalyKind::OpenSpike) {
    if (!fits.r_positive) {
      out.notes.push_back("p_R unavailable: no R positive-tail fit");
    } else if (!(anomaly.r > 0.0) || anomaly.r < fits.r_positive->x_min) {
      out.notes.push_back("p_R unavailable: R below power-law x_min");
    } else {
      out.p_r = tail_probability(*fits.r_positive, anomaly.r);
    }
  } else if (!fits.r_negative) {
    out.notes.push_back("p_R unavailable: no R Laplace fit");
  } else {
    out.p_r = tail_probability(*fits.r_negative, anomaly.r, TailSide::Lower, fits.laplace_form);
  }

  if (!fits.q) {
    out.notes.push_back("p_Q unavailable: no Q power-law fit");
  } else if (!(anomaly.q > 0.0) || anomaly.q < fits.q->x_min) {
    out.notes.push_back("p_Q unavailable: Q below power-law x_min");
  } else {
    out.p_q = tail_probability(*fits.q, anomaly.q);
  }
  return out;
}

double joint_probability(double p1, double p2, std::size_t window) {
  return std::min(1.0, p1 * p2 * static_cast<double>(window));
}

double waiting_time_years(double p, int trading_days_per_year) {
  if (!(p > 0.0)) throw std::domain_error("waiting time needs a positive probability");
  return 1.0 / (p * static_cast<double>(trading_days_per_year));
}

Rational waiting_time_years(const Rational& p, int trading_days_per_year) {
  if (p.num() <= 0) throw std::domain_error("waiting time needs a positive probability");
  return Rational(1) / (p * Rational(trading_days_per_year));
}

Cents estimate_profit(const RaidCandidate& candidate, const MarketSeries& series) {
  const auto& adj = series.adjusted_close();
  std::int64_t opened = series[candidate.open.index].delta_short.value_or(0);
  return Cents::from_shares(opened, adj[candidate.open.index] - adj[candidate.cover.index]);
}

std::int64_t off_market_residual(const RaidCandidate& candidate, const MarketSeries& series) {
  const MarketDay& day = series[candidate.cover.index];
  std::int64_t change = day.delta_short.value_or(0);
  std::int64_t magnitude = change < 0 ? -change : change;
  return std::max<std::int64_t>(0, magnitude - day.volume);
}

DividendScreen dividend_arbitrage_screen(Date open_date, const std::set<Date>& ex_dividend_dates,
                                         std::span<const Date> trading_days, std::size_t lookahead) {
  auto position = [&](Date d) {
    return static_cast<std::ptrdiff_t>(std::lower_bound(trading_days.begin(), trading_days.end(), d) -
                                       trading_days.begin());
  };
  const std::ptrdiff_t open_pos = position(open_date);
  const auto reach = static_cast<std::ptrdiff_t>(lookahead);
  std::optional<std::ptrdiff_t> nearest;  // signed trading-day offset ex - open
  for (Date ex : ex_dividend_dates) {
    std::ptrdiff_t offset = position(ex) - open_pos;
    // Dates off the trading calendar still sit strictly before or after the open.
    if (ex < open_date) offset = std::min<std::ptrdiff_t>(offset, -1);
    if (open_date < ex) offset = std::max<std::ptrdiff_t>(offset, 1);
    if (ex == open_date) offset = 0;
    if (offset < -reach || offset > reach) continue;
    if (!nearest || std::abs(offset) < std::abs(*nearest) ||
        (std::abs(offset) == std::abs(*nearest) && offset > *nearest)) {
      nearest = offset;
    }
  }
  if (!nearest) return DividendScreen::NoDividendNearby;
  return *nearest > 0 ? DividendScreen::Possible : DividendScreen::Excluded;
}

LagReport reporting_lag_check(std::span<const ShortRecord> records, Date ban_start, Date ban_end,
                              const LagCheckOptions& options) {
  if (records.empty()) throw InputError("no short-interest records");
  if (ban_end < ban_start) throw InputError("ban window ends before it starts");
  if (ban_start < records.front().date || records.back().date < ban_end) {
    throw InputError("ban window " + ban_start.to_string() + ".." + ban_end.to_string() +
                     " lies outside the data range");
  }
  auto first = std::lower_bound(records.begin(), records.end(), ban_start,
                                [](const ShortRecord& r, Date d) { return r.date < d; });
  auto last = std::upper_bound(records.begin(), records.end(), ban_end,
                               [](Date d, const ShortRecord& r) { return d < r.date; });
  const auto start = static_cast<std::size_t>(first - records.begin());
  const auto stop = static_cast<std::size_t>(last - records.begin());  // exclusive
  if (start >= stop) throw InputError("ban window contains no trading days");

  LagReport report;
  report.scores.assign(options.max_lag + 1, std::nullopt);
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k <= options.max_lag; ++k) {
    if (stop + k > records.size()) break;
    std::size_t in_total = 0, in_positive = 0, out_total = 0, out_positive = 0;
    for (std::size_t t = 0; t < records.size(); ++t) {
      if (!records[t].delta) continue;
      bool positive = *records[t].delta > 0;
      if (t >= start + k && t < stop + k) {
        ++in_total;
        in_positive += positive;
      } else {
        ++out_total;
        out_positive += positive;
      }
    }
    if (in_total == 0 || out_total == 0) continue;
    double in_share = static_cast<double>(in_positive) / static_cast<double>(in_total);
    double out_share = static_cast<double>(out_positive) / static_cast<double>(out_total);
    double score = out_share > 0.0 ? 1.0 - in_share / out_share : 0.0;
    report.scores[k] = score;
    if (!best || score > *report.scores[*best]) best = k;
  }
  if (best) {
    report.lag = *best;
    report.score = *report.scores[*best];
    report.conclusive = report.score >= options.score_floor;
  }
  return report;
}

TailFitReport fit_tails(std::span<const DayMetrics> metrics, const DetectorConfig& config) {
  std::vector<DatedValue> r_samples, q_samples;
  for (const auto& m : metrics) {
    if (!m.scannable()) continue;
    r_samples.push_back({m.date, *m.r});
    q_samples.push_back({m.date, *m.q});
  }

  TailFitReport report;
  report.fits.laplace_form = config.laplace_form;
  const auto& excluded = config.fit_exclusions;

  std::vector<double> r_kept, q_kept;
  for (std::size_t i = 0; i < r_samples.size(); ++i) {
    if (excluded.contains(r_samples[i].date)) {
      report.excluded_dates.push_back(r_samples[i].date);
    } else {
      r_kept.push_back(r_samples[i].value);
      q_kept.push_back(q_samples[i].value);
    }
  }
  report.included = r_kept.size();
  report.excluded = report.excluded_dates.size();

  auto attempt = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const FitError& e) {
      report.failures.emplace_back(name, e.what());
    }
  };
  attempt("r_positive", [&] {
    auto fit = fit_with_exclusions(r_samples, excluded, [&](std::span<const double> v) {
      return fit_upper_power_tail(v, config.x_min_quantile);
    });
    report.fits.r_positive = fit.fit;
  });
  attempt("r_negative", [&] {
    auto fit = fit_with_exclusions(r_samples, excluded,
                                   [](std::span<const double> v) { return fit_laplace(v); });
    report.fits.r_negative = fit.fit;
  });
  attempt("q", [&] {
    auto fit = fit_with_exclusions(q_samples, excluded, [&](std::span<const double> v) {
      return fit_upper_power_tail(v, config.x_min_quantile);
    });
    report.fits.q = fit.fit;
  });
  if (r_kept.size() >= 2) {
    report.r_upper = ecdf_tail(r_kept, TailSide::Upper);
    report.r_lower = ecdf_tail(r_kept, TailSide::Lower);
  }
  if (q_kept.size() >= 2) report.q_upper = ecdf_tail(q_kept, TailSide::Upper);
  return report;
}

DetectionResult detect(const MarketSeries& series, const DetectorConfig& config) {
  config.validate();
  DetectionResult result;
  result.metrics = compute_metrics(series, config.metrics);
  result.fit_report = fit_tails(result.metrics, config);
  result.anomalies = scan_anomalies(result.metrics, config);
  for (auto& a : result.anomalies) {
    EventProbability p = event_probability(a, result.fit_report.fits);
    a.p_r = p.p_r;
    a.p_q = p.p_q;
    a.notes = std::move(p.notes);
  }
  result.candidates = pair_candidates(result.anomalies, series, config);

  std::set<Date> ex_dates;
  std::vector<Date> trading_days;
  trading_days.reserve(series.size());
  for (const auto& d : series.days()) {
    trading_days.push_back(d.date);
    if (d.is_ex_dividend()) ex_dates.insert(d.date);
  }
  for (auto& c : result.candidates) {
    if (c.open.p_r && c.cover.p_r) {
      c.p_joint = joint_probability(*c.open.p_r, *c.cover.p_r, config.joint_window);
      c.waiting_time_years = waiting_time_years(*c.p_joint, config.trading_days_per_year);
    }
    c.profit_estimate = estimate_profit(c, series);
    c.off_market_residual = off_market_residual(c, series);
    c.screens.dividend =
        dividend_arbitrage_screen(c.open.date, ex_dates, trading_days, config.dividend_lookahead);
    c.screens.alt_uptick_open = result.metrics[c.open.index].alt_uptick;
    c.screens.alt_uptick_cover = result.metrics[c.cover.index].alt_uptick;
    c.screens.off_market = c.off_market_residual > 0;
  }
  return result;
}

std::string to_string(AnomalyKind kind) {
  return kind == AnomalyKind::OpenSpike ? "open_spike" : "cover_spike";
}

std::string to_string(DividendScreen screen) {
  switch (screen) {
    case DividendScreen::Excluded: return "excluded";
    case DividendScreen::Possible: return "possible";
    case DividendScreen::NoDividendNearby: return "no-dividend-nearby";
  }
  return "unknown";
}

}  // namespace bearraid
