#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bearraid/market_data.hpp"
#include "bearraid/metrics.hpp"
#include "bearraid/rational.hpp"
#include "bearraid/tail_fit.hpp"

namespace bearraid {

struct DetectorConfig {
  double r_open_min = 0.5;
  double q_min = 3.0;
  std::size_t pairing_window = 10;
  double baseline_tolerance = 0.10;
  std::size_t joint_window = 6;
  int trading_days_per_year = 250;
  std::set<Date> fit_exclusions;
  double x_min_quantile = 0.8;
  std::size_t dividend_lookahead = 5;
  LaplaceForm laplace_form = LaplaceForm::Normalized;
  MetricsConfig metrics;

  /// Throws InputError when a field is out of range.
  void validate() const;
};

enum class AnomalyKind { OpenSpike, CoverSpike };

struct Anomaly {
  Date date;
  std::size_t index = 0;  ///< position in the series
  AnomalyKind kind = AnomalyKind::OpenSpike;
  double r = 0.0;
  double q = 0.0;
  std::optional<double> si_level_ratio;
  std::optional<double> p_r;
  std::optional<double> p_q;
  /// Why a probability is unavailable, if it is.
  std::vector<std::string> notes;

  friend bool operator==(const Anomaly&, const Anomaly&) = default;
};

enum class DividendScreen { Excluded, Possible, NoDividendNearby };

struct ScreenResults {
  DividendScreen dividend = DividendScreen::NoDividendNearby;
  bool alt_uptick_open = false;
  bool alt_uptick_cover = false;
  /// Reported decrease in borrowed shares exceeds recorded volume on the cover day.
  bool off_market = false;

  friend bool operator==(const ScreenResults&, const ScreenResults&) = default;
};

struct RaidCandidate {
  Anomaly open;
  Anomaly cover;
  std::size_t separation = 0;       ///< trading days from open to cover
  double baseline_gap = 0.0;        ///< |S(cover) - S_pre| / S_pre
  std::int64_t baseline_gap_shares = 0;
  std::optional<double> p_joint;
  std::optional<double> waiting_time_years;
  Cents profit_estimate;
  std::int64_t off_market_residual = 0;
  ScreenResults screens;

  friend bool operator==(const RaidCandidate&, const RaidCandidate&) = default;
};

struct TailFits {
  std::optional<PowerLawFit> r_positive;
  std::optional<LaplaceFit> r_negative;
  std::optional<PowerLawFit> q;
  LaplaceForm laplace_form = LaplaceForm::Normalized;
};

/// OpenSpike: R >= r_open_min and Q >= q_min. CoverSpike: R <= -r_open_min.
/// Days without both R and Q are never flagged.
std::vector<Anomaly> scan_anomalies(std::span<const DayMetrics> metrics, const DetectorConfig& config);

/// Pairs each OpenSpike, in date order, with the unused CoverSpike in the
/// following `pairing_window` days whose short interest is closest to the
/// pre-open level S(t0 - 1); ties go to the earlier cover. The pair is kept
/// only if the gap is within `baseline_tolerance` of that level.
std::vector<RaidCandidate> pair_candidates(std::span<const Anomaly> anomalies,
                                           const MarketSeries& series, const DetectorConfig& config);

struct EventProbability {
  std::optional<double> p_r;
  std::optional<double> p_q;
  std::vector<std::string> notes;
};

/// R-tail probability (power law for opens, Laplace lower tail for covers)
/// and Q-tail probability, reported separately.
EventProbability event_probability(const Anomaly& anomaly, const TailFits& fits);

/// min(1, p1 * p2 * window).
double joint_probability(double p1, double p2, std::size_t window);

/// Mean years between events of daily probability p. Throws std::domain_error for p <= 0.
double waiting_time_years(double p, int trading_days_per_year = 250);
Rational waiting_time_years(const Rational& p, int trading_days_per_year = 250);

/// ΔS(open) * (adjusted close at open - adjusted close at cover).
Cents estimate_profit(const RaidCandidate& candidate, const MarketSeries& series);

/// max(0, |ΔS(cover)| - V(cover)).
std::int64_t off_market_residual(const RaidCandidate& candidate, const MarketSeries& series);

/// Classifies the open date against the nearest ex-dividend date within
/// `lookahead` trading days on either side: on or after it is Excluded,
/// before it is Possible. Equidistant ex-dates resolve to the later one.
DividendScreen dividend_arbitrage_screen(Date open_date, const std::set<Date>& ex_dividend_dates,
                                         std::span<const Date> trading_days,
                                         std::size_t lookahead = 5);

struct LagCheckOptions {
  std::size_t max_lag = 10;
  /// Minimum suppression score for a conclusive result.
  double score_floor = 0.5;
};

struct LagReport {
  bool conclusive = false;
  std::size_t lag = 0;
  double score = 0.0;
  /// Score per candidate lag 0..max_lag; nullopt where the shifted window leaves the data.
  std::vector<std::optional<double>> scores;
};

/// Estimates the reporting delay of borrowing data from a short-sale ban.
/// For each lag k the ban window is shifted k trading days later and scored
/// by 1 - (share of positive ΔS inside) / (share of positive ΔS outside);
/// the best-scoring (smallest on ties) k is returned. Throws InputError when
/// the window is not inside the data.
LagReport reporting_lag_check(std::span<const ShortRecord> records, Date ban_start, Date ban_end,
                              const LagCheckOptions& options = {});

struct TailFitReport {
  TailFits fits;
  EcdfPoints r_upper;
  EcdfPoints r_lower;
  EcdfPoints q_upper;
  std::size_t included = 0;
  std::size_t excluded = 0;
  std::vector<Date> excluded_dates;
  /// Error text per failed fit, keyed "r_positive", "r_negative", "q".
  std::vector<std::pair<std::string, std::string>> failures;
};

/// Fits the R positive tail (power law), the R distribution (Laplace) and the
/// Q tail (power law) over scannable days, minus the configured exclusions.
TailFitReport fit_tails(std::span<const DayMetrics> metrics, const DetectorConfig& config);

struct DetectionResult {
  std::vector<DayMetrics> metrics;
  TailFitReport fit_report;
  std::vector<Anomaly> anomalies;
  std::vector<RaidCandidate> candidates;
};

/// Full scan: metrics, fits, anomalies with probabilities, candidates with
/// joint probability, profit, off-market residual and screens.
DetectionResult detect(const MarketSeries& series, const DetectorConfig& config);

std::string to_string(AnomalyKind kind);
std::string to_string(DividendScreen screen);

}  // namespace bearraid
