#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bearraid/date.hpp"
#include "bearraid/money.hpp"

namespace bearraid {

/// One day of price and volume data. A nonzero dividend marks an ex-dividend date.
struct PriceBar {
  Date date;
  Price high;
  Price low;
  Price close;
  std::int64_t volume = 0;
  Price dividend;

  friend bool operator==(const PriceBar&, const PriceBar&) = default;
};

enum class DeltaSource { Reported, Differenced };

/// One day of securities-lending data: total borrowed shares S(t) and its change.
struct ShortRecord {
  Date date;
  std::int64_t total_short_interest = 0;
  std::optional<std::int64_t> reported_delta;
  DeltaSource delta_source = DeltaSource::Differenced;
  /// reported_delta - (S(t) - S(t-1)) when both are known, else zero.
  std::int64_t reconciliation_gap = 0;
  /// Effective ΔS(t) after reconcile_deltas(); nullopt for an undefined first difference.
  std::optional<std::int64_t> delta;

  friend bool operator==(const ShortRecord&, const ShortRecord&) = default;
};

/// Merged price and lending record for one trading day.
struct MarketDay {
  Date date;
  Price high;
  Price low;
  Price close;
  std::int64_t volume = 0;
  Price dividend;
  std::int64_t short_interest = 0;
  std::optional<std::int64_t> delta_short;
  DeltaSource delta_source = DeltaSource::Differenced;
  std::int64_t reconciliation_gap = 0;

  bool is_ex_dividend() const { return dividend.units != 0; }

  friend bool operator==(const MarketDay&, const MarketDay&) = default;
};

/// Immutable, date-ordered daily series for one ticker with dividend
/// back-adjusted closes.
class MarketSeries {
 public:
  MarketSeries() = default;

  /// Validates strictly increasing dates and computes adjusted closes by
  /// subtracting each dividend from every close strictly before its ex-date.
  MarketSeries(std::string ticker, std::vector<MarketDay> days);

  const std::string& ticker() const { return ticker_; }
  const std::vector<MarketDay>& days() const { return days_; }
  const std::vector<Price>& adjusted_close() const { return adjusted_close_; }
  const MarketDay& operator[](std::size_t i) const { return days_[i]; }
  std::size_t size() const { return days_.size(); }
  bool empty() const { return days_.empty(); }

  /// Cumulative dividend subtracted from day i's raw prices.
  Price adjustment(std::size_t i) const { return days_[i].close - adjusted_close_[i]; }

  /// Index of `date`, if it is a trading day of this series.
  std::optional<std::size_t> index_of(Date date) const;

  friend bool operator==(const MarketSeries&, const MarketSeries&) = default;

 private:
  std::string ticker_;
  std::vector<MarketDay> days_;
  std::vector<Price> adjusted_close_;
};

/// Bookkeeping from merging the price and lending inputs.
struct AlignmentReport {
  std::size_t price_rows = 0;
  std::size_t short_rows = 0;
  std::size_t aligned_days = 0;
  std::size_t dropped_price_only = 0;
  std::size_t dropped_short_only = 0;
  /// Dividends that fell on dropped price-only days and so are absent from the series.
  std::size_t dropped_dividends = 0;
  std::size_t reported_deltas = 0;
  std::size_t differenced_deltas = 0;
  std::int64_t reconciliation_gap_total = 0;
  std::int64_t reconciliation_gap_abs_total = 0;

  friend bool operator==(const AlignmentReport&, const AlignmentReport&) = default;
};

struct BuildResult {
  MarketSeries series;
  AlignmentReport report;
};

inline constexpr std::string_view kPriceCsvHeader = "date,high,low,close,volume,dividend";
inline constexpr std::string_view kShortCsvHeader = "date,total_short_interest,delta_short_interest";

/// Parses the price CSV. Throws RowError (with the file line) on malformed
/// rows, high < low, close outside [low, high], negative values or a repeated date.
std::vector<PriceBar> parse_price_csv(std::string_view text);

/// Parses the short-interest CSV; the delta column may be absent or empty.
std::vector<ShortRecord> parse_short_csv(std::string_view text);

/// Fills in ΔS for every record. Records without a reported delta are
/// differenced against the previous record; reported deltas are kept and
/// their disagreement with the difference is stored as the reconciliation gap.
std::vector<ShortRecord> reconcile_deltas(std::vector<ShortRecord> records);

/// Merges price and lending data over their common dates. Short deltas are
/// reconciled on the full lending input before days are dropped.
BuildResult build_series(std::span<const PriceBar> bars, std::span<const ShortRecord> shorts,
                         std::string ticker);

/// Serializes back to the ingestion schemas. Only reported deltas are written.
std::string write_price_csv(const MarketSeries& series);
std::string write_short_csv(const MarketSeries& series);

/// Lending records of a series, reconciled, for the reporting-lag screen.
std::vector<ShortRecord> short_records(const MarketSeries& series);

}  // namespace bearraid
