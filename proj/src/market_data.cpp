#include "bearraid/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "bearraid/error.hpp"

namespace bearraid {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

/// Numbered non-blank lines of a text, with a leading UTF-8 BOM removed.
struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
    ++number;
    if (!trim(line).empty()) lines.push_back({number, trim(line)});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Date require_date(const Line& line, std::string_view field) {
  auto d = Date::parse(field);
  if (!d) throw RowError(line.number, "invalid date '" + std::string(field) + "'");
  return *d;
}

Price require_price(const Line& line, std::string_view field, const char* name) {
  auto p = Price::parse(field);
  if (!p) throw RowError(line.number, std::string("invalid ") + name + " '" + std::string(field) + "'");
  if (p->units < 0) throw RowError(line.number, std::string("negative ") + name);
  return *p;
}

std::int64_t require_count(const Line& line, std::string_view field, const char* name) {
  auto v = parse_int(field);
  if (!v) throw RowError(line.number, std::string("invalid ") + name + " '" + std::string(field) + "'");
  if (*v < 0) throw RowError(line.number, std::string("negative ") + name);
  return *v;
}

void check_header(const std::vector<Line>& lines, std::string_view expected,
                  std::string_view alternative = {}) {
  if (lines.empty()) throw InputError("missing header row, expected '" + std::string(expected) + "'");
  const Line& h = lines.front();
  if (h.text != expected && (alternative.empty() || h.text != alternative)) {
    throw RowError(h.number, "unexpected header '" + std::string(h.text) + "', expected '" +
                                 std::string(expected) + "'");
  }
}

}  // namespace

MarketSeries::MarketSeries(std::string ticker, std::vector<MarketDay> days)
    : ticker_(std::move(ticker)), days_(std::move(days)) {
  for (std::size_t i = 1; i < days_.size(); ++i) {
    if (!(days_[i - 1].date < days_[i].date)) {
      throw InputError("series dates not strictly increasing at " + days_[i].date.to_string());
    }
  }
  adjusted_close_.resize(days_.size());
  Price cumulative;
  for (std::size_t i = days_.size(); i-- > 0;) {
    adjusted_close_[i] = days_[i].close - cumulative;
    cumulative += days_[i].dividend;
  }
}

std::optional<std::size_t> MarketSeries::index_of(Date date) const {
  auto it = std::lower_bound(days_.begin(), days_.end(), date,
                             [](const MarketDay& d, Date x) { return d.date < x; });
  if (it == days_.end() || it->date != date) return std::nullopt;
  return static_cast<std::size_t>(it - days_.begin());
}

std::vector<PriceBar> parse_price_csv(std::string_view text) {
  auto lines = split_lines(text);
  check_header(lines, kPriceCsvHeader);
  std::vector<PriceBar> bars;
  bars.reserve(lines.size() - 1);
  std::set<Date> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    auto f = split_fields(line.text);
    if (f.size() != 6) {
      throw RowError(line.number, "expected 6 fields, found " + std::to_string(f.size()));
    }
    PriceBar bar;
    bar.date = require_date(line, f[0]);
    bar.high = require_price(line, f[1], "high");
    bar.low = require_price(line, f[2], "low");
    bar.close = require_price(line, f[3], "close");
    bar.volume = require_count(line, f[4], "volume");
    bar.dividend = f[5].empty() ? Price{} : require_price(line, f[5], "dividend");
    if (bar.high < bar.low) throw RowError(line.number, "high < low");
    if (bar.close < bar.low || bar.high < bar.close) {
      throw RowError(line.number, "close outside [low, high]");
    }
    if (!seen.insert(bar.date).second) {
      throw RowError(line.number, "duplicate date " + bar.date.to_string());
    }
    bars.push_back(bar);
  }
  return bars;
}

std::vector<ShortRecord> parse_short_csv(std::string_view text) {
  auto lines = split_lines(text);
  check_header(lines, kShortCsvHeader, "date,total_short_interest");
  std::vector<ShortRecord> records;
  records.reserve(lines.size() - 1);
  std::set<Date> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    auto f = split_fields(line.text);
    if (f.size() != 2 && f.size() != 3) {
      throw RowError(line.number, "expected 2 or 3 fields, found " + std::to_string(f.size()));
    }
    ShortRecord rec;
    rec.date = require_date(line, f[0]);
    rec.total_short_interest = require_count(line, f[1], "total_short_interest");
    if (f.size() == 3 && !f[2].empty()) {
      auto d = parse_int(f[2]);
      if (!d) throw RowError(line.number, "invalid delta_short_interest '" + std::string(f[2]) + "'");
      rec.reported_delta = *d;
      rec.delta_source = DeltaSource::Reported;
    }
    if (!seen.insert(rec.date).second) {
      throw RowError(line.number, "duplicate date " + rec.date.to_string());
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<ShortRecord> reconcile_deltas(std::vector<ShortRecord> records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    ShortRecord& r = records[i];
    std::optional<std::int64_t> diff;
    if (i > 0) diff = r.total_short_interest - records[i - 1].total_short_interest;
    if (r.reported_delta) {
      r.delta_source = DeltaSource::Reported;
      r.delta = r.reported_delta;
      r.reconciliation_gap = diff ? *r.reported_delta - *diff : 0;
    } else {
      r.delta_source = DeltaSource::Differenced;
      r.delta = diff;
      r.reconciliation_gap = 0;
    }
  }
  return records;
}

BuildResult build_series(std::span<const PriceBar> bars, std::span<const ShortRecord> shorts,
                         std::string ticker) {
  auto sorted = [](auto span) {
    for (std::size_t i = 1; i < span.size(); ++i) {
      if (!(span[i - 1].date < span[i].date)) return false;
    }
    return true;
  };
  if (!sorted(bars)) throw InputError("price rows are not in strictly increasing date order");
  if (!sorted(shorts)) throw InputError("short-interest rows are not in strictly increasing date order");

  auto reconciled = reconcile_deltas({shorts.begin(), shorts.end()});

  AlignmentReport report;
  report.price_rows = bars.size();
  report.short_rows = shorts.size();
  std::vector<MarketDay> days;
  std::size_t i = 0, j = 0;
  while (i < bars.size() || j < reconciled.size()) {
    if (j == reconciled.size() || (i < bars.size() && bars[i].date < reconciled[j].date)) {
      ++report.dropped_price_only;
      if (bars[i].dividend.units != 0) ++report.dropped_dividends;
      ++i;
    } else if (i == bars.size() || reconciled[j].date < bars[i].date) {
      ++report.dropped_short_only;
      ++j;
    } else {
      const PriceBar& b = bars[i];
      const ShortRecord& s = reconciled[j];
      days.push_back(MarketDay{b.date, b.high, b.low, b.close, b.volume, b.dividend,
                               s.total_short_interest, s.delta, s.delta_source,
                               s.reconciliation_gap});
      ++i;
      ++j;
    }
  }
  if (days.empty()) throw InputError("price and short-interest inputs share no dates");

  for (const auto& d : days) {
    if (d.delta_source == DeltaSource::Reported) {
      ++report.reported_deltas;
    } else if (d.delta_short) {
      ++report.differenced_deltas;
    }
    report.reconciliation_gap_total += d.reconciliation_gap;
    report.reconciliation_gap_abs_total += d.reconciliation_gap < 0 ? -d.reconciliation_gap : d.reconciliation_gap;
  }
  report.aligned_days = days.size();
  return {MarketSeries(std::move(ticker), std::move(days)), report};
}

std::string write_price_csv(const MarketSeries& series) {
  std::string out(kPriceCsvHeader);
  out += '\n';
  for (const auto& d : series.days()) {
    out += d.date.to_string();
    out += ',' + d.high.to_string();
    out += ',' + d.low.to_string();
    out += ',' + d.close.to_string();
    out += ',' + std::to_string(d.volume);
    out += ',' + d.dividend.to_string();
    out += '\n';
  }
  return out;
}

std::string write_short_csv(const MarketSeries& series) {
  std::string out(kShortCsvHeader);
  out += '\n';
  for (const auto& d : series.days()) {
    out += d.date.to_string();
    out += ',' + std::to_string(d.short_interest);
    out += ',';
    if (d.delta_source == DeltaSource::Reported && d.delta_short) out += std::to_string(*d.delta_short);
    out += '\n';
  }
  return out;
}

std::vector<ShortRecord> short_records(const MarketSeries& series) {
  std::vector<ShortRecord> out;
  out.reserve(series.size());
  for (const auto& d : series.days()) {
    ShortRecord r;
    r.date = d.date;
    r.total_short_interest = d.short_interest;
    if (d.delta_source == DeltaSource::Reported) r.reported_delta = d.delta_short;
    r.delta_source = d.delta_source;
    r.reconciliation_gap = d.reconciliation_gap;
    r.delta = d.delta_short;
    out.push_back(r);
  }
  return out;
}

}  // namespace bearraid
