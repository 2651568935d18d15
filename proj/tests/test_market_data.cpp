#include <gtest/gtest.h>

#include <random>

#include "bearraid/error.hpp"
#include "bearraid/market_data.hpp"
#include "fixtures.hpp"

namespace bearraid {
namespace {

const std::string kPriceHeader = std::string(kPriceCsvHeader) + "\n";
const std::string kShortHeader = std::string(kShortCsvHeader) + "\n";

TEST(Price, ParsesAndFormatsExactly) {
  EXPECT_EQ(Price::parse("42.31")->units, 423100);
  EXPECT_EQ(Price::parse("7")->units, 70000);
  EXPECT_EQ(Price::parse("-2.85")->units, -28500);
  EXPECT_EQ(Price::parse("0.00005")->units, 1);  // rounded half away from zero
  EXPECT_EQ(Price::parse("38.0835")->to_string(), "38.0835");
  EXPECT_EQ(Price::from_units(-28500).to_string(), "-2.85");
  EXPECT_EQ(Price::from_units(-5).to_string(), "-0.0005");
  EXPECT_FALSE(Price::parse(""));
  EXPECT_FALSE(Price::parse("1.2.3"));
  EXPECT_FALSE(Price::parse("abc"));
  EXPECT_FALSE(Price::parse("."));
}

TEST(Cents, SharesTimesPrice) {
  Cents profit = Cents::from_shares(130'000'000, Price::parse("4.82").value());
  EXPECT_EQ(profit.value, static_cast<int128>(62'660'000'000));
  EXPECT_EQ(profit.to_dollar_string(), "626600000.00");
  EXPECT_EQ(Cents::from_shares(-3, Price::parse("0.005").value()).to_dollar_string(), "-0.02");
}

TEST(Date, StrictIso) {
  EXPECT_EQ(Date::parse("2007-11-01"), (Date{2007, 11, 1}));
  EXPECT_FALSE(Date::parse("2007-02-30"));
  EXPECT_FALSE(Date::parse("2007-1-01"));
  EXPECT_FALSE(Date::parse("01/11/2007"));
  EXPECT_EQ((Date{2007, 11, 1}).to_string(), "2007-11-01");
  EXPECT_EQ(next_weekday(Date{2007, 11, 2}), (Date{2007, 11, 5}));
}

TEST(ParsePriceCsv, SingleRowWithDividend) {
  auto bars = parse_price_csv(kPriceHeader + "2007-11-01,42.31,38.51,38.51,171000000,0.54\n");
  ASSERT_EQ(bars.size(), 1u);
  EXPECT_EQ(bars[0].date, (Date{2007, 11, 1}));
  EXPECT_EQ(bars[0].volume, 171'000'000);
  EXPECT_EQ(bars[0].dividend, Price::parse("0.54").value());
  EXPECT_EQ(bars[0].low, bars[0].close);
}

TEST(ParsePriceCsv, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_price_csv(kPriceHeader).empty());
  EXPECT_TRUE(parse_price_csv(std::string(kPriceCsvHeader)).empty());
}

TEST(ParsePriceCsv, EmptyDividendMeansNone) {
  auto bars = parse_price_csv(kPriceHeader + "2007-11-01,10,9,9.5,100,\r\n");
  EXPECT_EQ(bars.at(0).dividend.units, 0);
}

TEST(ParsePriceCsv, LowAboveHighReportsLine) {
  try {
    parse_price_csv(kPriceHeader + "2007-10-31,10,9,9.5,100,0\n2007-11-01,9,10,9.5,100,0\n");
    FAIL() << "expected RowError";
  } catch (const RowError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("high < low"), std::string::npos);
  }
}

TEST(ParsePriceCsv, Errors) {
  EXPECT_THROW(parse_price_csv(kPriceHeader + "2007-11-01,10,9,9.5,-1,0\n"), RowError);
  EXPECT_THROW(parse_price_csv(kPriceHeader + "2007-11-01,10,9,9.5,100\n"), RowError);
  EXPECT_THROW(parse_price_csv(kPriceHeader + "2007-11-01,10,9,11,100,0\n"), RowError);
  EXPECT_THROW(parse_price_csv(kPriceHeader + "2007-11-01,10,9,9.5,1.5,0\n"), RowError);
  EXPECT_THROW(parse_price_csv(kPriceHeader + "2007-11-01,10,9,9.5,100,-0.1\n"), RowError);
  EXPECT_THROW(parse_price_csv(kPriceHeader + "2007-11-01,10,9,9.5,100,0\n2007-11-01,10,9,9.5,100,0\n"),
               RowError);
  EXPECT_THROW(parse_price_csv("date,open,high,low,close,volume\n"), RowError);
  EXPECT_THROW(parse_price_csv(""), InputError);
}

TEST(ParseShortCsv, ReportedAndMissingDelta) {
  auto recs = parse_short_csv(kShortHeader + "2007-11-01,245000000,130000000\n2007-11-02,245000000,\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].total_short_interest, 245'000'000);
  EXPECT_EQ(recs[0].reported_delta, 130'000'000);
  EXPECT_EQ(recs[0].delta_source, DeltaSource::Reported);
  EXPECT_FALSE(recs[1].reported_delta);
  EXPECT_EQ(recs[1].delta_source, DeltaSource::Differenced);
}

TEST(ParseShortCsv, TwoColumnFormAccepted) {
  auto recs = parse_short_csv("date,total_short_interest\n2007-11-01,5\n");
  EXPECT_EQ(recs.at(0).total_short_interest, 5);
}

TEST(ParseShortCsv, Errors) {
  EXPECT_THROW(parse_short_csv(kShortHeader + "2007-11-01,-5,\n"), RowError);
  EXPECT_THROW(parse_short_csv(kShortHeader + "2007-11-01,5,x\n"), RowError);
  EXPECT_THROW(parse_short_csv(kShortHeader + "2007-11-01,5,\n2007-11-01,6,\n"), RowError);
  EXPECT_THROW(parse_short_csv(kShortHeader + "2007-11-01\n"), RowError);
}

ShortRecord rec(Date d, std::int64_t s, std::optional<std::int64_t> reported = std::nullopt) {
  ShortRecord r;
  r.date = d;
  r.total_short_interest = s;
  r.reported_delta = reported;
  r.delta_source = reported ? DeltaSource::Reported : DeltaSource::Differenced;
  return r;
}

TEST(ReconcileDeltas, Differencing) {
  auto out = reconcile_deltas({rec({2007, 1, 2}, 100), rec({2007, 1, 3}, 110)});
  EXPECT_FALSE(out[0].delta);
  EXPECT_EQ(out[1].delta, 10);
  EXPECT_EQ(out[1].delta_source, DeltaSource::Differenced);
  EXPECT_EQ(out[1].reconciliation_gap, 0);
}

TEST(ReconcileDeltas, ReportedGapIsRecorded) {
  auto out = reconcile_deltas({rec({2007, 1, 2}, 100), rec({2007, 1, 3}, 110, 12)});
  EXPECT_EQ(out[1].delta, 12);
  EXPECT_EQ(out[1].reconciliation_gap, 12 - (110 - 100));
}

TEST(ReconcileDeltas, SingleRecordUndefined) {
  auto out = reconcile_deltas({rec({2007, 1, 2}, 100)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].delta);
}

TEST(ReconcileDeltas, DifferencedDeltasSumToNetChange) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ShortRecord> recs;
    Date d{2008, 1, 2};
    for (int i = 0; i < 200; ++i) {
      recs.push_back(rec(d, static_cast<std::int64_t>(rng() % 1'000'000'000)));
      d = next_weekday(d);
    }
    auto out = reconcile_deltas(recs);
    std::int64_t sum = 0;
    for (std::size_t i = 1; i < out.size(); ++i) sum += *out[i].delta;
    EXPECT_EQ(sum, out.back().total_short_interest - out.front().total_short_interest);
    EXPECT_EQ(reconcile_deltas(out), out);  // idempotent
  }
}

PriceBar bar(Date d, const char* close, const char* dividend = "0") {
  Price c = Price::parse(close).value();
  return PriceBar{d, c, c, c, 1000, Price::parse(dividend).value()};
}

TEST(BuildSeries, DividendBackAdjustment) {
  std::vector<PriceBar> bars{bar({2007, 10, 31}, "10.00"), bar({2007, 11, 1}, "9.46", "0.54")};
  std::vector<ShortRecord> shorts{rec({2007, 10, 31}, 1), rec({2007, 11, 1}, 2)};
  auto built = build_series(bars, shorts, "C");
  const auto& adj = built.series.adjusted_close();
  EXPECT_EQ(adj[0], Price::parse("9.46").value());
  EXPECT_EQ(adj[1], Price::parse("9.46").value());
  EXPECT_EQ((adj[1] - adj[0]).units, 0);
  EXPECT_EQ((built.series[1].close - built.series[0].close), Price::parse("-0.54").value());
}

TEST(BuildSeries, IntersectionAndReport) {
  Date d1{2007, 1, 2}, d2{2007, 1, 3}, d3{2007, 1, 4}, d4{2007, 1, 5};
  std::vector<PriceBar> bars{bar(d1, "1"), bar(d2, "1"), bar(d3, "1")};
  std::vector<ShortRecord> shorts{rec(d2, 5), rec(d3, 7), rec(d4, 9)};
  auto built = build_series(bars, shorts, "X");
  ASSERT_EQ(built.series.size(), 2u);
  EXPECT_EQ(built.series[0].date, d2);
  EXPECT_EQ(built.series[1].date, d3);
  EXPECT_EQ(built.report.dropped_price_only + built.report.dropped_short_only, 2u);
  EXPECT_EQ(built.report.dropped_price_only, 1u);
  EXPECT_EQ(built.report.dropped_short_only, 1u);
  EXPECT_EQ(built.series[1].delta_short, 2);
}

TEST(BuildSeries, DisjointDatesFail) {
  std::vector<PriceBar> bars{bar({2007, 1, 2}, "1")};
  std::vector<ShortRecord> shorts{rec({2007, 1, 3}, 5)};
  EXPECT_THROW(build_series(bars, shorts, "X"), InputError);
}

TEST(BuildSeries, UnsortedInputFails) {
  std::vector<PriceBar> bars{bar({2007, 1, 3}, "1"), bar({2007, 1, 2}, "1")};
  std::vector<ShortRecord> shorts{rec({2007, 1, 2}, 5)};
  EXPECT_THROW(build_series(bars, shorts, "X"), InputError);
}

// Property: adjusted changes equal raw changes except across ex-dates, where
// they equal raw change plus the dividend.
TEST(BuildSeries, AdjustedChangeProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<PriceBar> bars;
    std::vector<ShortRecord> shorts;
    Date d{2007, 1, 2};
    for (int i = 0; i < 120; ++i) {
      Price c = Price::from_units(200'000 + static_cast<std::int64_t>(rng() % 100'000));
      Price div = rng() % 15 == 0 ? Price::from_units(static_cast<std::int64_t>(rng() % 9000) + 1) : Price{};
      bars.push_back(PriceBar{d, c, c, c, 1, div});
      shorts.push_back(rec(d, 1));
      d = next_weekday(d);
    }
    auto s = build_series(bars, shorts, "P").series;
    const auto& adj = s.adjusted_close();
    for (std::size_t t = 1; t < s.size(); ++t) {
      Price raw = s[t].close - s[t - 1].close;
      EXPECT_EQ(adj[t] - adj[t - 1], raw + s[t].dividend);
    }
  }
}

TEST(Serialization, RoundTripThroughCsv) {
  auto fx = testing::make_citi_fixture();
  std::string prices = write_price_csv(fx.series);
  std::string shorts = write_short_csv(fx.series);
  auto again = build_series(parse_price_csv(prices), parse_short_csv(shorts), "C").series;
  EXPECT_EQ(again, fx.series);
  EXPECT_EQ(write_price_csv(again), prices);
}

TEST(Serialization, ParsingIsOrderPreserving) {
  std::string text = kPriceHeader + "2007-01-05,1,1,1,1,0\n2007-01-02,1,1,1,1,0\n";
  auto bars = parse_price_csv(text);
  EXPECT_EQ(bars[0].date, (Date{2007, 1, 5}));
  EXPECT_EQ(bars[1].date, (Date{2007, 1, 2}));
  EXPECT_EQ(parse_price_csv(text), bars);
}

}  // namespace
}  // namespace bearraid
