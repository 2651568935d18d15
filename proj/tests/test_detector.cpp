#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bearraid/detector.hpp"
#include "bearraid/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace bearraid {
namespace {

using testing::CitiFixture;

std::vector<Anomaly> citi_anomalies(const MarketSeries& s, const DetectorConfig& cfg = {}) {
  return scan_anomalies(compute_metrics(s, cfg.metrics), cfg);
}

TEST(ScanAnomalies, CitiFixture) {
  auto fx = testing::make_citi_fixture();
  auto a = citi_anomalies(fx.series);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].kind, AnomalyKind::OpenSpike);
  EXPECT_EQ(a[0].index, CitiFixture::kOpen);
  EXPECT_EQ(a[0].date, (Date{2007, 11, 1}));
  EXPECT_NEAR(a[0].r, 0.760, 0.01);
  EXPECT_EQ(a[1].kind, AnomalyKind::CoverSpike);
  EXPECT_EQ(a[1].index, CitiFixture::kCover);
  EXPECT_NEAR(a[1].r, -1.67, 0.01);
}

TEST(ScanAnomalies, QuiescentSeriesIsEmpty) {
  std::vector<MarketDay> days(200);
  Date d{2009, 1, 2};
  for (std::size_t t = 0; t < days.size(); ++t) {
    days[t].date = d;
    d = next_weekday(d);
    days[t].close = days[t].high = days[t].low = Price::from_cents(1000);
    days[t].volume = 10'000'000;
    days[t].short_interest = 50'000'000 + static_cast<std::int64_t>(t % 2) * 50'000;
    if (t > 0) days[t].delta_short = days[t].short_interest - days[t - 1].short_interest;
  }
  MarketSeries s("Q", days);
  auto m = compute_metrics(s);
  for (std::size_t t = 63; t < m.size(); ++t) ASSERT_LT(std::abs(*m[t].r), 0.01);
  EXPECT_TRUE(scan_anomalies(m, {}).empty());
}

TEST(ScanAnomalies, WarmupNeverFlagged) {
  auto fx = testing::make_citi_fixture();
  std::vector<MarketDay> days = fx.series.days();
  days[30].delta_short = 10 * days[30].volume;  // huge R inside warm-up
  auto a = citi_anomalies(MarketSeries("C", days));
  for (const auto& x : a) EXPECT_GE(x.index, 63u);
}

TEST(PairCandidates, CitiBaselineGap) {
  auto fx = testing::make_citi_fixture();
  auto c = pair_candidates(citi_anomalies(fx.series), fx.series, {});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].separation, 6u);
  EXPECT_EQ(c[0].baseline_gap_shares, 2'000'000);
  EXPECT_NEAR(c[0].baseline_gap, 2.0 / 115.0, 1e-12);
  EXPECT_NEAR(c[0].baseline_gap, 0.017, 0.001);
}

// Two-spike synthetic days: index 0..69 flat, open at 70, and covers as given.
struct Spike {
  std::size_t t;
  std::int64_t delta;
  std::int64_t volume = 30'000'000;
};

MarketSeries spiky(std::vector<Spike> covers) {
  std::vector<MarketDay> days(100);
  Date d{2009, 1, 2};
  for (std::size_t t = 0; t < days.size(); ++t) {
    days[t].date = d;
    d = next_weekday(d);
    days[t].close = days[t].high = days[t].low = Price::from_cents(1000);
    days[t].volume = 10'000'000;
  }
  std::vector<std::int64_t> delta(days.size(), 0);
  delta[70] = 40'000'000;
  days[70].volume = 50'000'000;
  for (const auto& c : covers) {
    delta[c.t] = c.delta;
    days[c.t].volume = c.volume;
  }
  std::int64_t s = 100'000'000;
  for (std::size_t t = 0; t < days.size(); ++t) {
    if (t > 0) {
      s += delta[t];
      days[t].delta_short = delta[t];
    }
    days[t].short_interest = s;
  }
  return MarketSeries("S", days);
}

TEST(PairCandidates, NoCoverNoCandidate) {
  auto s = spiky({});
  auto a = citi_anomalies(s);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_TRUE(pair_candidates(a, s, {}).empty());
}

TEST(PairCandidates, ExactRestorerChosen) {
  // The first cover leaves S 5% high, the second brings it back to exactly 100M.
  auto s = spiky({{73, -35'000'000}, {76, -5'000'000, 4'000'000}});
  auto a = citi_anomalies(s);
  auto c = pair_candidates(a, s, {});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].cover.index, 76u);
  EXPECT_EQ(c[0].baseline_gap_shares, 0);
}

TEST(PairCandidates, CoverOutsideWindowIgnored) {
  auto s = spiky({{81, -40'000'000}});
  DetectorConfig cfg;
  EXPECT_TRUE(pair_candidates(citi_anomalies(s), s, cfg).empty());
  cfg.pairing_window = 11;
  EXPECT_EQ(pair_candidates(citi_anomalies(s), s, cfg).size(), 1u);
}

TEST(PairCandidates, GapBeyondToleranceRejected) {
  auto s = spiky({{74, -28'000'000}});  // leaves S 12% above baseline
  EXPECT_TRUE(pair_candidates(citi_anomalies(s), s, {}).empty());
}

TEST(PairCandidates, RejectsUnorderedInput) {
  auto fx = testing::make_citi_fixture();
  auto a = citi_anomalies(fx.series);
  std::swap(a[0], a[1]);
  EXPECT_THROW(pair_candidates(a, fx.series, {}), std::invalid_argument);
}

TEST(PairCandidates, MatchesBruteForceOracle) {
  std::size_t total = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    std::size_t n = 100 + seed % 401;
    auto s = testing::random_pairing_series(seed, n);
    DetectorConfig cfg;
    auto m = compute_metrics(s);
    auto got = pair_candidates(scan_anomalies(m, cfg), s, cfg);
    auto want = testing::brute_force_pairs(s, m, cfg);
    ASSERT_EQ(got.size(), want.size()) << "seed " << seed;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].open.index, want[i].open) << seed;
      EXPECT_EQ(got[i].cover.index, want[i].cover) << seed;
      EXPECT_EQ(got[i].baseline_gap_shares, want[i].gap) << seed;
    }
    total += got.size();
  }
  EXPECT_GT(total, 200u);  // the corpus really exercises pairing
}

TEST(PairCandidates, CandidateInvariants) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto s = testing::random_pairing_series(seed, 400);
    DetectorConfig cfg;
    auto c = pair_candidates(citi_anomalies(s, cfg), s, cfg);
    std::set<std::size_t> covers;
    for (const auto& x : c) {
      EXPECT_GT(x.cover.date, x.open.date);
      EXPECT_LE(x.separation, cfg.pairing_window);
      EXPECT_LE(x.baseline_gap, cfg.baseline_tolerance);
      EXPECT_TRUE(covers.insert(x.cover.index).second);
    }
  }
}

TEST(EventProbability, Examples) {
  TailFits fits;
  fits.r_positive = PowerLawFit{-1.35, 1.4e-5, 0.1};
  LaplaceFit lap;
  lap.beta = 0.11;
  lap.gamma = 0.048;
  fits.r_negative = lap;
  fits.q = PowerLawFit{-3.34, 1.0, 1.5};

  Anomaly open;
  open.kind = AnomalyKind::OpenSpike;
  open.r = 0.77;
  open.q = 3.7;
  auto p = event_probability(open, fits);
  EXPECT_NEAR(*p.p_r, 2e-5, 0.05e-5);
  EXPECT_DOUBLE_EQ(*p.p_q, std::pow(3.7, -3.34));

  Anomaly cover;
  cover.kind = AnomalyKind::CoverSpike;
  cover.r = -0.785;
  cover.q = 2.6;
  fits.laplace_form = LaplaceForm::Caption;
  EXPECT_NEAR(*event_probability(cover, fits).p_r, 8e-9, 0.5e-9);
  fits.laplace_form = LaplaceForm::Normalized;
  EXPECT_NEAR(*event_probability(cover, fits).p_r, 4e-9, 0.25e-9);

  Anomaly low = open;
  low.r = 0.05;
  auto none = event_probability(low, fits);
  EXPECT_FALSE(none.p_r);
  ASSERT_FALSE(none.notes.empty());
  EXPECT_NE(none.notes[0].find("x_min"), std::string::npos);
}

TEST(JointProbability, Examples) {
  EXPECT_NEAR(joint_probability(2e-5, 8e-9, 6), 9.6e-13, 1e-26);
  EXPECT_EQ(joint_probability(1, 1, 6), 1.0);
  EXPECT_LT(joint_probability(0.3, 1e-300, 6), 1e-299);
}

TEST(JointProbability, Properties) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double a = u(rng), b = u(rng), bump = u(rng);
    std::size_t w = 1 + rng() % 20;
    EXPECT_EQ(joint_probability(a, b, w), joint_probability(b, a, w));
    EXPECT_LE(joint_probability(a, b, w), joint_probability(std::min(1.0, a + bump), b, w));
    if (a * b * static_cast<double>(w) <= std::min(a, b)) {
      EXPECT_LE(joint_probability(a, b, w), std::min(a, b));
    }
    double p = joint_probability(a, b, w);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(WaitingTime, ExactValues) {
  EXPECT_EQ(waiting_time_years(Rational::scientific(2, -5)), Rational(200));
  EXPECT_EQ(waiting_time_years(Rational::scientific(8, -9)), Rational(500'000));
  EXPECT_EQ(waiting_time_years(Rational::scientific(1, -12)), Rational(4'000'000'000));
  EXPECT_DOUBLE_EQ(waiting_time_years(2e-5), 200.0);
  EXPECT_THROW(waiting_time_years(0.0), std::domain_error);
  EXPECT_THROW(waiting_time_years(Rational(0)), std::domain_error);
}

TEST(WaitingTime, ReciprocalIdentityIsExact) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    Rational p(1 + static_cast<std::int64_t>(rng() % 1'000'000), 1'000'000'000);
    int days = 200 + static_cast<int>(rng() % 100);
    EXPECT_EQ(waiting_time_years(p, days) * p * Rational(days), Rational(1));
  }
}

RaidCandidate citi_candidate(const MarketSeries& s) {
  return pair_candidates(citi_anomalies(s), s, {}).at(0);
}

TEST(Profit, CitiExample) {
  auto fx = testing::make_citi_fixture();
  Cents p = estimate_profit(citi_candidate(fx.series), fx.series);
  EXPECT_EQ(p.to_dollar_string(), "626600000.00");
  EXPECT_LT(std::abs(p.dollars() - 640e6) / 640e6, 0.05);
}

TEST(Profit, SignAndAntisymmetry) {
  auto fx = testing::make_citi_fixture();
  auto cand = citi_candidate(fx.series);
  std::vector<MarketDay> days = fx.series.days();
  std::swap(days[cand.open.index].close, days[cand.cover.index].close);
  for (auto* d : {&days[cand.open.index], &days[cand.cover.index]}) {
    d->high = std::max(d->high, d->close);
    d->low = std::min(d->low, d->close);
  }
  MarketSeries swapped("C", days);
  Cents a = estimate_profit(cand, fx.series);
  Cents b = estimate_profit(cand, swapped);
  EXPECT_EQ(a.value, -b.value);
  EXPECT_LT(b.value, 0);

  days[cand.cover.index].close = days[cand.open.index].close;
  days[cand.cover.index].high = std::max(days[cand.cover.index].high, days[cand.cover.index].close);
  EXPECT_EQ(estimate_profit(cand, MarketSeries("C", days)).value, 0);
}

TEST(OffMarketResidual, Examples) {
  auto fx = testing::make_citi_fixture();
  auto cand = citi_candidate(fx.series);
  EXPECT_EQ(off_market_residual(cand, fx.series), 81'000'000);
  std::vector<MarketDay> days = fx.series.days();
  days[cand.cover.index].volume = 202'000'000;
  EXPECT_EQ(off_market_residual(cand, MarketSeries("C", days)), 0);
  days[cand.cover.index].volume = 300'000'000;
  EXPECT_EQ(off_market_residual(cand, MarketSeries("C", days)), 0);
}

std::vector<Date> weekdays(Date from, std::size_t n) {
  std::vector<Date> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(from);
    from = next_weekday(from);
  }
  return out;
}

TEST(DividendScreen, Cases) {
  auto days = weekdays({2007, 10, 1}, 60);
  Date open = days[20];
  EXPECT_EQ(dividend_arbitrage_screen(open, {open}, days), DividendScreen::Excluded);
  EXPECT_EQ(dividend_arbitrage_screen(days[19], {open}, days), DividendScreen::Possible);
  EXPECT_EQ(dividend_arbitrage_screen(open, {}, days), DividendScreen::NoDividendNearby);
  EXPECT_EQ(dividend_arbitrage_screen(open, {days[26]}, days), DividendScreen::NoDividendNearby);
  EXPECT_EQ(dividend_arbitrage_screen(open, {days[25]}, days), DividendScreen::Possible);
  EXPECT_EQ(dividend_arbitrage_screen(open, {days[17]}, days), DividendScreen::Excluded);
  // Nearest wins; equidistant resolves to the later ex-date.
  EXPECT_EQ(dividend_arbitrage_screen(open, {days[18], days[23]}, days), DividendScreen::Excluded);
  EXPECT_EQ(dividend_arbitrage_screen(open, {days[18], days[22]}, days), DividendScreen::Possible);
  EXPECT_EQ(dividend_arbitrage_screen(open, {days[18], days[21]}, days), DividendScreen::Possible);
}

TEST(DividendScreen, CitiFixtureExcluded) {
  auto fx = testing::make_citi_fixture();
  auto r = detect(fx.series, {});
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].screens.dividend, DividendScreen::Excluded);
  EXPECT_TRUE(r.candidates[0].screens.off_market);
  EXPECT_FALSE(r.candidates[0].screens.alt_uptick_open);
}

TEST(ReportingLag, RecoversShift) {
  for (std::size_t k : {0u, 1u, 2u, 3u}) {
    auto recs = testing::ban_records(k + 100, 160, 60, 79, k);
    auto rep = reporting_lag_check(recs, recs[60].date, recs[79].date);
    EXPECT_TRUE(rep.conclusive) << k;
    EXPECT_EQ(rep.lag, k);
    EXPECT_DOUBLE_EQ(rep.score, 1.0);
  }
}

TEST(ReportingLag, NoSuppressionInconclusive) {
  auto recs = testing::ban_records(7, 160, 60, 79, 50);  // suppression far outside the lag range
  std::vector<ShortRecord> clean(recs.begin(), recs.begin() + 100);
  auto rep = reporting_lag_check(clean, clean[40].date, clean[55].date);
  EXPECT_FALSE(rep.conclusive);
  EXPECT_LT(rep.score, 0.5);
}

TEST(ReportingLag, WindowOutsideDataFails) {
  auto recs = testing::ban_records(1, 50, 10, 20, 0);
  EXPECT_THROW(reporting_lag_check(recs, Date{2000, 1, 3}, recs[5].date), InputError);
  EXPECT_THROW(reporting_lag_check(recs, recs[20].date, recs[10].date), InputError);
}

TEST(Detect, DeterministicCandidates) {
  for (std::uint64_t seed : {3u, 9u}) {
    auto s = testing::random_pairing_series(seed, 300);
    EXPECT_EQ(detect(s, {}).candidates, detect(s, {}).candidates);
  }
}

TEST(Detect, RaisingThresholdsNeverAddsAnomalies) {
  auto s = testing::random_pairing_series(12, 500);
  auto m = compute_metrics(s);
  std::size_t prev = SIZE_MAX;
  for (double r = 0.1; r < 3.0; r += 0.1) {
    DetectorConfig cfg;
    cfg.r_open_min = r;
    std::size_t n = scan_anomalies(m, cfg).size();
    EXPECT_LE(n, prev);
    prev = n;
  }
  prev = SIZE_MAX;
  for (double q = 0.5; q < 10.0; q += 0.5) {
    DetectorConfig cfg;
    cfg.q_min = q;
    std::size_t n = scan_anomalies(m, cfg).size();
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(DetectorConfig, Validation) {
  DetectorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.baseline_tolerance = 1.0;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.pairing_window = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.r_open_min = 0;
  EXPECT_THROW(c.validate(), InputError);
}

}  // namespace
}  // namespace bearraid
