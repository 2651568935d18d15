#include "bearraid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "bearraid/error.hpp"

namespace bearraid {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double laplace_inverse(const LaplaceDistribution& d, double u) {
  return u < 0.5 ? d.beta + d.gamma * std::log(2.0 * u) : d.beta - d.gamma * std::log(2.0 * (1.0 - u));
}

double laplace_cdf_value(const LaplaceDistribution& d, double x) {
  return x < d.beta ? 0.5 * std::exp((x - d.beta) / d.gamma) : 1.0 - 0.5 * std::exp(-(x - d.beta) / d.gamma);
}

void check_laplace(const LaplaceDistribution& d) {
  if (!(d.gamma > 0.0) || !std::isfinite(d.beta) || !std::isfinite(d.gamma)) {
    throw InputError("Laplace scale must be positive and parameters finite");
  }
}

std::int64_t trailing_sum(const std::vector<MarketDay>& days, std::size_t t, std::size_t window) {
  std::int64_t sum = 0;
  for (std::size_t k = t - window; k < t; ++k) sum += days[k].volume;
  return sum;
}

Price scale_price(Price p, double factor) {
  return Price::from_units(static_cast<std::int64_t>(std::llround(static_cast<double>(p.units) * factor)));
}

/// Re-accumulates S from the deltas, flooring at zero.
void reaccumulate(std::vector<MarketDay>& days, std::size_t from) {
  for (std::size_t t = std::max<std::size_t>(from, 1); t < days.size(); ++t) {
    std::int64_t next = days[t - 1].short_interest + days[t].delta_short.value_or(0);
    if (next < 0) next = 0;
    days[t].short_interest = next;
    days[t].delta_short = next - days[t - 1].short_interest;
  }
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t label) {
  return Rng(splitmix64(seed ^ splitmix64(label)));
}

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> sample_tail(const TailDistribution& distribution, std::size_t n,
                                std::uint64_t seed) {
  if (n < 1) throw InputError("sample count must be at least 1");
  Rng rng(seed);
  std::vector<double> out(n);
  if (const auto* p = std::get_if<PowerLawTail>(&distribution)) {
    if (!(p->alpha < 0.0) || !(p->x_min > 0.0) || !(p->c > 0.0)) {
      throw InputError("power law needs alpha < 0, x_min > 0 and c > 0");
    }
    for (auto& x : out) x = p->x_min * std::pow(rng.uniform(), 1.0 / p->alpha);
  } else {
    const auto& l = std::get<LaplaceDistribution>(distribution);
    check_laplace(l);
    for (auto& x : out) x = laplace_inverse(l, rng.uniform());
  }
  return out;
}

SplicedDistribution::SplicedDistribution(LaplaceDistribution body, double tail_c, double tail_alpha)
    : body_(body), c_(tail_c), alpha_(tail_alpha) {
  check_laplace(body_);
  if (!(c_ > 0.0) || !(alpha_ < 0.0)) throw InputError("power-law tail needs c > 0 and alpha < 0");

  // Log ratio of body density (with its mass weight) to tail density.
  auto log_ratio = [&](double x) {
    double tail = c_ * std::pow(x, alpha_);
    if (!(tail < 1.0)) return -std::numeric_limits<double>::infinity();
    double weight = (1.0 - tail) / laplace_cdf_value(body_, x);
    double log_body = std::log(weight) - std::log(2.0 * body_.gamma) - std::abs(x - body_.beta) / body_.gamma;
    double log_tail = std::log(c_ * -alpha_) + (alpha_ - 1.0) * std::log(x);
    return log_body - log_tail;
  };

  const double origin = std::max(body_.beta, 0.0);
  const double step = body_.gamma * 0.05;
  const std::size_t steps = 20000;
  std::optional<double> above;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (std::size_t k = 1; k <= steps; ++k) {
    double x = origin + step * static_cast<double>(k);
    double v = log_ratio(x);
    if (v > 0.0) {
      above = x;
    } else if (above) {
      lo = *above;
      hi = x;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) throw InputError("Laplace body and power-law tail densities never meet");
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (log_ratio(mid) > 0.0 ? lo : hi) = mid;
  }
  splice_ = 0.5 * (lo + hi);
  tail_mass_ = c_ * std::pow(splice_, alpha_);
  body_weight_ = (1.0 - tail_mass_) / laplace_cdf_value(body_, splice_);
}

double SplicedDistribution::cdf(double r) const {
  if (r < splice_) return body_weight_ * laplace_cdf_value(body_, r);
  return 1.0 - c_ * std::pow(r, alpha_);
}

double SplicedDistribution::inverse_cdf(double u) const {
  if (u < 1.0 - tail_mass_) return laplace_inverse(body_, u / body_weight_);
  return std::pow((1.0 - u) / c_, 1.0 / alpha_);
}

void BackgroundSpec::validate() const {
  if (n_days < 64) throw InputError("n_days must be at least 64");
  if (mean_volume <= 0) throw InputError("mean_volume must be positive");
  if (!(volume_tail_alpha < -1.0)) throw InputError("volume_tail_alpha must be below -1 for a finite mean");
  check_laplace(r_laplace);
  if (base_short_interest <= 0) throw InputError("base_short_interest must be positive");
  if (price_start.units <= 0) throw InputError("price_start must be positive");
  if (!(daily_volatility >= 0.0) || daily_volatility >= 1.0) {
    throw InputError("daily_volatility must lie in [0, 1)");
  }
}

MarketSeries generate_background(const BackgroundSpec& spec) {
  spec.validate();
  SplicedDistribution r_dist(spec.r_laplace, spec.r_tail_c, spec.r_tail_alpha);
  const double q_floor = (-spec.volume_tail_alpha - 1.0) / -spec.volume_tail_alpha;

  Rng volume_rng = Rng::stream(spec.seed, 1);
  Rng ratio_rng = Rng::stream(spec.seed, 2);
  Rng price_rng = Rng::stream(spec.seed, 3);

  std::vector<MarketDay> days(spec.n_days);
  Date date = spec.start_date;
  if (date.weekday() == std::chrono::Saturday || date.weekday() == std::chrono::Sunday) {
    date = next_weekday(date);
  }
  double close = static_cast<double>(spec.price_start.units);
  for (std::size_t t = 0; t < spec.n_days; ++t) {
    MarketDay& d = days[t];
    d.date = date;
    date = next_weekday(date);

    // i.i.d. around a fixed level; scaling by the trailing mean instead
    // would make the level a multiplicative random walk that drifts off.
    double q = q_floor * std::pow(volume_rng.uniform(), 1.0 / spec.volume_tail_alpha);
    d.volume = std::max<std::int64_t>(1, std::llround(q * static_cast<double>(spec.mean_volume)));

    double r = r_dist.inverse_cdf(ratio_rng.uniform());
    if (t == 0) {
      d.short_interest = spec.base_short_interest;
    } else {
      std::int64_t next = days[t - 1].short_interest + std::llround(r * static_cast<double>(d.volume));
      d.short_interest = std::max<std::int64_t>(0, next);
      d.delta_short = d.short_interest - days[t - 1].short_interest;
    }
    d.delta_source = DeltaSource::Differenced;

    double z = price_rng.normal();
    double up = std::abs(price_rng.normal());
    double down = std::abs(price_rng.normal());
    if (t > 0) close *= std::exp(spec.daily_volatility * z);
    d.close = Price::from_units(std::max<std::int64_t>(1, std::llround(close)));
    d.high = std::max(d.close, Price::from_units(std::llround(close * (1.0 + spec.daily_volatility * up))));
    d.low = std::min(d.close, Price::from_units(std::llround(close * std::max(0.0, 1.0 - spec.daily_volatility * down))));
  }
  return MarketSeries(spec.ticker, std::move(days));
}

std::pair<MarketSeries, PlantedRaid> inject_raid(const MarketSeries& series, const RaidSpec& raid,
                                                 std::size_t warmup) {
  if (raid.open_day < warmup) throw InputError("raid open day overlaps the warm-up window");
  if (raid.separation < 1) throw InputError("raid separation must be at least one day");
  if (raid.open_day + raid.separation >= series.size()) throw InputError("raid runs past the end of the series");
  if (!(raid.open_q > 0.0) || !(raid.cover_q > 0.0)) throw InputError("raid volume ratios must be positive");
  if (!(raid.price_drop_pct >= 0.0 && raid.price_drop_pct < 1.0)) {
    throw InputError("raid price drop must lie in [0, 1)");
  }

  std::vector<MarketDay> days = series.days();
  const std::size_t t0 = raid.open_day;
  const std::size_t tc = t0 + raid.separation;

  days[t0].volume = std::max<std::int64_t>(
      1, std::llround(raid.open_q * static_cast<double>(trailing_sum(days, t0, warmup)) / static_cast<double>(warmup)));
  const std::int64_t open_delta = std::llround(raid.open_r * static_cast<double>(days[t0].volume));
  days[t0].delta_short = open_delta;
  const std::int64_t s_pre = days[t0 - 1].short_interest;

  const Price target = Price::from_units(std::llround(static_cast<double>(days[t0 - 1].close.units) *
                                                      (1.0 - raid.price_drop_pct)));
  const double factor = days[t0].close.units > 0
                            ? static_cast<double>(target.units) / static_cast<double>(days[t0].close.units)
                            : 1.0;
  for (std::size_t t = t0; t < days.size(); ++t) {
    days[t].close = t == t0 ? target : scale_price(days[t].close, factor);
    days[t].high = std::max(scale_price(days[t].high, factor), days[t].close);
    days[t].low = std::min(scale_price(days[t].low, factor), days[t].close);
  }
  reaccumulate(days, t0);

  days[tc].volume = std::max<std::int64_t>(
      1, std::llround(raid.cover_q * static_cast<double>(trailing_sum(days, tc, warmup)) / static_cast<double>(warmup)));
  days[tc].delta_short = raid.restore_baseline
                             ? s_pre - days[tc - 1].short_interest
                             : -std::llround(raid.cover_fraction * static_cast<double>(open_delta));
  reaccumulate(days, tc);

  PlantedRaid truth;
  truth.open_index = t0;
  truth.cover_index = tc;
  truth.open_date = days[t0].date;
  truth.cover_date = days[tc].date;
  truth.open_delta = *days[t0].delta_short;
  truth.cover_delta = *days[tc].delta_short;
  truth.open_volume = days[t0].volume;
  truth.cover_volume = days[tc].volume;
  truth.restore_baseline = raid.restore_baseline;
  return {MarketSeries(series.ticker(), std::move(days)), truth};
}

SynthOutput synthesize(const SynthSpec& spec) {
  SynthOutput out{generate_background(spec.background), {}};
  for (const auto& raid : spec.raids) {
    auto [next, truth] = inject_raid(out.series, raid);
    out.series = std::move(next);
    out.truth.push_back(truth);
  }
  return out;
}

}  // namespace bearraid
