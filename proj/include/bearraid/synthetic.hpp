#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bearraid/market_data.hpp"

namespace bearraid {

/// Deterministic uniform and normal variates on top of std::mt19937_64, whose
/// output sequence is fixed by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from a seed and a stream label.
  static Rng stream(std::uint64_t seed, std::uint64_t label);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Conditional power law: P(X >= x) = (x / x_min)^alpha for x >= x_min.
/// `c` is the unconditional normalization, used only when splicing.
struct PowerLawTail {
  double c = 1.0;
  double alpha = -2.0;
  double x_min = 1.0;
};

struct LaplaceDistribution {
  double beta = 0.0;
  double gamma = 1.0;
};

using TailDistribution = std::variant<PowerLawTail, LaplaceDistribution>;

/// i.i.d. inverse-CDF samples. Throws InputError for invalid parameters.
std::vector<double> sample_tail(const TailDistribution& distribution, std::size_t n,
                                std::uint64_t seed);

/// Laplace body with an upper power-law tail P(R >= r) = c r^alpha, joined at
/// the point where the two densities meet so the mixture density is continuous.
class SplicedDistribution {
 public:
  /// Throws InputError when the densities never cross above the Laplace location.
  SplicedDistribution(LaplaceDistribution body, double tail_c, double tail_alpha);

  double splice_point() const { return splice_; }
  /// Probability mass carried by the power-law tail.
  double tail_mass() const { return tail_mass_; }
  double cdf(double r) const;
  double inverse_cdf(double u) const;

 private:
  LaplaceDistribution body_;
  double c_;
  double alpha_;
  double splice_ = 0.0;
  double tail_mass_ = 0.0;
  double body_weight_ = 1.0;
};

struct BackgroundSpec {
  std::size_t n_days = 504;
  std::int64_t mean_volume = 46'000'000;
  /// Tail exponent of Q; Q is Pareto with unit mean.
  double volume_tail_alpha = -3.34;
  LaplaceDistribution r_laplace{0.0, 0.048};
  double r_tail_c = 1.4e-5;
  double r_tail_alpha = -1.35;
  std::int64_t base_short_interest = 400'000'000;
  Price price_start = Price::from_cents(4000);
  double daily_volatility = 0.02;
  std::uint64_t seed = 42;
  Date start_date{2007, 1, 2};
  std::string ticker = "SYN";

  void validate() const;
};

struct RaidSpec {
  std::size_t open_day = 0;
  std::size_t separation = 6;
  double open_r = 0.77;
  double open_q = 3.7;
  double price_drop_pct = 0.069;
  bool restore_baseline = true;
  /// Cover-day volume as a multiple of its trailing mean.
  double cover_q = 2.6;
  /// Without baseline restoration the cover ΔS is -cover_fraction * open ΔS.
  double cover_fraction = 0.5;
};

struct PlantedRaid {
  std::size_t open_index = 0;
  std::size_t cover_index = 0;
  Date open_date;
  Date cover_date;
  std::int64_t open_delta = 0;
  std::int64_t cover_delta = 0;
  std::int64_t open_volume = 0;
  std::int64_t cover_volume = 0;
  bool restore_baseline = true;

  friend bool operator==(const PlantedRaid&, const PlantedRaid&) = default;
};

/// Background series: volumes drawn i.i.d. Pareto around mean_volume, so Q
/// inherits the configured tail up to trailing-mean noise;
/// R drawn from the spliced Laplace/power-law mixture with ΔS = R V, S
/// accumulated from the base and floored at zero, closes on a geometric
/// random walk. No dividends.
MarketSeries generate_background(const BackgroundSpec& spec);

/// Plants an open spike at `open_day` and a covering spike `separation` days
/// later. Throws InputError if the raid overlaps the warm-up window or runs
/// past the end of the series.
std::pair<MarketSeries, PlantedRaid> inject_raid(const MarketSeries& series, const RaidSpec& raid,
                                                 std::size_t warmup = 63);

struct SynthSpec {
  BackgroundSpec background;
  std::vector<RaidSpec> raids;
};

struct SynthOutput {
  MarketSeries series;
  std::vector<PlantedRaid> truth;
};

SynthOutput synthesize(const SynthSpec& spec);

}  // namespace bearraid
