#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "bearraid/date.hpp"
#include "bearraid/error.hpp"

namespace bearraid {

enum class TailSide { Upper, Lower };

struct EcdfPoint {
  double x = 0.0;
  double p = 0.0;
};

/// Tail cumulative distribution at each distinct sample value, sorted by x.
/// Upper: p = #{samples >= x} / n. Lower: p = #{samples <= x} / n.
struct EcdfPoints {
  TailSide side = TailSide::Upper;
  std::vector<EcdfPoint> points;
};

/// Upper-tail model P(X >= x) = c * x^alpha for x >= x_min.
struct PowerLawFit {
  double alpha = 0.0;
  double c = 1.0;
  double x_min = 0.0;
  /// Largest relative deviation |p - c x^alpha| / p over the fit range.
  double ks = 0.0;
  /// OLS standard error of alpha in the log-log regression.
  double alpha_stderr = 0.0;
  std::size_t n_points = 0;
};

/// Laplace (double exponential) distribution with location beta and scale gamma.
struct LaplaceFit {
  double beta = 0.0;
  double gamma = 1.0;
  /// Kolmogorov-Smirnov distance to the empirical CDF.
  double ks = 0.0;
  /// Root-mean-square CDF residual at convergence.
  double residual = 0.0;
  std::size_t iterations = 0;
  std::size_t n_samples = 0;
};

/// How a Laplace tail is evaluated. Normalized is the proper CDF; Caption
/// drops the factor 1/2, i.e. exp(-|x - beta| / gamma) on the tail side.
enum class LaplaceForm { Normalized, Caption };

EcdfPoints ecdf_tail(std::span<const double> samples, TailSide side);

/// Least-squares line through (ln x, ln p) for points with x >= x_min.
/// Throws FitError for fewer than 3 points in range or a non-positive x in range.
PowerLawFit fit_power_tail(const EcdfPoints& points, double x_min);

/// Linearly interpolated sample quantile, q in [0, 1].
double quantile(std::span<const double> samples, double q);

/// Default power-law threshold: the given quantile of the strictly positive samples.
double default_x_min(std::span<const double> samples, double q = 0.8);

struct LaplaceFitOptions {
  std::size_t max_iterations = 200;
  double tolerance = 1e-12;
};

/// Nonlinear least squares of the Laplace CDF against the empirical CDF,
/// started from the median and the mean absolute deviation about it.
/// Throws FitError for fewer than 10 samples, identical samples, or no
/// convergence before the iteration cap.
LaplaceFit fit_laplace(std::span<const double> samples, const LaplaceFitOptions& options = {});

/// Laplace CDF P(X <= x).
double laplace_cdf(double beta, double gamma, double x);

/// min(1, c x^alpha). Throws std::invalid_argument for a lower-tail request
/// and std::domain_error for x <= 0 or x < x_min.
double tail_probability(const PowerLawFit& fit, double x, TailSide side = TailSide::Upper);

/// Lower side: P(X <= x). Upper side: P(X >= x). Clamped into (0, 1].
double tail_probability(const LaplaceFit& fit, double x, TailSide side,
                        LaplaceForm form = LaplaceForm::Normalized);

struct DatedValue {
  Date date;
  double value = 0.0;
};

template <class Fit>
struct ExclusionFit {
  Fit fit;
  std::size_t included = 0;
  std::size_t excluded = 0;
  std::vector<Date> excluded_dates;
};

/// Runs `fitter` on the values whose dates are not in `excluded`.
template <class Fitter>
auto fit_with_exclusions(std::span<const DatedValue> samples, const std::set<Date>& excluded,
                         Fitter&& fitter)
    -> ExclusionFit<std::invoke_result_t<Fitter, std::span<const double>>> {
  std::vector<double> kept;
  kept.reserve(samples.size());
  ExclusionFit<std::invoke_result_t<Fitter, std::span<const double>>> out;
  for (const auto& s : samples) {
    if (excluded.contains(s.date)) {
      out.excluded_dates.push_back(s.date);
    } else {
      kept.push_back(s.value);
    }
  }
  if (kept.empty()) throw FitError("every sample is excluded");
  out.included = kept.size();
  out.excluded = out.excluded_dates.size();
  out.fit = fitter(std::span<const double>(kept));
  return out;
}

/// Upper-tail power-law fit of all samples with the threshold at the given
/// quantile of the positive samples.
PowerLawFit fit_upper_power_tail(std::span<const double> samples, double x_min_quantile = 0.8);

/// CDF overlay rows `x,empirical_p,fitted_p` for plotting.
std::string write_overlay_csv(const EcdfPoints& points, const PowerLawFit& fit);
std::string write_overlay_csv(const EcdfPoints& points, const LaplaceFit& fit);

}  // namespace bearraid
