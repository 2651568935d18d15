#include "bearraid/tail_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bearraid/format.hpp"

namespace bearraid {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double clamp_probability(double p) { return std::clamp(p, kTiny, 1.0); }

std::vector<double> sorted_finite(std::span<const double> samples) {
  std::vector<double> v(samples.begin(), samples.end());
  for (double x : v) {
    if (!std::isfinite(x)) throw FitError("non-finite sample");
  }
  std::sort(v.begin(), v.end());
  return v;
}

double median_of_sorted(const std::vector<double>& v) {
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LaplacePoint {
  double value;
  double d_beta;
  double d_log_gamma;
};

LaplacePoint laplace_eval(double beta, double gamma, double x) {
  if (x < beta) {
    double f = 0.5 * std::exp((x - beta) / gamma);
    return {f, -f / gamma, f * (beta - x) / gamma};
  }
  double e = 0.5 * std::exp(-(x - beta) / gamma);
  return {1.0 - e, -e / gamma, -e * (x - beta) / gamma};
}

double laplace_cost(const std::vector<double>& xs, const std::vector<double>& ys, double beta,
                    double gamma) {
  double cost = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = laplace_cdf(beta, gamma, xs[i]) - ys[i];
    cost += r * r;
  }
  return cost;
}

}  // namespace

EcdfPoints ecdf_tail(std::span<const double> samples, TailSide side) {
  if (samples.size() < 2) throw FitError("at least 2 samples are required for an empirical CDF");
  std::vector<double> v = sorted_finite(samples);
  const double n = static_cast<double>(v.size());
  EcdfPoints out{side, {}};
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    // v[i..j) are equal: i samples lie below, j samples at or below.
    double count = side == TailSide::Upper ? static_cast<double>(v.size() - i) : static_cast<double>(j);
    out.points.push_back({v[i], count / n});
    i = j;
  }
  return out;
}

PowerLawFit fit_power_tail(const EcdfPoints& points, double x_min) {
  if (points.side != TailSide::Upper) throw FitError("power-law fits use upper-tail points");
  std::vector<double> lx, lp;
  for (const auto& pt : points.points) {
    if (pt.x < x_min) continue;
    if (pt.x <= 0.0) throw FitError("non-positive x in power-law fit range");
    lx.push_back(std::log(pt.x));
    lp.push_back(std::log(pt.p));
  }
  const std::size_t n = lx.size();
  if (n < 3) throw FitError("power-law fit needs at least 3 points above x_min, found " + std::to_string(n));

  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(lp.begin(), lp.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (lp[i] - my);
  }
  if (sxx <= 0.0) throw FitError("power-law fit range has a single distinct x");

  PowerLawFit fit;
  fit.alpha = sxy / sxx;
  fit.c = std::exp(my - fit.alpha * mx);
  fit.x_min = x_min;
  fit.n_points = n;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = lp[i] - (my + fit.alpha * (lx[i] - mx));
    ssr += r * r;
  }
  fit.alpha_stderr = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  for (const auto& pt : points.points) {
    if (pt.x < x_min) continue;
    double model = fit.c * std::pow(pt.x, fit.alpha);
    fit.ks = std::max(fit.ks, std::abs(pt.p - model) / pt.p);
  }
  return fit;
}

double quantile(std::span<const double> samples, double q) {
  if (samples.empty()) throw FitError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in [0, 1]");
  std::vector<double> v = sorted_finite(samples);
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double default_x_min(std::span<const double> samples, double q) {
  std::vector<double> positive;
  for (double x : samples) {
    if (x > 0.0) positive.push_back(x);
  }
  if (positive.empty()) throw FitError("no positive samples for a power-law threshold");
  return quantile(positive, q);
}

PowerLawFit fit_upper_power_tail(std::span<const double> samples, double x_min_quantile) {
  double x_min = default_x_min(samples, x_min_quantile);
  return fit_power_tail(ecdf_tail(samples, TailSide::Upper), x_min);
}

double laplace_cdf(double beta, double gamma, double x) {
  if (x < beta) return 0.5 * std::exp((x - beta) / gamma);
  return 1.0 - 0.5 * std::exp(-(x - beta) / gamma);
}

LaplaceFit fit_laplace(std::span<const double> samples, const LaplaceFitOptions& options) {
  if (samples.size() < 10) throw FitError("Laplace fit needs at least 10 samples");
  std::vector<double> xs = sorted_finite(samples);
  if (xs.front() == xs.back()) throw FitError("degenerate Laplace fit: all samples are equal");
  const std::size_t n = xs.size();
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);

  double beta = median_of_sorted(xs);
  double mad = 0.0;
  for (double x : xs) mad += std::abs(x - beta);
  mad /= static_cast<double>(n);
  double gamma = mad > 0.0 ? mad : (xs.back() - xs.front()) / 4.0;

  double cost = laplace_cost(xs, ys, beta, gamma);
  double lambda = 1e-3;
  bool converged = false;
  std::size_t iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    // Normal equations for (beta, log gamma).
    double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      LaplacePoint p = laplace_eval(beta, gamma, xs[i]);
      double r = p.value - ys[i];
      a11 += p.d_beta * p.d_beta;
      a12 += p.d_beta * p.d_log_gamma;
      a22 += p.d_log_gamma * p.d_log_gamma;
      g1 += p.d_beta * r;
      g2 += p.d_log_gamma * r;
    }
    if (std::max(std::abs(g1), std::abs(g2)) <= options.tolerance * std::max(1.0, cost)) {
      converged = true;
      break;
    }
    while (true) {
      double b11 = a11 * (1.0 + lambda), b22 = a22 * (1.0 + lambda);
      double det = b11 * b22 - a12 * a12;
      if (!(det > 0.0) || !std::isfinite(det)) {
        lambda *= 10.0;
      } else {
        double step_beta = -(b22 * g1 - a12 * g2) / det;
        double step_log_gamma = -(b11 * g2 - a12 * g1) / det;
        double cand_beta = beta + step_beta;
        double cand_gamma = gamma * std::exp(step_log_gamma);
        double cand_cost = laplace_cost(xs, ys, cand_beta, cand_gamma);
        if (std::isfinite(cand_cost) && cand_cost <= cost) {
          bool small_step = std::abs(step_beta) <= options.tolerance * (std::abs(beta) + gamma) &&
                            std::abs(step_log_gamma) <= options.tolerance;
          bool flat = cost - cand_cost <= options.tolerance * cost;
          beta = cand_beta;
          gamma = cand_gamma;
          cost = cand_cost;
          lambda = std::max(lambda / 10.0, 1e-12);
          if (small_step || flat) converged = true;
          break;
        }
        lambda *= 10.0;
      }
      if (lambda > 1e16) {
        // No descent direction left at working precision.
        converged = true;
        break;
      }
    }
  }
  double rms = std::sqrt(cost / static_cast<double>(n));
  if (!converged) {
    throw FitError("Laplace fit did not converge after " + std::to_string(iter) +
                   " iterations (rms residual " + format_number(rms) + ")");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma) || !std::isfinite(beta)) {
    throw FitError("degenerate Laplace fit: scale collapsed");
  }

  LaplaceFit fit;
  fit.beta = beta;
  fit.gamma = gamma;
  fit.residual = rms;
  fit.iterations = iter;
  fit.n_samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    double f = laplace_cdf(beta, gamma, xs[i]);
    double lo = static_cast<double>(i) / static_cast<double>(n);
    double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    fit.ks = std::max({fit.ks, std::abs(f - lo), std::abs(f - hi)});
  }
  return fit;
}

double tail_probability(const PowerLawFit& fit, double x, TailSide side) {
  if (side != TailSide::Upper) throw std::invalid_argument("power-law fits describe upper tails only");
  if (!(x > 0.0)) throw std::domain_error("power-law tail evaluated at non-positive x");
  if (x < fit.x_min) throw std::domain_error("power-law tail evaluated below x_min");
  return clamp_probability(fit.c * std::pow(x, fit.alpha));
}

double tail_probability(const LaplaceFit& fit, double x, TailSide side, LaplaceForm form) {
  double p = 0.0;
  if (side == TailSide::Lower) {
    p = laplace_cdf(fit.beta, fit.gamma, x);
  } else if (x >= fit.beta) {
    p = 0.5 * std::exp(-(x - fit.beta) / fit.gamma);
  } else {
    p = 1.0 - 0.5 * std::exp(-(fit.beta - x) / fit.gamma);
  }
  if (form == LaplaceForm::Caption) p *= 2.0;
  return clamp_probability(p);
}

std::string write_overlay_csv(const EcdfPoints& points, const PowerLawFit& fit) {
  std::string out = "x,empirical_p,fitted_p\n";
  for (const auto& pt : points.points) {
    out += format_number(pt.x) + ',' + format_number(pt.p) + ',';
    if (pt.x >= fit.x_min && pt.x > 0.0) out += format_number(tail_probability(fit, pt.x));
    out += '\n';
  }
  return out;
}

std::string write_overlay_csv(const EcdfPoints& points, const LaplaceFit& fit) {
  std::string out = "x,empirical_p,fitted_p\n";
  for (const auto& pt : points.points) {
    out += format_number(pt.x) + ',' + format_number(pt.p) + ',' +
           format_number(tail_probability(fit, pt.x, points.side)) + '\n';
  }
  return out;
}

}  // namespace bearraid
