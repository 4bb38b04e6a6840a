#include "kolcouple/survival.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kolcouple {

void wilson_interval(long successes, long trials, double z, double* lo, double* hi) {
  if (trials <= 0) {
    *lo = 0.0;
    *hi = 1.0;
    return;
  }
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  *lo = std::max(0.0, center - half);
  *hi = std::min(1.0, center + half);
}

SurvivalCurve estimate_survival(const std::vector<CouplingOutcome>& outcomes,
                                const std::vector<double>& grid) {
  if (outcomes.empty()) throw std::invalid_argument("estimate_survival: no outcomes");
  SurvivalCurve curve;
  curve.times = grid;
  curve.estimates.resize(grid.size());
  curve.ci_lo.resize(grid.size());
  curve.ci_hi.resize(grid.size());
  curve.n_at_risk.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid[i];
    long at_risk = 0, surviving = 0;
    for (const auto& o : outcomes) {
      if (o.coupled) {
        ++at_risk;
        if (o.tau > t) ++surviving;
      } else if (o.t_max >= t) {
        ++at_risk;
        ++surviving;  // censored at t_max >= t, so still uncoupled at t
      }
    }
    curve.n_at_risk[i] = at_risk;
    if (at_risk == 0) {
      curve.estimates[i] = std::numeric_limits<double>::quiet_NaN();
      curve.ci_lo[i] = curve.ci_hi[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    curve.estimates[i] = static_cast<double>(surviving) / at_risk;
    wilson_interval(surviving, at_risk, 1.959963984540054, &curve.ci_lo[i], &curve.ci_hi[i]);
  }
  return curve;
}

RateFit fit_rate(const SurvivalCurve& curve, double window_lo, double window_hi) {
  if (!(window_lo > 0.0) || !(window_hi > window_lo))
    throw std::invalid_argument("fit_rate: degenerate window");
  std::vector<double> x, y, w;
  bool any_ci = false;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    double t = curve.times[i];
    double p = curve.estimates[i];
    if (t < window_lo || t > window_hi) continue;
    if (!(p > 0.0) || !(p < 1.0)) continue;
    x.push_back(std::log(t));
    y.push_back(std::log(p));
    double se_log = 0.0;
    if (curve.ci_hi[i] > curve.ci_lo[i]) {
      se_log = (curve.ci_hi[i] - curve.ci_lo[i]) / (2.0 * 1.959963984540054 * p);
      if (se_log > 0.0) any_ci = true;
    }
    w.push_back(se_log);
  }
  if (x.size() < 4) throw std::invalid_argument("fit_rate: fewer than 4 usable points");
  for (auto& wi : w) wi = any_ci ? 1.0 / std::max(wi * wi, 1e-18) : 1.0;

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  double xb = sx / sw, yb = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xb) * (x[i] - xb);
    sxy += w[i] * (x[i] - xb) * (y[i] - yb);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  fit.n_points = static_cast<int>(x.size());
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  if (any_ci) {
    fit.stderr_slope = std::sqrt(1.0 / sxx);
  } else {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.stderr_slope = std::sqrt(rss / std::max<std::size_t>(x.size() - 2, 1) / sxx);
  }
  return fit;
}

std::pair<double, double> default_fit_window(const SurvivalCurve& curve) {
  double t_lo = 0.0, t_hi = 0.0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    double p = curve.estimates[i];
    if (!(p >= 0.01) || !(p <= 0.5)) continue;
    if (t_lo == 0.0) t_lo = curve.times[i];
    t_hi = curve.times[i];
  }
  if (t_hi == 0.0) {  // nothing compliant: fall back to the whole positive range
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
      double p = curve.estimates[i];
      if (!(p > 0.0) || !(p < 1.0)) continue;
      if (t_lo == 0.0) t_lo = curve.times[i];
      t_hi = curve.times[i];
    }
    return {t_lo, t_hi};
  }
  return {std::max(t_lo, t_hi / 10.0), t_hi};
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(points);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    g[i] = std::exp(llo + (lhi - llo) * i / (points - 1));
  return g;
}

}  // namespace kolcouple
