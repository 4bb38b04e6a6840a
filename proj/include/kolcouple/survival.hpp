#pragma once

#include <string>
#include <vector>

#include "kolcouple/reflection_coupling.hpp"

namespace kolcouple {

struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> estimates;  // P(tau > t); NaN where no replicate is at risk
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::vector<long> n_at_risk;
};

// Wilson score interval for a binomial proportion.
void wilson_interval(long successes, long trials, double z, double* lo, double* hi);

// P(tau > t) per grid point with 95% Wilson bands. Censored replicates count
// as surviving up to their own horizon only; beyond it they leave the risk
// set (estimates with an empty risk set are NaN).
SurvivalCurve estimate_survival(const std::vector<CouplingOutcome>& outcomes,
                                const std::vector<double>& grid);

struct RateFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Weighted least squares of log(estimate) on log(t) over the window,
// weights from the CI half-widths on the log scale. Points with estimates
// outside (0,1) are dropped; fewer than 4 usable points is an error.
RateFit fit_rate(const SurvivalCurve& curve, double window_lo, double window_hi);

// Default window: the latest full decade of t over which all estimates lie
// in [0.01, 0.5] (the whole compliant span when it is shorter than a decade).
std::pair<double, double> default_fit_window(const SurvivalCurve& curve);

std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace kolcouple
