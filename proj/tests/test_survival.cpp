#include <doctest.h>

#include <cmath>

#include "kolcouple/rng.hpp"
#include "kolcouple/survival.hpp"

using namespace kolcouple;

namespace {

CouplingOutcome coupled_at(double tau, double t_max = 100.0) {
  CouplingOutcome o;
  o.coupled = true;
  o.tau = tau;
  o.t_max = t_max;
  return o;
}

CouplingOutcome censored(double t_max) {
  CouplingOutcome o;
  o.coupled = false;
  o.tau = t_max;
  o.t_max = t_max;
  return o;
}

}  // namespace

TEST_CASE("wilson interval basics") {
  double lo, hi;
  wilson_interval(0, 100, 1.96, &lo, &hi);
  CHECK(lo == 0.0);
  CHECK(hi > 0.0);
  wilson_interval(100, 100, 1.96, &lo, &hi);
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lo < 1.0);
  wilson_interval(50, 100, 1.96, &lo, &hi);
  CHECK(lo == doctest::Approx(0.40383).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.59617).epsilon(1e-3));
}

TEST_CASE("survival estimates with censoring") {
  std::vector<CouplingOutcome> outcomes;
  for (int i = 0; i < 10; ++i) outcomes.push_back(coupled_at(1.0));
  SurvivalCurve c = estimate_survival(outcomes, {2.0});
  CHECK(c.estimates[0] == 0.0);
  CHECK(c.n_at_risk[0] == 10);

  outcomes.clear();
  for (int i = 0; i < 10; ++i) outcomes.push_back(censored(5.0));
  c = estimate_survival(outcomes, {1.0, 5.0, 10.0});
  CHECK(c.estimates[0] == 1.0);
  CHECK(c.estimates[1] == 1.0);
  CHECK(std::isnan(c.estimates[2]));  // beyond every horizon: flagged
  CHECK(c.n_at_risk[2] == 0);

  CHECK_THROWS(estimate_survival({}, {1.0}));
}

TEST_CASE("rate fit recovers exact and noisy power laws") {
  // exact t^{-1/3}
  SurvivalCurve c;
  for (double t = 1.0; t <= 1e3; t *= 1.5) {
    c.times.push_back(t);
    c.estimates.push_back(std::pow(t, -1.0 / 3.0));
    c.ci_lo.push_back(c.estimates.back());
    c.ci_hi.push_back(c.estimates.back());
    c.n_at_risk.push_back(1000);
  }
  RateFit fit = fit_rate(c, 1.0, 1e3);
  CHECK(fit.slope == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  // synthetic noisy t^{-1/2} with matching CI widths
  NoiseStream rng(17, 0);
  SurvivalCurve n;
  const double sigma_log = 0.02;
  for (double t = 10.0; t <= 1e4; t *= 1.4) {
    double p = std::pow(t, -0.5) * std::exp(sigma_log * rng.normal());
    n.times.push_back(t);
    n.estimates.push_back(p);
    n.ci_lo.push_back(p * std::exp(-1.96 * sigma_log));
    n.ci_hi.push_back(p * std::exp(1.96 * sigma_log));
    n.n_at_risk.push_back(100000);
  }
  RateFit nf = fit_rate(n, 10.0, 1e4);
  CHECK(std::fabs(nf.slope + 0.5) < 2.0 * nf.stderr_slope + 1e-3);

  // degenerate windows are rejected
  CHECK_THROWS(fit_rate(c, -1.0, 10.0));
  CHECK_THROWS(fit_rate(c, 5.0, 5.0));
  SurvivalCurve empty;
  empty.times = {1.0, 2.0, 3.0, 4.0};
  empty.estimates = {1.0, 1.0, 1.0, 1.0};  // all at the boundary: unusable
  empty.ci_lo = empty.estimates;
  empty.ci_hi = empty.estimates;
  empty.n_at_risk = {10, 10, 10, 10};
  CHECK_THROWS(fit_rate(empty, 1.0, 4.0));
}

TEST_CASE("default fit window picks the latest compliant decade") {
  SurvivalCurve c;
  for (double t = 1.0; t <= 2e4; t *= 1.3) {
    c.times.push_back(t);
    c.estimates.push_back(std::pow(t, -0.5));  // in [0.01,0.5] for t in [4, 1e4]
    c.ci_lo.push_back(c.estimates.back());
    c.ci_hi.push_back(c.estimates.back());
    c.n_at_risk.push_back(1000);
  }
  auto [lo, hi] = default_fit_window(c);
  CHECK(hi <= 1e4 * 1.0001);
  CHECK(hi / lo == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("log grid endpoints") {
  auto g = log_grid(0.1, 1000.0, 5);
  CHECK(g.front() == doctest::Approx(0.1));
  CHECK(g.back() == doctest::Approx(1000.0));
  CHECK(g.size() == 5);
  CHECK_THROWS(log_grid(0.0, 1.0, 5));
}
