#pragma once

namespace kolcouple {

// Law of the area swept by a unit-rate Brownian motion started at a > 0,
// integrated until its first visit to 0:
//
//   density(u) = (2^{1/3} / (3^{2/3} Gamma(1/3))) * a * u^{-4/3} * exp(-2a^3/(9u))
//   tail(t)    = P(area > t) = P(1/3, 2a^3/(9t))   (regularized lower
//                incomplete gamma; obtained from the density by w = 2a^3/(9u))
//
// The first half-cycle duration of the unit-scale reflection/synchronous
// coupling satisfies S1 = 4 * area with a = 3/4.
struct AreaLaw {
  double a;

  explicit AreaLaw(double start_height);

  double density(double u) const;  // u > 0
  double tail(double t) const;     // t > 0
  double cdf(double t) const { return 1.0 - tail(t); }
};

}  // namespace kolcouple
