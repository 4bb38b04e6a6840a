#pragma once

namespace kolcouple {

// Standard normal CDF, implemented via erfc (correctly rounded in libm
// to well under 1e-15 absolute error).
double normal_cdf(double x);

// P(|N(0,1)| <= ell) = erf(ell / sqrt(2)).
double prob_abs_normal_le(double ell);

// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s),
// s > 0, x >= 0. Series expansion for x < s + 1, Lentz continued fraction
// otherwise; absolute error below 1e-14 over the ranges used here.
double gamma_p(double s, double x);

// Q(s, x) = 1 - P(s, x).
double gamma_q(double s, double x);

// Exact integer factorial for n <= 20, double beyond.
double factorial(int n);

// Exact binomial coefficient (additive Pascal recursion in integers).
double binomial(int n, int k);

}  // namespace kolcouple
