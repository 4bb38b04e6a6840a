#include "kolcouple/special.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace kolcouple {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double prob_abs_normal_le(double ell) {
  if (ell <= 0.0) return 0.0;
  return std::erf(ell / std::sqrt(2.0));
}

namespace {

// gamma(s,x)/Gamma(s) by power series, for x < s + 1.
double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Q(s,x) by modified Lentz continued fraction, for x >= s + 1.
double gamma_q_cf(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

double gamma_p(double s, double x) {
  if (s <= 0.0) throw std::invalid_argument("gamma_p: s must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return gamma_p_series(s, x);
  return 1.0 - gamma_q_cf(s, x);
}

double gamma_q(double s, double x) {
  if (s <= 0.0) throw std::invalid_argument("gamma_q: s must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  if (n <= 20) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return static_cast<double>(f);
  }
  double f = factorial(20);
  for (int i = 21; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  if (n <= 62) {  // fits exactly in uint64 up to binom(62,31)
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
      r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(r);
  }
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace kolcouple
