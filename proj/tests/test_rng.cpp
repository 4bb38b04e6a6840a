#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kolcouple/rng.hpp"
#include "kolcouple/special.hpp"

using namespace kolcouple;

TEST_CASE("stream determinism") {
  NoiseStream a(42, 0), b(42, 0);
  for (int i = 0; i < 100000; ++i) CHECK(a.next_u64() == b.next_u64());
  NoiseStream c(42, 0), d(42, 0);
  for (int i = 0; i < 1000; ++i) CHECK(c.normal() == d.normal());
}

TEST_CASE("distinct replicate ids decorrelate") {
  NoiseStream a(42, 0), b(42, 1);
  const int n = 1000000;
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = a.normal(), y = b.normal();
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  double corr = (sxy - sx * sy / n) /
                std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  CHECK(std::fabs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("normals pass a KS test against N(0,1)") {
  NoiseStream s(42, 0);
  const int n = 100000;
  std::vector<double> x(n);
  for (auto& v : x) v = s.normal();
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    double F = normal_cdf(x[i]);
    d = std::max(d, std::fabs((i + 1.0) / n - F));
    d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
  }
  // 1% critical value ~ 1.628 / sqrt(n)
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniforms stay inside (0,1)") {
  NoiseStream s(1, 7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
}
