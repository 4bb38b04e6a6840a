#include <doctest.h>

#include <cmath>

#include "kolcouple/path.hpp"

using namespace kolcouple;

namespace {

// sample covariance of endpoint states, entrywise check within 3 SE
void check_cov(const std::vector<Vector>& samples, const Matrix& expect) {
  const int d = static_cast<int>(expect.rows());
  const long n = static_cast<long>(samples.size());
  Vector mean = Vector::Zero(d);
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(n);
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& s : samples) cov += (s - mean) * (s - mean).transpose();
  cov /= static_cast<double>(n - 1);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double se = std::sqrt((expect(a, a) * expect(b, b) + expect(a, b) * expect(a, b)) / n);
      CHECK(std::fabs(cov(a, b) - expect(a, b)) < 3.5 * se);
    }
}

}  // namespace

TEST_CASE("exact transition: k=0 reduces to a Brownian step") {
  TransitionKernel k0(0);
  NoiseStream s(5, 0);
  Vector x = Vector::Constant(1, 2.0);
  double h = 0.09;
  NoiseStream ref(5, 0);
  double xi = ref.normal();
  Vector y = exact_transition(k0, x, h, s);
  CHECK(y(0) == doctest::Approx(2.0 + std::sqrt(h) * xi).epsilon(1e-15));
  CHECK_THROWS(exact_transition(k0, x, 0.0, s));
}

TEST_CASE("exact transition matches the closed-form covariance") {
  TransitionKernel k1(1);
  NoiseStream s(11, 3);
  Vector x0 = Vector::Zero(2);
  const long n = 100000;
  std::vector<Vector> end;
  end.reserve(n);
  for (long i = 0; i < n; ++i) end.push_back(exact_transition(k1, x0, 1.0, s));
  auto [mean, cov] = k1.mean_and_covariance(x0, 1.0);
  check_cov(end, cov);
}

TEST_CASE("composing exact steps reproduces the h+s covariance") {
  TransitionKernel k2(2);
  NoiseStream s(12, 1);
  Vector x0 = Vector::Zero(3);
  const long n = 60000;
  std::vector<Vector> end;
  end.reserve(n);
  for (long i = 0; i < n; ++i) {
    Vector mid = exact_transition(k2, x0, 0.7, s);
    end.push_back(exact_transition(k2, mid, 1.3, s));
  }
  auto [mean, cov] = k2.mean_and_covariance(x0, 2.0);
  check_cov(end, cov);
}

TEST_CASE("euler path: zero noise follows the deterministic flow") {
  TransitionKernel k2(2);
  ZeroNormals zero;
  Vector x0(3);
  x0 << 1.0, -0.5, 0.25;
  PathSample p = simulate_path_euler(k2, x0, 1.0, 1e-3, zero);
  CHECK(p.states.front() == x0);
  Vector expect = k2.flow(1.0) * x0;
  // trapezoid integration of a polynomial flow: O(dt^2) global error
  CHECK((p.states.back() - expect).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(p.times.back() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < p.times.size(); ++i) CHECK(p.times[i] > p.times[i - 1]);
  CHECK_THROWS(simulate_path_euler(k2, x0, -1.0, 1e-3, zero));
}

TEST_CASE("euler endpoint moments approach the exact kernel as dt shrinks") {
  TransitionKernel k1(1);
  Vector x0 = Vector::Zero(2);
  auto [mean, cov] = k1.mean_and_covariance(x0, 1.0);
  const long n = 10000;
  double prev_err = -1.0;
  for (double dt : {1e-2, 1e-3}) {
    NoiseStream s(13, 0);
    Matrix sum = Matrix::Zero(2, 2);
    for (long i = 0; i < n; ++i) {
      PathSample p = simulate_path_euler(k1, x0, 1.0, dt, s);
      sum += p.states.back() * p.states.back().transpose();
    }
    sum /= static_cast<double>(n);
    double err = (sum - cov).cwiseAbs().maxCoeff();
    if (prev_err >= 0.0) CHECK(err < prev_err + 3.0 * cov(0, 0) / std::sqrt(n));
    prev_err = err;
    CHECK(err < 5.0 * std::sqrt((cov(0, 0) * cov(0, 0) + 1) / n) + 10.0 * dt);
  }
}

TEST_CASE("paths are reproducible from (seed, id, dt)") {
  TransitionKernel k1(1);
  Vector x0 = Vector::Zero(2);
  NoiseStream a(21, 4), b(21, 4);
  PathSample pa = simulate_path_euler(k1, x0, 0.5, 1e-3, a);
  PathSample pb = simulate_path_euler(k1, x0, 0.5, 1e-3, b);
  REQUIRE(pa.states.size() == pb.states.size());
  for (std::size_t i = 0; i < pa.states.size(); ++i)
    CHECK(pa.states[i] == pb.states[i]);
}
