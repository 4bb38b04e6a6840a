#include "kolcouple/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "kolcouple/special.hpp"

namespace kolcouple {

TransitionKernel::TransitionKernel(int k) : k_(k) {
  if (k < 0) throw std::invalid_argument("TransitionKernel: k must be >= 0");
  const int n = k + 1;
  H_ = Matrix::Zero(n, n);
  V_ = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) H_(a, b) = 1.0 / factorial(a - b);
    for (int b = 0; b < n; ++b) V_(a, b) = binomial(a + b, a) / factorial(a + b + 1);
  }
  // LLT keeps the positive-diagonal convention.
  Eigen::LLT<Matrix> llt(V_);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("TransitionKernel: V not positive-definite");
  L_ = llt.matrixL();
}

Vector TransitionKernel::scaling(double t) const {
  Vector d(dim());
  double p = 1.0;
  for (int i = 0; i < dim(); ++i) {
    d(i) = p;
    p *= t;
  }
  return d;
}

Matrix TransitionKernel::flow(double t) const {
  if (t <= 0.0) throw std::invalid_argument("flow: t must be positive");
  // (D(t) H D(1/t))[a][b] = t^{a-b} / (a-b)!
  Matrix Ht = Matrix::Zero(dim(), dim());
  for (int a = 0; a < dim(); ++a)
    for (int b = 0; b <= a; ++b) Ht(a, b) = std::pow(t, a - b) * H_(a, b);
  return Ht;
}

std::pair<Vector, Matrix> TransitionKernel::mean_and_covariance(const Vector& x,
                                                                double T) const {
  if (T <= 0.0) throw std::invalid_argument("mean_and_covariance: T must be positive");
  if (x.size() != dim()) throw std::invalid_argument("mean_and_covariance: bad state size");
  Vector d = scaling(T);
  Matrix cov = T * d.asDiagonal() * V_ * d.asDiagonal();
  return {flow(T) * x, cov};
}

double TransitionKernel::tv_distance(const Vector& x1, const Vector& x2, double T) const {
  if (T <= 0.0) throw std::invalid_argument("tv_distance: T must be positive");
  if (x1.size() != dim() || x2.size() != dim())
    throw std::invalid_argument("tv_distance: bad state size");
  Vector z = x1 - x2;
  Vector dz = scaling(1.0 / T).asDiagonal() * z;
  double ell = solve_L(H_ * dz).norm() / (2.0 * std::sqrt(T));
  return prob_abs_normal_le(ell);
}

std::pair<double, int> TransitionKernel::maximal_tail(const Vector& z, double T) const {
  int r = first_nonzero_index(z);
  if (r < 0) throw std::invalid_argument("maximal_tail: z must be nonzero");
  Vector zero = Vector::Zero(dim());
  return {tv_distance(z, zero, T), r};
}

Hyperplane TransitionKernel::agreement_hyperplane(const Vector& x_plus,
                                                  const Vector& x_minus,
                                                  double t) const {
  if (t <= 0.0) throw std::invalid_argument("agreement_hyperplane: t must be positive");
  Vector z = x_plus - x_minus;
  if (z.isZero(0.0))
    throw std::invalid_argument("agreement_hyperplane: starts must differ");
  // t^k D(1/t) has diagonal (t^k, t^{k-1}, ..., 1).
  Vector dk(dim());
  for (int i = 0; i < dim(); ++i) dk(i) = std::pow(t, k_ - i);
  Vector n = dk.asDiagonal() * solve_V(H_ * (dk.asDiagonal() * z));
  Hyperplane h;
  h.normal = n / n.norm();
  h.point = flow(t) * (0.5 * (x_plus + x_minus));
  return h;
}

double TransitionKernel::log_transition_density(const Vector& x, double T,
                                                const Vector& w) const {
  auto [mean, cov] = mean_and_covariance(x, T);
  Eigen::LLT<Matrix> llt(cov);
  Vector d = w - mean;
  Vector y = llt.matrixL().solve(d);
  double logdet = 0.0;
  for (int i = 0; i < dim(); ++i) logdet += std::log(llt.matrixL()(i, i));
  return -0.5 * y.squaredNorm() - logdet - 0.5 * dim() * std::log(2.0 * M_PI);
}

Vector TransitionKernel::solve_L(const Vector& rhs) const {
  return L_.triangularView<Eigen::Lower>().solve(rhs);
}

Vector TransitionKernel::solve_V(const Vector& rhs) const {
  Vector y = L_.triangularView<Eigen::Lower>().solve(rhs);
  return L_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix TransitionKernel::block_map(double alpha) const {
  if (alpha <= 0.0) throw std::invalid_argument("block_map: alpha must be positive");
  Matrix hd = H_ * scaling(1.0 / alpha).asDiagonal();
  return L_.triangularView<Eigen::Lower>().solve(hd * L_);
}

int first_nonzero_index(const Vector& z, double tol) {
  for (int i = 0; i < z.size(); ++i)
    if (std::fabs(z(i)) > tol) return i;
  return -1;
}

}  // namespace kolcouple
