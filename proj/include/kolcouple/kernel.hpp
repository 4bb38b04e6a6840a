#pragma once

#include <Eigen/Dense>
#include <utility>

namespace kolcouple {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Hyperplane on which two equal-covariance Gaussian transition densities
// agree: unit normal plus one point on the plane (the midpoint of the means).
struct Hyperplane {
  Vector normal;
  Vector point;
};

// Closed-form transition machinery for the index-k Kolmogorov diffusion
// (Brownian motion with its first k iterated time integrals; state dimension
// k+1). All matrices are built from exact rational entries:
//
//   H[a][b] = 1/(a-b)!              (a >= b, 0 otherwise)
//   V[a][b] = binom(a+b,a)/(a+b+1)!
//   V = L L^T, L lower-triangular Cholesky with positive diagonal
//
// The time-t flow is H(t) = D(t) H D(1/t) with D(t) = diag(1, t, ..., t^k),
// and the time-T covariance from any start is T D(T) V D(T).
class TransitionKernel {
 public:
  explicit TransitionKernel(int k);

  int index() const { return k_; }
  int dim() const { return k_ + 1; }

  const Matrix& structure() const { return H_; }        // H
  const Matrix& covariance_unit() const { return V_; }  // V
  const Matrix& cholesky() const { return L_; }         // L

  // Diagonal of D(t) as a vector.
  Vector scaling(double t) const;

  // H(t) = D(t) H D(1/t); requires t > 0.
  Matrix flow(double t) const;

  // Mean H(T) x and covariance T D(T) V D(T) of the time-T state; T > 0.
  std::pair<Vector, Matrix> mean_and_covariance(const Vector& x, double T) const;

  // Total variation distance between the time-T laws from x1 and x2:
  // P(|N(0,1)| <= ||L^{-1} H D(1/T) z|| / (2 sqrt(T))), z = x1 - x2.
  double tv_distance(const Vector& x1, const Vector& x2, double T) const;

  // The TV lower bound on any coupling's failure probability, together with
  // the index r of the first nonzero coordinate of z; the bound decays as
  // T^{-(r+1/2)}.
  std::pair<double, int> maximal_tail(const Vector& z, double T) const;

  // Hyperplane {w : p_t(x_plus, w) = p_t(x_minus, w)}. Normal is proportional
  // to (t^k D(1/t)) V^{-1} H (t^k D(1/t)) z; the plane passes through the
  // midpoint of the two propagated means.
  Hyperplane agreement_hyperplane(const Vector& x_plus, const Vector& x_minus,
                                  double t) const;

  // log of the time-T transition density from x evaluated at w.
  double log_transition_density(const Vector& x, double T, const Vector& w) const;

  // Triangular solves (forward substitution; no general inversion).
  Vector solve_L(const Vector& rhs) const;
  Vector solve_V(const Vector& rhs) const;  // via L then L^T

  // L^{-1} H D(1/alpha) L, the one-block contraction map of the discrepancy
  // direction used by the look-ahead coupling.
  Matrix block_map(double alpha) const;

 private:
  int k_;
  Matrix H_;
  Matrix V_;
  Matrix L_;
};

inline TransitionKernel build_kernel(int k) { return TransitionKernel(k); }

// Index of the first nonzero coordinate, or -1 if the vector is zero.
int first_nonzero_index(const Vector& z, double tol = 0.0);

}  // namespace kolcouple
