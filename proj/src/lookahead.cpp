#include "kolcouple/lookahead.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "kolcouple/survival.hpp"

namespace kolcouple {

double iterated_eigenfunction_value(int r, int k_mode, double t) {
  if (r < 0 || k_mode < 1) throw std::invalid_argument("iterated_eigenfunction_value: bad r or k");
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("iterated_eigenfunction_value: t outside [0,1]");
  const double w = (k_mode - 0.5) * M_PI;
  // f = a sin(w s) + b cos(w s) + sum_j p_j s^j; integration with zero
  // initial condition: a' = b/w, b' = -a/w, p'_0 = a/w, p'_{j+1} = p_j/(j+1).
  double a = std::sqrt(2.0), b = 0.0;
  std::vector<double> poly;
  for (int step = 0; step < r; ++step) {
    std::vector<double> next(poly.size() + 1);
    next[0] = a / w;
    for (std::size_t j = 0; j < poly.size(); ++j) next[j + 1] = poly[j] / (j + 1.0);
    double a_new = b / w;
    double b_new = -a / w;
    a = a_new;
    b = b_new;
    poly = std::move(next);
  }
  double val = a * std::sin(w * t) + b * std::cos(w * t);
  double tp = 1.0;
  for (double c : poly) {
    val += c * tp;
    tp *= t;
  }
  return val;
}

KLBasis build_kl_basis(int index, int K) {
  if (K < 1) throw std::invalid_argument("build_kl_basis: K must be >= 1");
  KLBasis basis;
  basis.K = K;
  basis.lambdas = Vector(K);
  basis.iterated_values = Matrix(index + 1, K);
  for (int k = 1; k <= K; ++k) {
    double w = (k - 0.5) * M_PI;
    basis.lambdas(k - 1) = 1.0 / (w * w);
    for (int r = 0; r <= index; ++r)
      basis.iterated_values(r, k - 1) = iterated_eigenfunction_value(r, k, 1.0);
  }
  return basis;
}

CouplingMatrixE build_E(const TransitionKernel& kernel, int K) {
  KLBasis basis = build_kl_basis(kernel.index(), K);
  CouplingMatrixE out;
  // E = L^{-1} F diag(sqrt(lambda)), F(r, k) = f_{r,k}(1)
  Matrix F = kernel.cholesky().triangularView<Eigen::Lower>().solve(basis.iterated_values);
  out.e = F * basis.lambdas.cwiseSqrt().asDiagonal();
  return out;
}

double BlockSchedule::T(int n) const { return std::pow(alpha, n); }

double BlockSchedule::S(int n) const {
  if (alpha == 1.0) return static_cast<double>(n);
  return alpha * (std::pow(alpha, n) - 1.0) / (alpha - 1.0);
}

std::vector<Vector> nu_sequence(const TransitionKernel& kernel, const Vector& z,
                                double alpha, int n_max) {
  if (first_nonzero_index(z) < 0) throw std::invalid_argument("nu_sequence: z must be nonzero");
  if (alpha <= 1.0) throw std::invalid_argument("nu_sequence: alpha must exceed 1");
  Matrix M = kernel.block_map(alpha);
  std::vector<Vector> seq;
  seq.reserve(n_max + 1);
  Vector nu = kernel.solve_L(z);
  nu /= nu.norm();
  seq.push_back(nu);
  for (int n = 1; n <= n_max; ++n) {
    nu = M * nu;
    nu /= nu.norm();
    seq.push_back(nu);
  }
  return seq;
}

double block_gain(const TransitionKernel& kernel, const Vector& z, double alpha, int n) {
  if (first_nonzero_index(z) < 0) throw std::invalid_argument("block_gain: z must be nonzero");
  Vector nu0 = kernel.solve_L(z);
  nu0 /= nu0.norm();
  Vector w = kernel.cholesky() * nu0;
  Vector dinv = kernel.scaling(1.0 / alpha);
  for (int i = 0; i < n; ++i) w = kernel.structure() * (dinv.asDiagonal() * w);
  return kernel.solve_L(w).norm();
}

ScalarLookahead prepare_scalar_lookahead(const TransitionKernel& kernel,
                                         const Vector& z, double alpha, int n_max) {
  if (first_nonzero_index(z) < 0)
    throw std::invalid_argument("prepare_scalar_lookahead: z must be nonzero");
  if (alpha <= 1.0) throw std::invalid_argument("prepare_scalar_lookahead: alpha must exceed 1");
  if (n_max < 1 || n_max > 600)
    throw std::invalid_argument("prepare_scalar_lookahead: n_max out of range");
  ScalarLookahead prep;
  prep.F0 = kernel.solve_L(z).norm();
  prep.block_variance.resize(n_max);
  prep.S.resize(n_max);
  BlockSchedule sched{alpha};
  Vector nu0 = kernel.solve_L(z);
  nu0 /= nu0.norm();
  Vector w = kernel.cholesky() * nu0;
  Vector dinv = kernel.scaling(1.0 / alpha);
  for (int n = 1; n <= n_max; ++n) {
    w = kernel.structure() * (dinv.asDiagonal() * w);
    double g = kernel.solve_L(w).norm();
    prep.block_variance[n - 1] = 4.0 * sched.T(n) / (g * g);
    prep.S[n - 1] = sched.S(n);
  }
  return prep;
}

std::optional<int> simulate_lookahead_scalar(const ScalarLookahead& prep,
                                             NoiseStream& stream) {
  double G = prep.F0;
  for (std::size_t n = 0; n < prep.block_variance.size(); ++n) {
    double v = prep.block_variance[n];
    double G_next = G + std::sqrt(v) * stream.normal();
    if (G_next <= 0.0) return static_cast<int>(n) + 1;
    double p_cross = std::exp(-2.0 * G * G_next / v);
    if (stream.uniform() < p_cross) return static_cast<int>(n) + 1;
    G = G_next;
  }
  return std::nullopt;
}

std::optional<int> simulate_lookahead_scalar(const TransitionKernel& kernel,
                                             const Vector& z, double alpha,
                                             int n_max, NoiseStream& stream) {
  ScalarLookahead prep = prepare_scalar_lookahead(kernel, z, alpha, n_max);
  return simulate_lookahead_scalar(prep, stream);
}

namespace {

// In-block path points via the KL representation: state_r(theta T) equals
// [H(theta T) x_start]_r + T^r sum_k sqrt(lambda_k) w_k f_{r,k}(theta).
void append_block_path(const TransitionKernel& kernel, const KLBasis& basis,
                       const Vector& x_start, const Vector& w_modes, double T,
                       double t_offset, int points, PathSample& path) {
  const int dim = kernel.dim();
  for (int j = 1; j <= points; ++j) {
    double theta = static_cast<double>(j) / points;
    Vector state = kernel.flow(theta * T) * x_start;
    double Tr = 1.0;
    for (int r = 0; r < dim; ++r) {
      double sum = 0.0;
      for (int k = 1; k <= basis.K; ++k)
        sum += std::sqrt(basis.lambdas(k - 1)) * w_modes(k - 1) *
               iterated_eigenfunction_value(r, k, theta);
      state(r) += Tr * sum;
      Tr *= T;
    }
    path.times.push_back(t_offset + theta * T);
    path.states.push_back(state);
  }
}

}  // namespace

LookaheadPathsResult simulate_lookahead_paths(const TransitionKernel& kernel,
                                              const Vector& x1, const Vector& x2,
                                              double alpha,
                                              const LookaheadPathsOptions& opts,
                                              const CouplingMatrixE& E,
                                              const KLBasis& basis,
                                              NoiseStream& stream) {
  const int K = opts.K;
  const int dim = kernel.dim();
  if (K < dim)
    throw std::invalid_argument("simulate_lookahead_paths: K must be at least k+1");
  if (opts.n_blocks < 1 || opts.grid_per_block < 1)
    throw std::invalid_argument("simulate_lookahead_paths: bad block options");
  if (E.e.cols() != K || basis.K != K)
    throw std::invalid_argument("simulate_lookahead_paths: basis/E truncation mismatch");

  LookaheadPathsResult res;
  const bool record = opts.path_points_per_block > 0;
  Vector a = x1, b = x2;
  if (record) {
    res.path1.times.push_back(0.0);
    res.path1.states.push_back(a);
    res.path2.times.push_back(0.0);
    res.path2.states.push_back(b);
  }
  BlockSchedule sched{alpha};
  bool synced = (a - b).isZero(0.0);

  Vector w1(K), vhat(K), u(K), dB(K);
  for (int n = 1; n <= opts.n_blocks; ++n) {
    const double T = sched.T(n);
    const double t_begin = sched.S(n - 1);
    LookaheadBlockDiag diag;

    double level = 0.0;
    double uu = 0.0;
    bool reflecting = !synced;
    if (reflecting) {
      Vector q = kernel.solve_L(kernel.structure() *
                                (kernel.scaling(1.0 / T).asDiagonal() * (a - b)));
      diag.gap_norm = q.norm();
      level = -0.5 * diag.gap_norm;
      Vector eta = q / diag.gap_norm;
      Vector v1 = E.e.transpose() * eta;
      vhat = v1 / v1.norm();
      u = vhat;
      u(0) -= 1.0;
      uu = u.squaredNorm();
    }

    const int m = opts.grid_per_block;
    const double dzeta = T / m;
    const double sd = std::sqrt(dzeta);
    w1.setZero();
    double b1 = 0.0;
    bool fired = false;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < K; ++j) dB(j) = sd * stream.normal();
      if (reflecting && uu > 1e-28) {
        double s = u.dot(dB);
        w1.noalias() += dB - (2.0 * s / uu) * u;
      } else {
        w1 += dB;
      }
      if (reflecting && !fired) {
        double b1_next = b1 + dB(0);
        double d0 = b1 - level, d1 = b1_next - level;
        if (d1 <= 0.0) {
          fired = true;
        } else if (d0 * d1 < 42.0 * dzeta &&
                   stream.uniform() < std::exp(-2.0 * d0 * d1 / dzeta)) {
          fired = true;
        }
        b1 = b1_next;
      } else if (reflecting) {
        b1 += dB(0);
      }
    }
    double b1_stopped = fired ? level : b1;
    diag.b1_stopped = b1_stopped;
    diag.sigma_fired = fired;

    Vector W1 = E.e * w1;
    Vector W2 = reflecting ? Vector(W1 - 2.0 * b1_stopped * (E.e * vhat)) : W1;
    Vector d = kernel.scaling(T);
    Vector dinv = kernel.scaling(1.0 / T);
    Vector a_next = d.asDiagonal() *
                    (kernel.structure() * (dinv.asDiagonal() * a) + kernel.cholesky() * W1);
    Vector b_next = d.asDiagonal() *
                    (kernel.structure() * (dinv.asDiagonal() * b) + kernel.cholesky() * W2);
    diag.f_end = kernel.solve_L(dinv.asDiagonal() * (a_next - b_next)).norm();

    if (record) {
      append_block_path(kernel, basis, a, w1, T, t_begin, opts.path_points_per_block,
                        res.path1);
      Vector w2 = reflecting ? Vector(w1 - 2.0 * b1_stopped * vhat) : w1;
      append_block_path(kernel, basis, b, w2, T, t_begin, opts.path_points_per_block,
                        res.path2);
    }

    a = a_next;
    b = b_next;
    if (reflecting && fired) {
      // The residual discrepancy after sigma_n is pure mode-truncation,
      // O(1/(pi^2 K)); absorb it so the copies agree from here on.
      b = a;
      if (!res.coupled) {
        res.coupled = true;
        res.coupled_block = n;
      }
      synced = true;
    }
    res.blocks.push_back(diag);
    res.end1.push_back(a);
    res.end2.push_back(b);
  }
  return res;
}

LookaheadPathsResult simulate_lookahead_paths(const TransitionKernel& kernel,
                                              const Vector& x1, const Vector& x2,
                                              double alpha,
                                              const LookaheadPathsOptions& opts,
                                              NoiseStream& stream) {
  CouplingMatrixE E = build_E(kernel, opts.K);
  KLBasis basis = build_kl_basis(kernel.index(), opts.K);
  return simulate_lookahead_paths(kernel, x1, x2, alpha, opts, E, basis, stream);
}

BoundedHorizon prepare_bounded_horizon(const TransitionKernel& kernel,
                                       const Vector& z, int n_max) {
  if (kernel.index() < 1)
    throw std::invalid_argument("prepare_bounded_horizon: requires index k >= 1");
  if (first_nonzero_index(z) < 0)
    throw std::invalid_argument("prepare_bounded_horizon: z must be nonzero");
  if (n_max < 1) throw std::invalid_argument("prepare_bounded_horizon: n_max must be >= 1");
  BoundedHorizon prep;
  prep.F0 = kernel.solve_L(z).norm();
  prep.gain_ratio.resize(n_max);
  double prev = prep.F0;
  for (int n = 1; n <= n_max; ++n) {
    double cur = kernel.solve_L(kernel.flow(static_cast<double>(n)) * z).norm();
    prep.gain_ratio[n - 1] = cur / prev;
    prev = cur;
  }
  return prep;
}

std::optional<int> simulate_bounded_horizon(const BoundedHorizon& prep,
                                            NoiseStream& stream) {
  double F = prep.F0;
  for (std::size_t n = 0; n < prep.gain_ratio.size(); ++n) {
    double start = prep.gain_ratio[n] * F;
    double end = start + 2.0 * stream.normal();
    if (end <= 0.0) return static_cast<int>(n) + 1;
    if (start * end < 168.0 &&  // else crossing prob < exp(-84)
        stream.uniform() < std::exp(-0.5 * start * end))
      return static_cast<int>(n) + 1;
    F = end;
  }
  return std::nullopt;
}

BoundedHorizonResult bounded_horizon_survival(const TransitionKernel& kernel,
                                              const Vector& z, int n_max, long reps,
                                              std::uint64_t master_seed, int threads) {
  if (reps < 1) throw std::invalid_argument("bounded_horizon_survival: reps must be >= 1");
  BoundedHorizon prep = prepare_bounded_horizon(kernel, z, n_max);
  std::atomic<long> next{0};
  std::atomic<long> survived{0};
  auto worker = [&]() {
    long local = 0;
    for (;;) {
      long i = next.fetch_add(1);
      if (i >= reps) break;
      NoiseStream stream(master_seed, static_cast<std::uint64_t>(i));
      if (!simulate_bounded_horizon(prep, stream)) ++local;
    }
    survived.fetch_add(local);
  };
  int n_threads = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  BoundedHorizonResult res;
  res.n_reps = reps;
  res.n_survived = survived.load();
  res.survival = static_cast<double>(res.n_survived) / reps;
  wilson_interval(res.n_survived, reps, 2.5758293035489004, &res.ci_lo, &res.ci_hi);
  return res;
}

double comparison_intrinsic_time(int k) {
  if (k < 1) throw std::invalid_argument("comparison_intrinsic_time: k must be >= 1");
  const int N = 2000;
  const double s = 2.0 * k;
  double sum = 0.0;
  for (int n = 1; n <= N; ++n) sum += std::pow(n, -s);
  // Euler-Maclaurin tail from N
  double nn = static_cast<double>(N);
  double tail = std::pow(nn, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(nn, -s) +
                (s / 12.0) * std::pow(nn, -s - 1.0) -
                (s * (s + 1.0) * (s + 2.0) / 720.0) * std::pow(nn, -s - 3.0);
  return sum + tail;
}

}  // namespace kolcouple
