#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kolcouple/kernel.hpp"
#include "kolcouple/path.hpp"
#include "kolcouple/rng.hpp"

namespace kolcouple {

// Karhunen-Loeve basis of Brownian motion on [0,1] together with the
// iterated antiderivatives of its eigenfunctions evaluated at 1:
//   lambda_k = 1/((k-1/2)^2 pi^2),  f_k(t) = sqrt(2) sin((k-1/2) pi t),
//   f_{r,k} = r-fold antiderivative of f_k with vanishing initial conditions.
struct KLBasis {
  int K = 0;                // truncation level (modes 1..K)
  Vector lambdas;           // lambda_k
  Matrix iterated_values;   // (index+1) x K, entry (r, k-1) = f_{r,k}(1)
};

// f_{r,k}(t) for t in [0,1], by the exact integration recurrence on
// sin/cos coefficients plus a polynomial carry (each antiderivative maps
// a sin(w s) -> a (1 - cos(w s))/w and so on, keeping all lower
// derivatives zero at 0).
double iterated_eigenfunction_value(int r, int k_mode, double t);

KLBasis build_kl_basis(int index, int K);

// Mode-mixing matrix e_{j,k} = sqrt(lambda_k) sum_r (L^{-1})_{j,r} f_{r,k}(1).
// Its rows are orthonormal in l^2 up to a truncation residual O(1/(pi^2 K)),
// and do not depend on the block length.
struct CouplingMatrixE {
  Matrix e;  // (k+1) x K
};

CouplingMatrixE build_E(const TransitionKernel& kernel, int K);

// Geometric block schedule T_n = alpha^n, S_n = T_1 + ... + T_n.
struct BlockSchedule {
  double alpha;
  double T(int n) const;
  double S(int n) const;
};

// Deterministic unit-direction recursion nu_n = M nu_{n-1} / ||M nu_{n-1}||
// with M = L^{-1} H D(1/alpha) L, nu_0 = L^{-1} z / ||L^{-1} z||.
// Returns nu_0 .. nu_{n_max}.
std::vector<Vector> nu_sequence(const TransitionKernel& kernel, const Vector& z,
                                double alpha, int n_max);

// g_n = ||L^{-1} (H D(1/alpha))^n L nu_0||.
double block_gain(const TransitionKernel& kernel, const Vector& z, double alpha, int n);

// Precomputed data for the absorbed scalar reduction: per-block Gaussian
// variance v_n = 4 T_n / g_n^2 over blocks n = 1..n_max.
struct ScalarLookahead {
  double F0 = 0.0;                     // ||L^{-1} z||
  std::vector<double> block_variance;  // v_n
  std::vector<double> S;               // S_n
};

ScalarLookahead prepare_scalar_lookahead(const TransitionKernel& kernel,
                                         const Vector& z, double alpha, int n_max);

// One replicate of the absorbed scalar process: per block draw the endpoint
// G' ~ N(G, v_n), absorb if G' <= 0, otherwise absorb with the bridge
// crossing probability exp(-2 G G' / v_n). Returns the first absorbing
// block, or nullopt if none within n_max.
std::optional<int> simulate_lookahead_scalar(const ScalarLookahead& prep,
                                             NoiseStream& stream);

std::optional<int> simulate_lookahead_scalar(const TransitionKernel& kernel,
                                             const Vector& z, double alpha,
                                             int n_max, NoiseStream& stream);

struct LookaheadPathsOptions {
  int K = 1024;
  int n_blocks = 5;
  int grid_per_block = 64;
  int path_points_per_block = 0;  // > 0 records process-time paths
};

struct LookaheadBlockDiag {
  double gap_norm = 0.0;    // ||L^{-1} H D(1/T_n) Z_{n-1}|| entering the block
  double b1_stopped = 0.0;  // driver value B_{n,1}(T_n ^ sigma_n)
  bool sigma_fired = false;
  double f_end = 0.0;       // ||L^{-1} D(1/T_n) Z_n|| at block end, pre-snap
};

struct LookaheadPathsResult {
  bool coupled = false;
  int coupled_block = -1;
  std::vector<LookaheadBlockDiag> blocks;
  std::vector<Vector> end1, end2;  // block-end states of both copies
  PathSample path1, path2;         // filled when path recording is on
};

// Path-level coupled sampler over the truncated mode space. Per block the
// driver Brownian motions B_{n,j} are simulated on an algorithmic-time grid;
// the first driver carries the reflection along E^T eta (extended to an
// orthonormal frame by a Householder reflector) until the bridge-corrected
// level crossing sigma_n, after which the block runs synchronously. Both
// process-time paths are reconstructed through the KL sums. K >= k+1.
LookaheadPathsResult simulate_lookahead_paths(const TransitionKernel& kernel,
                                              const Vector& x1, const Vector& x2,
                                              double alpha,
                                              const LookaheadPathsOptions& opts,
                                              const CouplingMatrixE& E,
                                              const KLBasis& basis,
                                              NoiseStream& stream);

LookaheadPathsResult simulate_lookahead_paths(const TransitionKernel& kernel,
                                              const Vector& x1, const Vector& x2,
                                              double alpha,
                                              const LookaheadPathsOptions& opts,
                                              NoiseStream& stream);

// Unit-length block schedule: deterministic per-block gain
// ||L^{-1} H(n) z|| / ||L^{-1} H(n-1) z||, same exact absorption mechanism.
struct BoundedHorizon {
  double F0 = 0.0;
  std::vector<double> gain_ratio;  // ratio for blocks 1..n_max
};

BoundedHorizon prepare_bounded_horizon(const TransitionKernel& kernel,
                                       const Vector& z, int n_max);

std::optional<int> simulate_bounded_horizon(const BoundedHorizon& prep,
                                            NoiseStream& stream);

struct BoundedHorizonResult {
  double survival = 0.0;
  double ci_lo = 0.0;  // Wilson, 99%
  double ci_hi = 0.0;
  long n_survived = 0;
  long n_reps = 0;
};

BoundedHorizonResult bounded_horizon_survival(const TransitionKernel& kernel,
                                              const Vector& z, int n_max, long reps,
                                              std::uint64_t master_seed, int threads);

// Total intrinsic comparison time sum_{n>=1} n^{-2k} of the unit-schedule
// comparison process (partial sum plus Euler-Maclaurin tail, |err| < 1e-12).
double comparison_intrinsic_time(int k);

}  // namespace kolcouple
