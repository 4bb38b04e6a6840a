#pragma once

#include <optional>
#include <vector>

#include "kolcouple/rng.hpp"

namespace kolcouple {

// Result of one coupling attempt. tau is the coupling time when coupled,
// otherwise the censor horizon.
struct CouplingOutcome {
  bool coupled = false;
  double tau = 0.0;
  double t_max = 0.0;
  std::vector<double> half_cycle_times;  // S_k sequence (only when recorded)
  std::vector<double> half_cycle_u;      // U at each S_k (only when recorded)
};

struct ReflectionOptions {
  int max_half_cycles = 96;
  // Declare coupled once |U| at a half-cycle boundary falls below
  // 2^absorb_floor_log2 * |scale|; the geometric residual of the remaining
  // cycles is below any simulated grid resolution.
  int absorb_floor_log2 = -40;
  bool record_cycles = false;
};

// Reflection/synchronous half-cycle coupling of two classical (index-1)
// diffusions, expressed through the difference pair (U, V):
// U = Brownian difference (rate-4 BM during reflection, frozen during
// synchronous), V = integral difference. Start (U, V) = (scale, 0).
// Half-cycle k reflects until U hits the threshold of magnitude
// 2^{-k} |scale| and sign opposite to U at the cycle start, or until V
// returns to 0; then runs synchronously (deterministically) until V = 0.
//
// Steps: dt = dt0 * max((U - b)^2, 4^{-k} scale^2), capped at half the
// current V-approach time; threshold hits use a Brownian-bridge crossing
// draw plus interpolated event times, V-roots are interpolated, and the
// earlier in-step event wins.
CouplingOutcome simulate_bck(double scale, double dt0, double t_max,
                             NoiseStream& stream,
                             const ReflectionOptions& opts = {});

struct MuTDiagnostics {
  double stage1_duration = 0.0;  // reflection stage
  double v_at_stage1_end = 0.0;
  double s1 = 0.0;               // end of the synchronous stage
  double u_at_s1 = 0.0;          // scale handed to the half-cycle coupling
};

// Per-target coupling from (U, V) = (0, 1): reflect until U hits -4/target_t
// or V hits 0, couple synchronously until V = 0, then run the half-cycle
// coupling from (U_{S1}, 0). Censored at 2 * target_t.
CouplingOutcome simulate_mu_t(double target_t, double dt0, NoiseStream& stream,
                              const ReflectionOptions& opts = {},
                              MuTDiagnostics* diag = nullptr);

}  // namespace kolcouple
