#include "kolcouple/reflection_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kolcouple {

namespace {

struct PhaseEnd {
  enum Kind { kBarrierHit, kVZero, kTimeOut } kind;
  double elapsed;
  double u;
  double v;
};

// Reflection phase for the difference pair: dU = 2 dW, dV = U dt, run from
// (u0, v0) until U hits `barrier`, V crosses 0 (once it has left 0), or the
// time budget runs out. floor_sq is the squared near-barrier length scale:
// the step is dt0 * max(dist^2, floor_sq) so event regions keep resolution
// dt0 * floor_sq while far excursions cost O(log) steps.
PhaseEnd reflection_phase(double u0, double v0, double barrier, double dt0,
                          double floor_sq, double budget, NoiseStream& rng) {
  const double side = (u0 >= barrier) ? 1.0 : -1.0;  // which side of b we start on
  double u = u0, v = v0, t = 0.0;
  bool v_armed = std::fabs(v0) > 0.0;
  while (t < budget) {
    double d = side * (u - barrier);  // distance above the barrier, >= 0
    double dt = dt0 * std::max(d * d, floor_sq);
    if (v_armed && v * u < 0.0) {
      // V heading toward 0: keep a couple of steps inside the approach time
      double tau_v = std::fabs(v) / std::fabs(u);
      dt = std::min(dt, std::max(0.5 * tau_v, dt0 * floor_sq));
    }
    dt = std::min(dt, budget - t);
    double u_new = u + 2.0 * std::sqrt(dt) * rng.normal();
    double v_new = v + 0.5 * (u + u_new) * dt;
    double d_new = side * (u_new - barrier);

    double theta_u = 2.0;  // in-step fractions; > 1 means "no event"
    if (d_new <= 0.0) {
      theta_u = d / (d - d_new);
    } else if (d * d_new < 84.0 * dt) {  // else crossing prob < exp(-42)
      double p = std::exp(-2.0 * d * d_new / (4.0 * dt));
      if (rng.uniform() < p) theta_u = d / (d + d_new);
    }

    double theta_v = 2.0;
    if (!v_armed && v_new != 0.0) v_armed = true;
    if (v_armed && v != 0.0 && ((v > 0.0 && v_new <= 0.0) || (v < 0.0 && v_new >= 0.0)))
      theta_v = v / (v - v_new);

    if (theta_u <= 1.0 && theta_u <= theta_v) {
      double dt_hit = theta_u * dt;
      double v_hit = v + 0.5 * (u + barrier) * dt_hit;
      return {PhaseEnd::kBarrierHit, t + dt_hit, barrier, v_hit};
    }
    if (theta_v <= 1.0) {
      double dt_hit = theta_v * dt;
      double u_hit = u + (u_new - u) * theta_v;
      return {PhaseEnd::kVZero, t + dt_hit, u_hit, 0.0};
    }
    u = u_new;
    v = v_new;
    t += dt;
  }
  return {PhaseEnd::kTimeOut, budget, u, v};
}

}  // namespace

CouplingOutcome simulate_bck(double scale, double dt0, double t_max,
                             NoiseStream& stream, const ReflectionOptions& opts) {
  if (scale == 0.0) throw std::invalid_argument("simulate_bck: scale must be nonzero");
  if (dt0 <= 0.0 || t_max <= 0.0)
    throw std::invalid_argument("simulate_bck: dt0 and t_max must be positive");

  const double mag = std::fabs(scale);
  const double floor_abs = std::ldexp(mag, opts.absorb_floor_log2);
  CouplingOutcome out;
  out.t_max = t_max;

  double u = scale;
  double t = 0.0;
  for (int k = 1; k <= opts.max_half_cycles; ++k) {
    if (std::fabs(u) <= floor_abs) {
      out.coupled = true;
      out.tau = t;
      return out;
    }
    const double delta = std::ldexp(mag, -k);           // threshold magnitude
    const double b = (u > 0.0) ? -delta : delta;        // opposite sign to U
    PhaseEnd ph = reflection_phase(u, 0.0, b, dt0, delta * delta, t_max - t, stream);
    t += ph.elapsed;
    if (ph.kind == PhaseEnd::kTimeOut) {
      out.tau = t_max;
      return out;
    }
    if (ph.kind == PhaseEnd::kBarrierHit) {
      // synchronous: V moves at constant rate b back to 0
      double dur = std::max(0.0, -ph.v / b);
      if (t + dur >= t_max) {
        out.tau = t_max;
        return out;
      }
      t += dur;
      u = b;
    } else {
      u = std::clamp(ph.u, -delta, delta);  // |U| < delta up to interpolation error
    }
    if (opts.record_cycles) {
      out.half_cycle_times.push_back(t);
      out.half_cycle_u.push_back(u);
    }
  }
  // Unreachable with a sane floor (the threshold schedule forces
  // |U| <= 2^{-k} scale); treat as coupled at the last boundary.
  out.coupled = true;
  out.tau = t;
  return out;
}

CouplingOutcome simulate_mu_t(double target_t, double dt0, NoiseStream& stream,
                              const ReflectionOptions& opts, MuTDiagnostics* diag) {
  if (target_t <= 0.0)
    throw std::invalid_argument("simulate_mu_t: target_t must be positive");
  if (dt0 <= 0.0) throw std::invalid_argument("simulate_mu_t: dt0 must be positive");

  const double t_censor = 2.0 * target_t;
  const double eps = 4.0 / target_t;
  CouplingOutcome out;
  out.t_max = t_censor;

  PhaseEnd ph = reflection_phase(0.0, 1.0, -eps, dt0, eps * eps, t_censor, stream);
  double t = ph.elapsed;
  if (diag) {
    diag->stage1_duration = ph.elapsed;
    diag->v_at_stage1_end = ph.v;
  }
  if (ph.kind == PhaseEnd::kTimeOut) {
    out.tau = t_censor;
    return out;
  }
  double u;
  if (ph.kind == PhaseEnd::kBarrierHit) {
    double dur = std::max(0.0, ph.v / eps);  // V descends at rate eps
    if (t + dur >= t_censor) {
      out.tau = t_censor;
      return out;
    }
    t += dur;
    u = -eps;
  } else {
    u = ph.u;  // V returned to 0 first; synchronous stage is trivial
  }
  if (diag) {
    diag->s1 = t;
    diag->u_at_s1 = u;
  }
  if (u == 0.0) {
    out.coupled = true;
    out.tau = t;
    return out;
  }
  CouplingOutcome sub = simulate_bck(u, dt0, t_censor - t, stream, opts);
  out.coupled = sub.coupled;
  out.tau = sub.coupled ? t + sub.tau : t_censor;
  if (opts.record_cycles) {
    out.half_cycle_times.push_back(t);
    for (double s : sub.half_cycle_times) out.half_cycle_times.push_back(t + s);
  }
  return out;
}

}  // namespace kolcouple
