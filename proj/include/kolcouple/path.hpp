#pragma once

#include <vector>

#include "kolcouple/kernel.hpp"
#include "kolcouple/rng.hpp"

namespace kolcouple {

struct PathSample {
  std::vector<double> times;    // strictly increasing, starts at 0
  std::vector<Vector> states;   // one state per grid time, states[0] = start
};

// One exact-in-distribution transition over step h > 0:
//   x' = H(h) x + sqrt(h) D(h) L xi,   xi ~ N(0, I_{k+1}).
Vector exact_transition(const TransitionKernel& kernel, const Vector& x, double h,
                        NormalSource& noise);

// Euler path on a fixed grid: the Brownian coordinate is stepped with
// sqrt(dt) normals and each iterated integral by the trapezoid rule
// I_r += (I_{r-1,old} + I_{r-1,new}) dt / 2.
PathSample simulate_path_euler(const TransitionKernel& kernel, const Vector& x,
                               double T, double dt, NormalSource& noise);

void write_path_csv(const PathSample& path, const std::string& filename);

}  // namespace kolcouple
