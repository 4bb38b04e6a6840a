#include "kolcouple/path.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace kolcouple {

Vector exact_transition(const TransitionKernel& kernel, const Vector& x, double h,
                        NormalSource& noise) {
  if (h <= 0.0) throw std::invalid_argument("exact_transition: h must be positive");
  if (x.size() != kernel.dim())
    throw std::invalid_argument("exact_transition: bad state size");
  Vector xi(kernel.dim());
  for (int i = 0; i < kernel.dim(); ++i) xi(i) = noise.normal();
  Vector d = kernel.scaling(h);
  return kernel.flow(h) * x +
         std::sqrt(h) * (d.asDiagonal() * (kernel.cholesky() * xi));
}

PathSample simulate_path_euler(const TransitionKernel& kernel, const Vector& x,
                               double T, double dt, NormalSource& noise) {
  if (T <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("simulate_path_euler: T and dt must be positive");
  if (x.size() != kernel.dim())
    throw std::invalid_argument("simulate_path_euler: bad state size");
  const int n_steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  PathSample path;
  path.times.reserve(n_steps + 1);
  path.states.reserve(n_steps + 1);
  path.times.push_back(0.0);
  path.states.push_back(x);
  Vector cur = x;
  double t = 0.0;
  for (int s = 0; s < n_steps; ++s) {
    double step = std::min(dt, T - t);
    Vector next = cur;
    next(0) = cur(0) + std::sqrt(step) * noise.normal();
    for (int r = 1; r < kernel.dim(); ++r)
      next(r) = cur(r) + 0.5 * (cur(r - 1) + next(r - 1)) * step;
    t += step;
    cur = next;
    path.times.push_back(t);
    path.states.push_back(cur);
  }
  return path;
}

void write_path_csv(const PathSample& path, const std::string& filename) {
  std::FILE* f = std::fopen(filename.c_str(), "w");
  if (!f) throw std::runtime_error("write_path_csv: cannot open " + filename);
  const int dim = path.states.empty() ? 0 : static_cast<int>(path.states[0].size());
  std::fprintf(f, "t");
  for (int r = 0; r < dim; ++r) std::fprintf(f, ",I%d", r);
  std::fprintf(f, "\n");
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    std::fprintf(f, "%.17g", path.times[i]);
    for (int r = 0; r < dim; ++r) std::fprintf(f, ",%.17g", path.states[i](r));
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

}  // namespace kolcouple
