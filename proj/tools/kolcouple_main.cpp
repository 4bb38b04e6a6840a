// kolcouple - coupling experiments for the Kolmogorov diffusion
// (Brownian motion with iterated time integrals).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "kolcouple/area_law.hpp"
#include "kolcouple/experiment.hpp"
#include "kolcouple/lookahead.hpp"
#include "kolcouple/path.hpp"
#include "kolcouple/reflection_coupling.hpp"

using namespace kolcouple;

namespace {

int default_threads() {
  if (const char* env = std::getenv("KOLCOUPLE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// 17 significant digits, row-major
void print_matrix_json(std::FILE* f, const char* name, const Matrix& m, bool last) {
  std::fprintf(f, "  \"%s\": [", name);
  for (int a = 0; a < m.rows(); ++a) {
    std::fprintf(f, "[");
    for (int b = 0; b < m.cols(); ++b)
      std::fprintf(f, "%.17g%s", m(a, b), b + 1 < m.cols() ? ", " : "");
    std::fprintf(f, "]%s", a + 1 < m.rows() ? ", " : "");
  }
  std::fprintf(f, "]%s\n", last ? "" : ",");
}

nlohmann::json config_from_cli(const std::string& kind, int k,
                               const std::vector<double>& z, double scale,
                               double dt0, double t_max, double target_t,
                               double alpha, int n_max, long reps,
                               std::uint64_t seed, const std::string& mode) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = kind;
  j["model"] = {{"k", k}, {"scale", scale}};
  if (!z.empty()) j["model"]["z"] = z;
  j["numerics"] = {{"dt0", dt0}, {"t_max", t_max}, {"n_max", n_max},
                   {"target_t", target_t}};
  j["sampling"] = {{"replicates", reps}, {"master_seed", seed}};
  j["schedule"] = {{"alpha", alpha}};
  (void)mode;
  return j;
}

int run_from_json(const nlohmann::json& j, long reps_override, int threads,
                  const std::string& out_override, bool check) {
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  nlohmann::json doc = j;
  if (reps_override > 0) doc["sampling"]["replicates"] = reps_override;
  if (!parse_config(doc, &cfg, &errors)) {
    std::fprintf(stderr, "config error:\n");
    for (const auto& e : errors) std::fprintf(stderr, "  - %s\n", e.c_str());
    return 2;
  }
  if (!out_override.empty()) cfg.output = out_override;
  ExperimentReport rep = run_experiment(cfg, threads);
  if (!cfg.output.empty()) {
    write_curve_csv(cfg, rep, cfg.output);
    write_report(rep, cfg.output + ".report.json");
  } else {
    std::puts(rep.json.dump(2).c_str());
  }
  if (rep.has_fit)
    std::fprintf(stderr, "fit: slope %.6f +- %.6f over [%g, %g] (%d points)\n",
                 rep.fit.slope, rep.fit.stderr_slope, rep.fit.window_lo,
                 rep.fit.window_hi, rep.fit.n_points);
  if (check && rep.check_performed && !rep.check_passed) {
    std::fprintf(stderr, "acceptance check failed\n");
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupling experiments for the Kolmogorov diffusion"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = default_threads();
  app.add_option("--threads", threads, "worker thread count (results never depend on it)");

  // run --config cfg.json
  auto* run = app.add_subcommand("run", "run a config-driven experiment");
  std::string config_path, out_path;
  long reps_override = 0;
  bool check = false;
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--reps-override", reps_override, "override sampling.replicates");
  run->add_option("--out", out_path, "override output CSV path");
  run->add_flag("--check", check, "exit 3 if the configured check fails");

  // dump-kernel --k
  auto* dump = app.add_subcommand("dump-kernel", "emit H, V, L as JSON");
  int dump_k = 1;
  std::string dump_out;
  dump->add_option("--k", dump_k, "diffusion index")->required();
  dump->add_option("--out", dump_out, "output path (default stdout)");

  // dump-path
  auto* dpath = app.add_subcommand("dump-path", "Euler path dump to CSV (t, I0..Ik)");
  int path_k = 1;
  double path_T = 1.0, path_dt = 1e-3;
  std::uint64_t path_seed = 1;
  std::string path_out = "path.csv";
  std::vector<double> path_x0;
  dpath->add_option("--k", path_k);
  dpath->add_option("--T", path_T);
  dpath->add_option("--dt", path_dt);
  dpath->add_option("--seed", path_seed);
  dpath->add_option("--x0", path_x0, "start state (defaults to 0)");
  dpath->add_option("--out", path_out);

  // oracle-area --a --t
  auto* oracle = app.add_subcommand("oracle-area", "area-law density and tail");
  double area_a = 0.75, area_t = 1.0;
  oracle->add_option("--a", area_a)->required();
  oracle->add_option("--t", area_t)->required();

  // simulate-bck
  auto* bck = app.add_subcommand("simulate-bck", "half-cycle reflection coupling");
  double bck_scale = 1.0, bck_dt0 = 1e-3, bck_tmax = 1000.0;
  long bck_reps = 10000;
  std::uint64_t bck_seed = 1;
  std::string bck_out = "curve.csv";
  bck->add_option("--scale", bck_scale);
  bck->add_option("--dt0", bck_dt0);
  bck->add_option("--tmax", bck_tmax);
  bck->add_option("--reps", bck_reps);
  bck->add_option("--seed", bck_seed);
  bck->add_option("--out", bck_out);

  // simulate-mu-t
  auto* mut = app.add_subcommand("simulate-mu-t", "per-target coupling from (0,1)");
  double mut_target = 100.0, mut_dt0 = 1e-3;
  long mut_reps = 10000;
  std::uint64_t mut_seed = 1;
  std::string mut_out = "curve.csv";
  mut->add_option("--target", mut_target)->required();
  mut->add_option("--dt0", mut_dt0);
  mut->add_option("--reps", mut_reps);
  mut->add_option("--seed", mut_seed);
  mut->add_option("--out", mut_out);

  // simulate-lookahead
  auto* look = app.add_subcommand("simulate-lookahead", "finite-look-ahead coupling");
  int look_k = 1, look_nmax = 30;
  double look_alpha = 2.0;
  long look_reps = 10000;
  std::uint64_t look_seed = 1;
  std::vector<double> look_z;
  std::string look_mode = "scalar", look_out = "curve.csv";
  look->add_option("--k", look_k);
  look->add_option("--z", look_z, "discrepancy vector (k+1 entries)")->required();
  look->add_option("--alpha", look_alpha);
  look->add_option("--nmax", look_nmax);
  look->add_option("--reps", look_reps);
  look->add_option("--seed", look_seed);
  look->add_option("--mode", look_mode, "scalar|paths");
  look->add_option("--out", look_out);

  // bounded-horizon
  auto* bh = app.add_subcommand("bounded-horizon", "unit-block look-ahead variant");
  int bh_k = 1, bh_nmax = 10000;
  long bh_reps = 10000;
  std::uint64_t bh_seed = 1;
  std::vector<double> bh_z;
  std::string bh_out;
  bh->add_option("--k", bh_k);
  bh->add_option("--z", bh_z)->required();
  bh->add_option("--nmax", bh_nmax);
  bh->add_option("--reps", bh_reps);
  bh->add_option("--seed", bh_seed);
  bh->add_option("--out", bh_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::ifstream in(config_path);
      if (!in) {
        std::fprintf(stderr, "config error:\n  - cannot open %s\n", config_path.c_str());
        return 2;
      }
      nlohmann::json j;
      try {
        in >> j;
      } catch (const std::exception& e) {
        std::fprintf(stderr, "config error:\n  - invalid JSON: %s\n", e.what());
        return 2;
      }
      return run_from_json(j, reps_override, threads, out_path, check);
    }
    if (*dump) {
      TransitionKernel kernel(dump_k);
      std::FILE* f = dump_out.empty() ? stdout : std::fopen(dump_out.c_str(), "w");
      if (!f) throw std::runtime_error("cannot open " + dump_out);
      std::fprintf(f, "{\n  \"k\": %d,\n", dump_k);
      print_matrix_json(f, "H", kernel.structure(), false);
      print_matrix_json(f, "V", kernel.covariance_unit(), false);
      print_matrix_json(f, "L", kernel.cholesky(), true);
      std::fprintf(f, "}\n");
      if (f != stdout) std::fclose(f);
      return 0;
    }
    if (*dpath) {
      TransitionKernel kernel(path_k);
      Vector x0 = Vector::Zero(path_k + 1);
      for (std::size_t i = 0; i < path_x0.size() && i < static_cast<std::size_t>(path_k + 1); ++i)
        x0(i) = path_x0[i];
      NoiseStream stream(path_seed, 0);
      PathSample path = simulate_path_euler(kernel, x0, path_T, path_dt, stream);
      write_path_csv(path, path_out);
      return 0;
    }
    if (*oracle) {
      AreaLaw law(area_a);
      std::printf("density %.15g\ntail %.15g\n", law.density(area_t), law.tail(area_t));
      return 0;
    }
    if (*bck) {
      auto j = config_from_cli("bck", 1, {}, bck_scale, bck_dt0, bck_tmax, 0.0, 2.0,
                               30, bck_reps, bck_seed, "");
      return run_from_json(j, 0, threads, bck_out, false);
    }
    if (*mut) {
      auto j = config_from_cli("mu_t", 1, {}, 1.0, mut_dt0, 2.0 * mut_target,
                               mut_target, 2.0, 30, mut_reps, mut_seed, "");
      return run_from_json(j, 0, threads, mut_out, false);
    }
    if (*look) {
      std::string kind = look_mode == "paths" ? "lookahead_paths" : "lookahead_scalar";
      auto j = config_from_cli(kind, look_k, look_z, 1.0, 1e-3, 1000.0, 0.0,
                               look_alpha, look_nmax, look_reps, look_seed, look_mode);
      if (kind == "lookahead_paths") j["numerics"]["n_blocks"] = look_nmax;
      return run_from_json(j, 0, threads, look_out, false);
    }
    if (*bh) {
      auto j = config_from_cli("bounded_horizon", bh_k, bh_z, 1.0, 1e-3, 1000.0, 0.0,
                               2.0, bh_nmax, bh_reps, bh_seed, "");
      int rc = run_from_json(j, 0, threads, bh_out, false);
      return rc;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
