#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kolcouple/survival.hpp"

namespace kolcouple {

// A fully validated experiment description. Everything that affects results
// lives here; thread count never does.
struct ExperimentConfig {
  int schema_version = 1;
  std::string kind;  // bck | mu_t | lookahead_scalar | lookahead_paths |
                     // bounded_horizon | tv_table | hyperplane_check

  // model
  int k = 1;
  std::vector<double> z;   // discrepancy (z == x1 - x2 when x1/x2 given)
  std::vector<double> x1, x2;
  double scale = 1.0;

  // numerics
  double dt0 = 1e-3;
  double t_max = 1000.0;
  double t_min = 0.0;  // 0 = auto (t_max * 1e-4)
  int n_max = 30;
  int K = 1024;
  int grid_per_block = 64;
  int n_blocks = 5;

  // sampling
  long replicates = 1000;
  std::uint64_t master_seed = 1;

  // schedule
  double alpha = 2.0;

  // derived experiment knobs
  double target_t = 100.0;    // mu_t
  int grid_points = 48;
  std::vector<double> time_grid;  // optional explicit grid
  double fit_lo = 0.0, fit_hi = 0.0;  // 0 = default window rule

  bool has_check = false;
  double check_slope = 0.0;
  double check_tol = 0.0;

  std::string output;  // curve CSV path ("" = none)

  nlohmann::json raw;  // original config document, echoed into reports
};

// Parses and validates. On failure returns false and fills `errors` with one
// entry per violated field.
bool parse_config(const nlohmann::json& j, ExperimentConfig* out,
                  std::vector<std::string>* errors);

struct ExperimentReport {
  nlohmann::json json;   // config echo, build id, curve, fit, extras
  SurvivalCurve curve;
  bool has_fit = false;
  RateFit fit;
  bool check_performed = false;
  bool check_passed = true;
};

// Runs the configured experiment with `threads` workers; per-replicate
// streams are derived from (master_seed, replicate_index) and merged by
// index, so the result is identical for any parallelism degree.
ExperimentReport run_experiment(const ExperimentConfig& cfg, int threads);

void write_report(const ExperimentReport& report, const std::string& path);
void write_curve_csv(const ExperimentConfig& cfg, const ExperimentReport& report,
                     const std::string& path);

const char* build_id();

// Work-stealing loop over replicate indices 0..n-1.
void parallel_replicates(long n, int threads, const std::function<void(long)>& body);

}  // namespace kolcouple
