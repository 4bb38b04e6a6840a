#include <doctest.h>

#include <cmath>

#include "kolcouple/experiment.hpp"

using namespace kolcouple;
using nlohmann::json;

namespace {

json base_config(const std::string& kind) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = kind;
  j["model"] = {{"k", 1}, {"z", {1.0, 0.0}}, {"scale", 1.0}};
  j["numerics"] = {{"dt0", 1e-3}, {"t_max", 50.0}, {"n_max", 12}};
  j["sampling"] = {{"replicates", 400}, {"master_seed", 7}};
  j["schedule"] = {{"alpha", 2.0}};
  return j;
}

}  // namespace

TEST_CASE("config validation lists every violated field") {
  json j;
  j["kind"] = "nonsense";
  j["numerics"] = {{"dt0", -1.0}};
  j["sampling"] = {{"replicates", 0}};
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  CHECK_FALSE(parse_config(j, &cfg, &errors));
  CHECK(errors.size() >= 3);
  bool saw_kind = false, saw_dt = false, saw_reps = false;
  for (const auto& e : errors) {
    saw_kind |= e.find("kind") != std::string::npos;
    saw_dt |= e.find("dt0") != std::string::npos;
    saw_reps |= e.find("replicates") != std::string::npos;
  }
  CHECK(saw_kind);
  CHECK(saw_dt);
  CHECK(saw_reps);
}

TEST_CASE("config echo and defaults") {
  json j = base_config("bck");
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  CHECK(cfg.raw == j);
  CHECK(cfg.kind == "bck");
  CHECK(cfg.alpha == 2.0);
  CHECK(cfg.K == 1024);
}

TEST_CASE("parallelism does not change results") {
  json j = base_config("bck");
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  ExperimentReport r1 = run_experiment(cfg, 1);
  ExperimentReport r4 = run_experiment(cfg, 4);
  REQUIRE(r1.curve.estimates.size() == r4.curve.estimates.size());
  for (std::size_t i = 0; i < r1.curve.estimates.size(); ++i) {
    CHECK(r1.curve.estimates[i] == r4.curve.estimates[i]);
    CHECK(r1.curve.n_at_risk[i] == r4.curve.n_at_risk[i]);
  }
  CHECK(r1.json["curve"] == r4.json["curve"]);
}

TEST_CASE("replicate aggregation is order independent") {
  // same experiment, merged curve depends only on the outcome set
  json j = base_config("lookahead_scalar");
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  ExperimentReport a = run_experiment(cfg, 2);
  ExperimentReport b = run_experiment(cfg, 3);
  CHECK(a.json["curve"] == b.json["curve"]);
}

TEST_CASE("tv_table closed-form slope check") {
  json j = base_config("tv_table");
  j["model"]["z"] = {0.0, 1.0};
  j["numerics"]["t_min"] = 100.0;
  j["numerics"]["t_max"] = 10000.0;
  j["grid_points"] = 40;
  j["fit_window"] = {100.0, 10000.0};
  j["check"] = {{"slope", -1.5}, {"tol", 1e-3}};
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  ExperimentReport rep = run_experiment(cfg, 1);
  REQUIRE(rep.has_fit);
  CHECK(std::fabs(rep.fit.slope + 1.5) < 1e-3);
  CHECK(rep.check_performed);
  CHECK(rep.check_passed);
}

TEST_CASE("hyperplane check experiment") {
  json j = base_config("hyperplane_check");
  j["model"] = {{"k", 2}};
  j["sampling"] = {{"replicates", 20}, {"master_seed", 3}};
  j["check"] = {{"tol", 1e-9}};
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  ExperimentReport rep = run_experiment(cfg, 1);
  CHECK(rep.json["extras"]["max_relative_density_gap"].get<double>() < 1e-9);
  CHECK(rep.check_passed);
}

TEST_CASE("bounded horizon experiment separates from zero") {
  json j = base_config("bounded_horizon");
  j["numerics"]["n_max"] = 500;
  j["sampling"] = {{"replicates", 4000}, {"master_seed", 11}};
  j["check"] = {{"tol", 1.0}};  // pass condition: 99% CI excludes zero
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  ExperimentReport rep = run_experiment(cfg, 2);
  CHECK(rep.json["extras"]["wilson99_lo"].get<double>() > 0.0);
  CHECK(rep.check_passed);
  // survival is around erf(2/sqrt(2 * 5.21)) ~ 0.62 for this start
  double s = rep.json["extras"]["survival_at_n_max"].get<double>();
  CHECK(s > 0.55);
  CHECK(s < 0.68);
}

TEST_CASE("mu_t experiment extras") {
  json j = base_config("mu_t");
  j["numerics"] = {{"dt0", 1e-3}, {"target_t", 10.0}, {"t_max", 20.0}};
  j["sampling"] = {{"replicates", 2000}, {"master_seed", 5}};
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  ExperimentReport rep = run_experiment(cfg, 2);
  double p = rep.json["extras"]["p_tau_gt_target_plus_1"].get<double>();
  CHECK(p > 0.0);
  CHECK(p < 0.6);
}

TEST_CASE("lookahead_paths experiment consistency extras") {
  json j = base_config("lookahead_paths");
  j["numerics"] = {{"K", 256}, {"n_blocks", 3}, {"grid_per_block", 32}};
  j["sampling"] = {{"replicates", 50}, {"master_seed", 21}};
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  REQUIRE(parse_config(j, &cfg, &errors));
  ExperimentReport rep = run_experiment(cfg, 2);
  double dev = rep.json["extras"]["scalar_consistency_max_dev"].get<double>();
  double budget = rep.json["extras"]["truncation_budget"].get<double>();
  CHECK(dev <= budget);
}
