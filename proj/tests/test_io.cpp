#include <doctest.h>

#include "common.hpp"
#include "netmin/io.hpp"

using namespace netmin;

TEST_SUITE_BEGIN("io");

TEST_CASE("scenario JSON round-trip is lossless") {
  const Scenario sc = testing::make_bench_scenario(41, 5);
  const std::string text = io::scenario_to_json(sc);
  const Scenario back = io::scenario_from_json(text);
  CHECK(back.num_users == sc.num_users);
  CHECK(back.num_bs == sc.num_bs);
  CHECK(back.mu_db == sc.mu_db);
  CHECK(back.sigma_db == sc.sigma_db);
  CHECK(back.demand_bps == sc.demand_bps);
  CHECK(back.noise_w == sc.noise_w);
  CHECK(*back.user_pos == *sc.user_pos);
  // serializing again reproduces the exact bytes
  CHECK(io::scenario_to_json(back) == text);
}

TEST_CASE("scenario JSON uses the agreed field names") {
  const Scenario sc = testing::make_bench_scenario(43, 3);
  const std::string text = io::scenario_to_json(sc);
  for (const char* key : {"\"n\"", "\"N\"", "\"bandwidth_hz\"", "\"p_max_w\"",
                          "\"noise_w\"", "\"demand_bps\"", "\"mu_db\"",
                          "\"sigma_db\"", "\"positions\""}) {
    CHECK(text.find(key) != std::string::npos);
  }
}

TEST_CASE("result JSON round-trip") {
  SolveResult res;
  res.power_w = Eigen::Vector2d(0.25, 0.5);
  res.alloc = Eigen::MatrixXd::Zero(1, 2);
  res.alloc(0, 1) = 0.75;
  res.assoc.serving = Eigen::VectorXi::Constant(1, 1);
  res.objective_w = 0.75;
  res.diag.status = SolveStatus::optimal;
  res.diag.newton_iters = 42;

  const SolveResult back = io::result_from_json(io::result_to_json(res));
  CHECK(back.power_w == res.power_w);
  CHECK(back.alloc == res.alloc);
  CHECK(back.assoc.serving == res.assoc.serving);
  CHECK(back.objective_w == res.objective_w);
  CHECK(back.diag.status == SolveStatus::optimal);
  CHECK(back.diag.newton_iters == 42);
}

TEST_CASE("approx and box JSON round-trips") {
  const PiecewiseApprox pw = fit_piecewise(4, 0.02, 50.0);
  const PiecewiseApprox pw2 = io::approx_from_json(io::approx_to_json(pw));
  CHECK(pw2.a == pw.a);
  CHECK(pw2.b == pw.b);
  CHECK(pw2.s_min == pw.s_min);
  CHECK(pw2.s_max == pw.s_max);

  const UncertaintyBox box = build_box(2, 3, 0.1, BoxPolicy::one_sided);
  const UncertaintyBox box2 = io::box_from_json(io::box_to_json(box));
  CHECK(box2.rho_lo == box.rho_lo);
  CHECK(box2.rho_hi == box.rho_hi);
  CHECK(box2.policy == box.policy);
  CHECK(box2.target_probability == box.target_probability);
}

TEST_CASE("violation report rendering") {
  mc::ViolationReport rep;
  rep.samples = 100;
  rep.seed = 9;
  rep.user_violation_frac = Eigen::Vector2d(0.25, 0.0);
  rep.user_outside_frac = Eigen::Vector2d(0.5, 0.1);
  rep.overall_violation_frac = 0.125;

  const std::string csv = io::report_to_csv(rep);
  CHECK(csv.find("user_id,violation_pct,outside_box_pct") == 0);
  CHECK(csv.find("0,25,50") != std::string::npos);
  CHECK(csv.find("overall,12.5") != std::string::npos);

  const std::string json = io::report_to_json(rep);
  CHECK(json.find("\"seed\": 9") != std::string::npos);
  CHECK(json.find("\"samples\": 100") != std::string::npos);
}

TEST_SUITE_END();
