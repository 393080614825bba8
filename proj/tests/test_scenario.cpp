#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "netmin/scenario.hpp"

using namespace netmin;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("db_to_linear") {
  CHECK(db_to_linear(0.0) == doctest::Approx(1.0));
  CHECK(db_to_linear(-100.0) == doctest::Approx(1.0e-10).epsilon(1e-12));
  CHECK(db_to_linear(-94.0) == doctest::Approx(3.9811e-10).epsilon(1e-4));
  CHECK(db_to_linear(-94.0) ==
        doctest::Approx(3.9810717055349694e-10).epsilon(1e-14));
  CHECK(linear_to_db(db_to_linear(-37.5)) == doctest::Approx(-37.5));
}

TEST_CASE("sinr basic values") {
  {
    Eigen::VectorXd p(1), g(1);
    p << 1.0;
    g << 0.5;
    CHECK(sinr(p, g, 0.1, 0) == doctest::Approx(5.0));
  }
  {
    Eigen::VectorXd p(2), g(2);
    p << 1.0, 1.0;
    g << 1.0, 1.0;
    CHECK(sinr(p, g, 1e-15, 0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  {
    Eigen::VectorXd p(2), g(2);
    p << 0.1, 0.2;
    g << 1e-6, 2e-6;
    CHECK(sinr(p, g, 1e-8, 0) == doctest::Approx(0.24390).epsilon(1e-4));
  }
  {
    Eigen::VectorXd p(2), g(2);
    p << 0.1, 0.2;
    g << 1e-6, 2e-6;
    CHECK_THROWS_AS(sinr(p, g, 1e-8, 2), std::out_of_range);
  }
}

TEST_CASE("sinr monotonicity and scaling invariance") {
  Eigen::VectorXd p(3), g(3);
  p << 0.2, 0.1, 0.05;
  g << 1e-9, 4e-10, 2e-10;
  const double noise = 1e-12;
  const double base = sinr(p, g, noise, 0);

  Eigen::VectorXd p_up = p;
  p_up(0) *= 1.01;
  CHECK(sinr(p_up, g, noise, 0) > base);

  Eigen::VectorXd p_interf = p;
  p_interf(1) *= 1.01;
  CHECK(sinr(p_interf, g, noise, 0) < base);
  CHECK(sinr(p, g, noise * 1.01, 0) < base);

  // common gain/noise rescale leaves the ratio unchanged
  const double c = 37.5;
  CHECK(sinr(p, (g * c).eval(), noise * c, 0) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("user_throughput") {
  Eigen::VectorXd p(1), g(1), bw(1), x(1);
  p << 1.0;
  g << 1.0;
  bw << 1.0;
  Association assoc;
  assoc.serving = Eigen::VectorXi::Zero(1);

  x << 0.0;
  CHECK(user_throughput(x, p, assoc, g, bw, 1e-3, 0) == 0.0);

  // S = 1 at noise 1, bandwidth 1, full allocation -> log2(2) = 1
  x << 1.0;
  CHECK(user_throughput(x, p, assoc, g, bw, 1.0, 0) == doctest::Approx(1.0));

  // x = 0.5, B = 2e7, S = 3 -> 0.5 * 2e7 * 2
  Eigen::VectorXd bw2(1);
  bw2 << 2e7;
  x << 0.5;
  CHECK(user_throughput(x, p, assoc, g, bw2, 1.0 / 3.0, 0) ==
        doctest::Approx(2.0e7).epsilon(1e-9));

  // monotone in x and in serving power
  Eigen::VectorXd x_hi(1);
  x_hi << 0.6;
  CHECK(user_throughput(x_hi, p, assoc, g, bw2, 1.0 / 3.0, 0) >=
        user_throughput(x, p, assoc, g, bw2, 1.0 / 3.0, 0));
  Eigen::VectorXd p_hi(1);
  p_hi << 1.5;
  CHECK(user_throughput(x, p_hi, assoc, g, bw2, 1.0 / 3.0, 0) >=
        user_throughput(x, p, assoc, g, bw2, 1.0 / 3.0, 0));
}

TEST_CASE("check_feasible flags violations") {
  Scenario sc = testing::make_small_scenario(3, 2, 2);
  GainSample gains{sc.mean_gains()};

  SolveResult res;
  res.assoc.serving = Eigen::VectorXi::Zero(2);
  res.power_w = sc.p_max_w;
  res.alloc = Eigen::MatrixXd::Zero(2, 2);
  res.alloc(0, 0) = 0.5;
  res.alloc(1, 0) = 0.5;

  SUBCASE("power cap violation") {
    res.power_w(0) = sc.p_max_w(0) + 1.0;
    const auto rep = check_feasible(res, sc, gains);
    CHECK_FALSE(rep.pass);
    CHECK(rep.power_cap_slack(0) < 0);
  }

  SUBCASE("zero allocation fails every throughput check") {
    res.alloc.setZero();
    const auto rep = check_feasible(res, sc, gains);
    CHECK_FALSE(rep.pass);
    CHECK((rep.throughput_slack.array() < 0).all());
  }
}

TEST_CASE("gen_synthetic") {
  SyntheticConfig cfg;
  cfg.num_users = 4;
  cfg.num_bs = 3;
  cfg.seed = 42;

  const Scenario a = gen_synthetic(cfg);
  const Scenario b = gen_synthetic(cfg);
  CHECK(a.mu_db == b.mu_db);
  CHECK(a.demand_bps == b.demand_bps);
  CHECK(*a.user_pos == *b.user_pos);

  // log-distance value: d = 100 m, exponent 3.5, ref 40 dB -> -110 dB
  const double mu = -(40.0 + 10.0 * 3.5 * std::log10(100.0));
  CHECK(mu == doctest::Approx(-110.0));

  // reference clamp: collocated pair would evaluate log10(d) at d = 1
  SyntheticConfig tiny = cfg;
  tiny.area_m = 1e-6;  // everything collocated within the clamp distance
  const Scenario c = gen_synthetic(tiny);
  CHECK(c.mu_db(0, 0) == doctest::Approx(-tiny.ref_loss_db));

  SyntheticConfig bad = cfg;
  bad.area_m = 0.0;
  CHECK_THROWS_AS(gen_synthetic(bad), std::invalid_argument);
}

TEST_SUITE_END();
