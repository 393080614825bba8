#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "netmin/gp.hpp"

using namespace netmin;
using namespace netmin::gp;

namespace {

// minimize e^{y0} s.t. y0 >= ln 2, encoded as -y0 <= -ln 2, plus a loose
// ceiling so the barrier has a bounded domain.
LogConvexProgram active_bound_program() {
  LogConvexProgram p;
  const int y0 = p.add_var("y0", VarRole::auxiliary);
  p.objective_terms.push_back(LogAffine{}.add(y0, 1.0));
  LseConstraint lower;
  lower.terms.push_back(LogAffine{}.add(y0, -1.0));
  lower.bound = -std::log(2.0);
  p.constraints.push_back(lower);
  LseConstraint upper;
  upper.terms.push_back(LogAffine{}.add(y0, 1.0));
  upper.bound = 50.0;
  p.constraints.push_back(upper);
  return p;
}

LogConvexProgram symmetric_two_var_program() {
  LogConvexProgram p;
  const int y0 = p.add_var("y0", VarRole::auxiliary);
  const int y1 = p.add_var("y1", VarRole::auxiliary);
  p.objective_terms.push_back(LogAffine{}.add(y0, 1.0));
  p.objective_terms.push_back(LogAffine{}.add(y1, 1.0));
  LseConstraint c;
  c.terms.push_back(LogAffine{}.add(y0, -1.0));
  c.terms.push_back(LogAffine{}.add(y1, -1.0));
  c.bound = 0.0;
  p.constraints.push_back(c);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("gp");

TEST_CASE("evaluate_constraint") {
  Eigen::VectorXd y(2);
  y << std::log(2.0), std::log(3.0);

  LseConstraint single;
  single.terms.push_back(LogAffine{});
  single.bound = 0.0;
  CHECK(evaluate_constraint(single, y) == doctest::Approx(0.0));

  LseConstraint two_const;
  two_const.terms.push_back(LogAffine{});
  two_const.terms.push_back(LogAffine{});
  two_const.bound = 0.0;
  CHECK(evaluate_constraint(two_const, y) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  LseConstraint sum;
  sum.terms.push_back(LogAffine{}.add(0, 1.0));
  sum.terms.push_back(LogAffine{}.add(1, 1.0));
  sum.bound = std::log(6.0);
  CHECK(evaluate_constraint(sum, y) ==
        doctest::Approx(std::log(5.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("evaluate_constraint is overflow safe") {
  LseConstraint c;
  c.terms.push_back(LogAffine(700.0).add(0, 1.0));
  c.terms.push_back(LogAffine(-700.0).add(0, 1.0));
  c.bound = 0.0;
  Eigen::VectorXd y(1);
  y << 700.0;
  const double r = evaluate_constraint(c, y);
  CHECK(std::isfinite(r));
  CHECK(r == doctest::Approx(1400.0).epsilon(1e-12));
}

TEST_CASE("phase_one finds interior points and detects infeasibility") {
  SolverOptions opts;
  {
    LogConvexProgram p;
    const int y0 = p.add_var("y0", VarRole::auxiliary);
    LseConstraint c;
    c.terms.push_back(LogAffine{}.add(y0, 1.0));
    c.bound = -1.0;
    p.constraints.push_back(c);
    const PhaseOneResult r = phase_one(p, opts);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.y(0) < -1.0);
  }
  {
    LogConvexProgram p;
    const int y0 = p.add_var("y0", VarRole::auxiliary);
    LseConstraint c1;
    c1.terms.push_back(LogAffine{}.add(y0, 1.0));
    c1.bound = -1.0;
    LseConstraint c2;
    c2.terms.push_back(LogAffine{}.add(y0, -1.0));
    c2.bound = -1.0;  // y0 <= -1 and y0 >= 1: empty
    p.constraints.push_back(c1);
    p.constraints.push_back(c2);
    const PhaseOneResult r = phase_one(p, opts);
    CHECK(r.status == SolveStatus::infeasible);
  }
}

TEST_CASE("solve: active bound") {
  const LogConvexProgram p = active_bound_program();
  const SolveOutput out = solve(p);
  REQUIRE(out.diag.status == SolveStatus::optimal);
  CHECK(out.y(0) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(out.objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("solve: symmetric coupling") {
  const LogConvexProgram p = symmetric_two_var_program();
  const SolveOutput out = solve(p);
  REQUIRE(out.diag.status == SolveStatus::optimal);
  CHECK(out.y(0) == doctest::Approx(std::log(2.0)).epsilon(1e-5));
  CHECK(out.y(1) == doctest::Approx(std::log(2.0)).epsilon(1e-5));
  CHECK(out.objective == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("solve: stage objectives are non-increasing") {
  const LogConvexProgram p = symmetric_two_var_program();
  const SolveOutput out = solve(p);
  REQUIRE(out.diag.status == SolveStatus::optimal);
  REQUIRE(out.diag.stage_objectives.size() > 1);
  for (std::size_t k = 1; k < out.diag.stage_objectives.size(); ++k) {
    CHECK(out.diag.stage_objectives[k] <=
          out.diag.stage_objectives[k - 1] + 1e-9);
  }
}

TEST_CASE("solve: determinism") {
  const LogConvexProgram p = symmetric_two_var_program();
  const SolveOutput a = solve(p);
  const SolveOutput b = solve(p);
  CHECK(a.diag.newton_iters == b.diag.newton_iters);
  CHECK(a.objective == b.objective);
  CHECK((a.y - b.y).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("solve: invariance to variable order") {
  // Same symmetric problem with the variable roles swapped.
  LogConvexProgram p;
  const int y1 = p.add_var("y1", VarRole::auxiliary);
  const int y0 = p.add_var("y0", VarRole::auxiliary);
  p.objective_terms.push_back(LogAffine{}.add(y1, 1.0));
  p.objective_terms.push_back(LogAffine{}.add(y0, 1.0));
  LseConstraint c;
  c.terms.push_back(LogAffine{}.add(y1, -1.0));
  c.terms.push_back(LogAffine{}.add(y0, -1.0));
  c.bound = 0.0;
  p.constraints.push_back(c);
  const SolveOutput swapped = solve(p);
  const SolveOutput base = solve(symmetric_two_var_program());
  CHECK(swapped.objective == doctest::Approx(base.objective).epsilon(1e-8));
}

TEST_CASE("solve: invariance to common additive rescale of a constraint") {
  LogConvexProgram p = symmetric_two_var_program();
  for (auto& term : p.constraints[0].terms) term.constant += 3.7;
  p.constraints[0].bound += 3.7;
  const SolveOutput shifted = solve(p);
  const SolveOutput base = solve(symmetric_two_var_program());
  CHECK(shifted.objective == doctest::Approx(base.objective).epsilon(1e-8));
}

TEST_CASE("kkt_report") {
  const LogConvexProgram p = active_bound_program();
  const SolveOutput out = solve(p);
  REQUIRE(out.diag.status == SolveStatus::optimal);

  const KktReport rep = kkt_report(p, out.y, out.diag.barrier_t);
  CHECK(rep.stationarity_norm <= 1e-5);
  // active lower bound: gradient 2 against coefficient -1 -> multiplier 2
  CHECK(rep.multipliers(0) == doctest::Approx(2.0).epsilon(1e-4));

  Eigen::VectorXd nudged = out.y;
  nudged(0) += 0.1;
  const KktReport worse = kkt_report(p, nudged, out.diag.barrier_t);
  CHECK(worse.stationarity_norm > rep.stationarity_norm);
}

TEST_CASE("dump_json mentions every variable") {
  const LogConvexProgram p = symmetric_two_var_program();
  const std::string dump = dump_json(p);
  CHECK(dump.find("y0") != std::string::npos);
  CHECK(dump.find("constraints") != std::string::npos);
}

TEST_SUITE_END();
