#pragma once

#include <cstdint>
#include <optional>

#include "netmin/robust.hpp"

namespace netmin {

/// Problem bundle handed to the association search: fixed-association
/// programs for leaves and per-candidate-pair worst-case gain rows for the
/// relaxation. `box` empty means the deterministic problem.
struct AssocProblem {
  Scenario scenario;
  PiecewiseApprox pw;
  std::optional<UncertaintyBox> box;
  double sigma_scale = 1.0;
  gp::SolverOptions solver;

  gp::LogConvexProgram build_fixed(const Association& assoc) const;
  // Gain row for the throughput constraints of candidate pair (user, bs):
  // serving column at rho_lo, every other column at rho_hi.
  Eigen::VectorXd gain_row(int user, int serving) const;
};

struct BnbOptions {
  std::int64_t node_limit = 100000;
  double rel_gap = 1e-4;
  // Branching is most-fractional, exploration best-bound; both fixed here
  // so results are scheduling-independent.
};

struct BnbResult {
  Association assoc;
  SolveResult result;
  double incumbent = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;  // (incumbent - lower_bound)/|incumbent|
  bool certified = false;
  std::int64_t nodes = 0;
  SolveStatus status = SolveStatus::infeasible;
};

// Each user to its strongest-mean-gain BS; ties to the lowest index.
Association greedy_assoc(const Scenario& scenario);

// Solves every assignment (N^n of them; rejects instances above `limit`)
// and returns the best. Infeasible assignments are skipped; ties resolve to
// the lexicographically smallest assignment. status == infeasible when no
// assignment is feasible.
struct EnumerateResult {
  Association assoc;
  SolveResult result;
  std::int64_t assignments = 0;
  SolveStatus status = SolveStatus::infeasible;
};
EnumerateResult enumerate_assoc(const AssocProblem& prob, std::int64_t limit);

// Branch & bound over the relaxed assignment indicators, which enter the
// throughput constraints linearly as big-M bound offsets. Incumbent starts
// from greedy_assoc; nodes explored best-bound-first; branching on the most
// fractional indicator.
BnbResult branch_and_bound(const AssocProblem& prob, const BnbOptions& opts);

}  // namespace netmin
