#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netmin/scenario.hpp"

namespace netmin::gp {

/// Affine function c + sum_k a_k * y_{i_k} over the log-variable vector,
/// stored sparsely as (index, coefficient) pairs.
struct LogAffine {
  std::vector<std::pair<int, double>> coeffs;
  double constant = 0.0;

  LogAffine() = default;
  explicit LogAffine(double c) : constant(c) {}

  LogAffine& add(int var, double coeff) {
    coeffs.emplace_back(var, coeff);
    return *this;
  }

  double value(const Eigen::VectorXd& y) const {
    double v = constant;
    for (const auto& [idx, c] : coeffs) v += c * y(idx);
    return v;
  }
};

/// log sum_t exp(term_t(y)) <= bound. A single term reduces to an affine
/// inequality.
struct LseConstraint {
  std::vector<LogAffine> terms;
  double bound = 0.0;
  std::string label;
};

enum class VarRole { power, allocation, assignment, auxiliary };

struct VarInfo {
  std::string name;
  VarRole role = VarRole::auxiliary;
};

/// Convex program in log variables: minimize sum_t exp(obj_t(y)) subject to
/// log-sum-exp constraints. Immutable once assembled; solves are reentrant.
struct LogConvexProgram {
  int num_vars = 0;
  std::vector<LogAffine> objective_terms;
  std::vector<LseConstraint> constraints;
  std::vector<VarInfo> vars;

  int add_var(std::string name, VarRole role) {
    vars.push_back({std::move(name), role});
    return num_vars++;
  }
};

struct SolverOptions {
  double tol = 1e-8;             // duality-measure target (#constraints / t)
  int max_newton_iters = 200;    // per centering stage
  double barrier_growth = 10.0;  // outer multiplier on t
  double initial_t = 1.0;
  double ls_alpha = 0.25;        // backtracking sufficient-decrease fraction
  double ls_beta = 0.5;          // backtracking shrink factor
  double big_m = 1e6;            // constraint-deactivation offset
};

struct SolveOutput {
  Eigen::VectorXd y;
  double objective = 0.0;
  SolveDiagnostics diag;
};

struct PhaseOneResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd y;          // strictly feasible when status == optimal
  double slack = 0.0;         // final max residual bound
  int newton_iters = 0;
  std::string message;
};

/// Stationarity and complementarity residuals of the barrier KKT system.
struct KktReport {
  double stationarity_norm = 0.0;     // ||grad F0 + sum lambda_k grad r_k||_inf
  double complementarity_norm = 0.0;  // max_k lambda_k * (-r_k)
  Eigen::VectorXd multipliers;
};

// Residual value(c, y) - bound via max-shifted log-sum-exp; <= 0 means
// satisfied. Safe for term magnitudes up to ~1e300.
double evaluate_constraint(const LseConstraint& c, const Eigen::VectorXd& y);

// Largest constraint residual at y.
double max_residual(const LogConvexProgram& p, const Eigen::VectorXd& y);

// Locates a strictly feasible point by minimizing an auxiliary slack bound
// shared by all constraints. Deterministic; distinguishes infeasibility
// from iteration-limit exhaustion.
PhaseOneResult phase_one(const LogConvexProgram& p, const SolverOptions& opts);

// Barrier path-following with damped Newton centering. Runs phase_one first
// unless a strictly feasible warm start is supplied.
SolveOutput solve(const LogConvexProgram& p, const SolverOptions& opts = {},
                  const std::optional<Eigen::VectorXd>& warm_start = {});

// KKT residuals with multipliers 1/(t * (-r_k)) recovered from the final
// barrier parameter. Requires y strictly feasible.
KktReport kkt_report(const LogConvexProgram& p, const Eigen::VectorXd& y,
                     double barrier_t);

// Objective sum_t exp(obj_t(y)).
double objective_value(const LogConvexProgram& p, const Eigen::VectorXd& y);

// Debug dump of the whole program (terms, bounds, variable names) as JSON
// text, for cross-checking against external solvers.
std::string dump_json(const LogConvexProgram& p);

}  // namespace netmin::gp
