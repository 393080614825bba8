#include "netmin/gp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>

namespace netmin::gp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCenterTol = 1e-10;     // Newton decrement^2 / 2 threshold
constexpr double kStrictMargin = -1e-9;  // residual level counted as interior
constexpr double kPhaseOneExit = -1e-6;  // early-exit margin for phase one
constexpr double kMaxStepInf = 50.0;     // per-iteration travel cap (log space)
constexpr int kMaxOuterStages = 200;

struct CompiledTerm {
  double constant = 0.0;
  std::vector<std::pair<int, double>> coeffs;  // local variable indices
};

// Constraint with variable indices remapped to a per-constraint local set so
// gradient/Hessian work happens on small dense blocks.
struct CompiledConstraint {
  std::vector<int> vars;  // local -> global
  std::vector<CompiledTerm> terms;
  double bound = 0.0;
};

struct ConstraintEval {
  double residual = 0.0;
  Eigen::VectorXd grad;       // d residual / d local vars
  Eigen::MatrixXd weighted;   // sum_t w_t a_t a_t^T over local vars
};

CompiledConstraint compile(const LseConstraint& c, int extra_var) {
  if (c.terms.empty())
    throw std::invalid_argument("constraint needs at least one term");
  CompiledConstraint cc;
  cc.bound = c.bound;
  for (const auto& term : c.terms) {
    for (const auto& [idx, coeff] : term.coeffs) {
      (void)coeff;
      cc.vars.push_back(idx);
    }
  }
  if (extra_var >= 0) cc.vars.push_back(extra_var);
  std::sort(cc.vars.begin(), cc.vars.end());
  cc.vars.erase(std::unique(cc.vars.begin(), cc.vars.end()), cc.vars.end());

  auto local_of = [&cc](int global) {
    return static_cast<int>(std::lower_bound(cc.vars.begin(), cc.vars.end(),
                                             global) -
                            cc.vars.begin());
  };
  for (const auto& term : c.terms) {
    CompiledTerm ct;
    ct.constant = term.constant;
    for (const auto& [idx, coeff] : term.coeffs)
      ct.coeffs.emplace_back(local_of(idx), coeff);
    if (extra_var >= 0) ct.coeffs.emplace_back(local_of(extra_var), -1.0);
    cc.terms.push_back(std::move(ct));
  }
  return cc;
}

double residual_only(const CompiledConstraint& cc, const Eigen::VectorXd& y) {
  double vmax = -kInf;
  for (const auto& t : cc.terms) {
    double v = t.constant;
    for (const auto& [l, c] : t.coeffs) v += c * y(cc.vars[l]);
    vmax = std::max(vmax, v);
  }
  double sum = 0.0;
  for (const auto& t : cc.terms) {
    double v = t.constant;
    for (const auto& [l, c] : t.coeffs) v += c * y(cc.vars[l]);
    sum += std::exp(v - vmax);
  }
  return vmax + std::log(sum) - cc.bound;
}

ConstraintEval eval_with_derivs(const CompiledConstraint& cc,
                                const Eigen::VectorXd& y) {
  const int nl = static_cast<int>(cc.vars.size());
  const int nt = static_cast<int>(cc.terms.size());
  Eigen::VectorXd vals(nt);
  for (int t = 0; t < nt; ++t) {
    double v = cc.terms[t].constant;
    for (const auto& [l, c] : cc.terms[t].coeffs) v += c * y(cc.vars[l]);
    vals(t) = v;
  }
  const double vmax = vals.maxCoeff();
  Eigen::VectorXd w = (vals.array() - vmax).exp();
  const double sum = w.sum();
  w /= sum;

  ConstraintEval ev;
  ev.residual = vmax + std::log(sum) - cc.bound;
  ev.grad = Eigen::VectorXd::Zero(nl);
  ev.weighted = Eigen::MatrixXd::Zero(nl, nl);
  for (int t = 0; t < nt; ++t) {
    const auto& coeffs = cc.terms[t].coeffs;
    for (const auto& [l, c] : coeffs) ev.grad(l) += w(t) * c;
    for (const auto& [l1, c1] : coeffs)
      for (const auto& [l2, c2] : coeffs)
        ev.weighted(l1, l2) += w(t) * c1 * c2;
  }
  return ev;
}

// Objective model shared by phase one (linear) and phase two (sum of
// exponentials of affine terms).
struct ObjectiveModel {
  bool linear = false;
  std::vector<LogAffine> exp_terms;
  LogAffine linear_term;

  double value(const Eigen::VectorXd& y) const {
    if (linear) return linear_term.value(y);
    double v = 0.0;
    for (const auto& t : exp_terms) v += std::exp(t.value(y));
    return v;
  }

  void add_scaled_derivs(const Eigen::VectorXd& y, double scale,
                         Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    if (linear) {
      for (const auto& [idx, c] : linear_term.coeffs) grad(idx) += scale * c;
      return;
    }
    for (const auto& t : exp_terms) {
      const double e = scale * std::exp(t.value(y));
      for (const auto& [i1, c1] : t.coeffs) {
        grad(i1) += e * c1;
        for (const auto& [i2, c2] : t.coeffs) hess(i1, i2) += e * c1 * c2;
      }
    }
  }
};

struct BarrierProblem {
  int num_vars = 0;
  std::vector<CompiledConstraint> constraints;
  ObjectiveModel objective;

  double max_residual(const Eigen::VectorXd& y) const {
    double worst = -kInf;
    for (const auto& cc : constraints)
      worst = std::max(worst, residual_only(cc, y));
    return worst;
  }

  // t * F0(y) - sum_k log(-r_k(y)); +inf outside the strict interior.
  double potential(double t, const Eigen::VectorXd& y) const {
    double phi = t * objective.value(y);
    for (const auto& cc : constraints) {
      const double r = residual_only(cc, y);
      if (r >= 0.0) return kInf;
      phi -= std::log(-r);
    }
    return phi;
  }
};

enum class CenterOutcome { converged, early_exit, iteration_limit,
                           numerical_failure };

struct CenterState {
  CenterOutcome outcome = CenterOutcome::numerical_failure;
  int iters = 0;
  std::string message;
};

using StopEarly = std::function<bool(const Eigen::VectorXd&)>;

// Damped Newton on the barrier potential at fixed t. `stop_early`, when
// given, is checked once per iteration (phase one uses it to leave as soon
// as a strictly feasible point appears).
CenterState center(const BarrierProblem& bp, double t, Eigen::VectorXd& y,
                   const SolverOptions& opts,
                   const StopEarly& stop_early = {}) {
  CenterState st;
  const int n = bp.num_vars;
  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);

  for (int iter = 0; iter < opts.max_newton_iters; ++iter) {
    if (stop_early && stop_early(y)) {
      st.outcome = CenterOutcome::early_exit;
      st.iters = iter;
      return st;
    }
    grad.setZero();
    hess.setZero();
    bp.objective.add_scaled_derivs(y, t, grad, hess);

    for (const auto& cc : bp.constraints) {
      const ConstraintEval ev = eval_with_derivs(cc, y);
      if (ev.residual >= 0.0) {
        st.outcome = CenterOutcome::numerical_failure;
        st.message = "iterate left the feasible interior";
        st.iters = iter;
        return st;
      }
      const double inv = 1.0 / (-ev.residual);
      const int nl = static_cast<int>(cc.vars.size());
      for (int l = 0; l < nl; ++l) grad(cc.vars[l]) += inv * ev.grad(l);
      // inv^2 * g g^T + inv * (sum w a a^T - g g^T)
      const Eigen::MatrixXd local =
          (inv * inv - inv) * (ev.grad * ev.grad.transpose()) +
          inv * ev.weighted;
      for (int l1 = 0; l1 < nl; ++l1)
        for (int l2 = 0; l2 < nl; ++l2)
          hess(cc.vars[l1], cc.vars[l2]) += local(l1, l2);
    }

    // Newton step with escalating Tikhonov fallback.
    Eigen::VectorXd step;
    double reg = 0.0;
    for (int attempt = 0; attempt < 24; ++attempt) {
      Eigen::MatrixXd h = hess;
      if (reg > 0.0) h.diagonal().array() += reg;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(-grad);
        if (step.allFinite() && grad.dot(step) < 0.0) break;
      }
      step.resize(0);
      reg = (reg == 0.0) ? 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff())
                         : reg * 100.0;
    }
    if (step.size() == 0) {
      st.outcome = CenterOutcome::numerical_failure;
      st.message = "Newton step failed (singular or non-finite system)";
      st.iters = iter;
      return st;
    }

    const double slope = grad.dot(step);
    // The decrement of t*F0 + barrier scales with t, and so does the noise
    // floor at which it can still be evaluated in doubles.
    const double center_tol = std::max(kCenterTol, 1e-14 * t);
    if (0.5 * -slope <= center_tol) {
      st.outcome = CenterOutcome::converged;
      st.iters = iter;
      return st;
    }

    if (std::getenv("NETMIN_TRACE")) {
      std::fprintf(stderr,
                   "[center t=%.1e iter=%d] dec2=%.3e |step|=%.3e |g|=%.3e\n",
                   t, iter, -slope, step.lpNorm<Eigen::Infinity>(),
                   grad.lpNorm<Eigen::Infinity>());
    }
    const double phi0 = bp.potential(t, y);
    if (!std::isfinite(phi0)) {
      st.outcome = CenterOutcome::numerical_failure;
      st.message = "barrier potential is not finite at the current iterate";
      st.iters = iter;
      return st;
    }
    // Cap travel per iteration; near-linear directions (phase-one slack,
    // big-M relaxations) would otherwise fling the iterate out of floating
    // range in one step.
    const double step_norm = step.lpNorm<Eigen::Infinity>();
    double s = step_norm > kMaxStepInf ? kMaxStepInf / step_norm : 1.0;
    int backtracks = 0;
    bool stalled = false;
    while (bp.potential(t, y + s * step) > phi0 + opts.ls_alpha * s * slope) {
      s *= opts.ls_beta;
      if (++backtracks > 94) {  // ~0.5^94 ~ 5e-29: no progress possible
        stalled = true;
        break;
      }
    }
    if (stalled) {
      // No computable descent left. Near the center that is convergence at
      // the floating-point floor; far from it the solve has genuinely broken.
      if (0.5 * -slope <= 1e-3 * (1.0 + t)) {
        st.outcome = CenterOutcome::converged;
      } else {
        st.outcome = CenterOutcome::numerical_failure;
        st.message = "line search failed to make progress";
      }
      st.iters = iter;
      return st;
    }
    y += s * step;
  }
  st.outcome = CenterOutcome::iteration_limit;
  st.iters = opts.max_newton_iters;
  return st;
}

BarrierProblem compile_program(const LogConvexProgram& p) {
  BarrierProblem bp;
  bp.num_vars = p.num_vars;
  bp.objective.linear = false;
  bp.objective.exp_terms = p.objective_terms;
  bp.constraints.reserve(p.constraints.size());
  for (const auto& c : p.constraints) bp.constraints.push_back(compile(c, -1));
  return bp;
}

}  // namespace

double evaluate_constraint(const LseConstraint& c, const Eigen::VectorXd& y) {
  return residual_only(compile(c, -1), y);
}

double max_residual(const LogConvexProgram& p, const Eigen::VectorXd& y) {
  double worst = -kInf;
  for (const auto& c : p.constraints)
    worst = std::max(worst, evaluate_constraint(c, y));
  return worst;
}

double objective_value(const LogConvexProgram& p, const Eigen::VectorXd& y) {
  double v = 0.0;
  for (const auto& t : p.objective_terms) v += std::exp(t.value(y));
  return v;
}

PhaseOneResult phase_one(const LogConvexProgram& p, const SolverOptions& opts) {
  PhaseOneResult res;
  if (p.constraints.empty()) {
    res.status = SolveStatus::optimal;
    res.y = Eigen::VectorXd::Zero(p.num_vars);
    res.slack = -kInf;
    return res;
  }

  // Augmented problem over (y, s): minimize s subject to r_k(y) <= s,
  // which in LSE form subtracts s from every term.
  BarrierProblem bp;
  bp.num_vars = p.num_vars + 1;
  const int slack_var = p.num_vars;
  bp.objective.linear = true;
  bp.objective.linear_term.add(slack_var, 1.0);
  for (const auto& c : p.constraints)
    bp.constraints.push_back(compile(c, slack_var));

  BarrierProblem plain = compile_program(p);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(bp.num_vars);
  {
    const double worst = plain.max_residual(z.head(p.num_vars));
    z(slack_var) = worst + 1.0;
  }

  const StopEarly feasible_now = [&](const Eigen::VectorXd& z_now) {
    return plain.max_residual(z_now.head(p.num_vars)) <= kPhaseOneExit;
  };

  double t = opts.initial_t;
  const double m = static_cast<double>(bp.constraints.size());
  for (int stage = 0; stage < kMaxOuterStages; ++stage) {
    CenterState st = center(bp, t, z, opts, feasible_now);
    res.newton_iters += st.iters;
    if (std::getenv("NETMIN_TRACE")) {
      std::fprintf(stderr,
                   "[phase1 stage=%d t=%.1e] slack_var=%.6e plain_max_r=%.6e "
                   "iters=%d outcome=%d\n",
                   stage, t, z(slack_var),
                   plain.max_residual(z.head(p.num_vars)), st.iters,
                   static_cast<int>(st.outcome));
    }
    if (st.outcome == CenterOutcome::numerical_failure) {
      res.status = SolveStatus::numerical_failure;
      res.message = "phase one: " + st.message;
      res.y = z.head(p.num_vars);
      return res;
    }
    if (st.outcome == CenterOutcome::early_exit) {
      res.status = SolveStatus::optimal;
      res.y = z.head(p.num_vars);
      res.slack = plain.max_residual(res.y);
      return res;
    }
    // Centered slack minus the duality gap lower-bounds the optimal slack;
    // a positive bound proves there is no feasible point.
    if (st.outcome == CenterOutcome::converged &&
        z(slack_var) - m / t > 0.0) {
      res.status = SolveStatus::infeasible;
      res.slack = z(slack_var) - m / t;
      res.y = z.head(p.num_vars);
      res.message = "phase one: optimal slack is at least " +
                    std::to_string(res.slack);
      return res;
    }
    if (st.outcome == CenterOutcome::iteration_limit) {
      res.status = SolveStatus::iteration_limit;
      res.message = "phase one: Newton iteration limit";
      res.y = z.head(p.num_vars);
      return res;
    }
    if (m / t < opts.tol) break;
    t *= opts.barrier_growth;
  }

  const double worst = plain.max_residual(z.head(p.num_vars));
  res.slack = worst;
  res.y = z.head(p.num_vars);
  if (worst <= kStrictMargin) {
    res.status = SolveStatus::optimal;
  } else {
    res.status = SolveStatus::infeasible;
    res.message = "phase one: optimal slack " + std::to_string(worst) +
                  " is not strictly negative";
  }
  return res;
}

SolveOutput solve(const LogConvexProgram& p, const SolverOptions& opts,
                  const std::optional<Eigen::VectorXd>& warm_start) {
  SolveOutput out;
  out.diag.status = SolveStatus::numerical_failure;

  Eigen::VectorXd y;
  if (warm_start && warm_start->size() == p.num_vars &&
      max_residual(p, *warm_start) <= kStrictMargin) {
    y = *warm_start;
  } else {
    PhaseOneResult ph = phase_one(p, opts);
    out.diag.newton_iters += ph.newton_iters;
    if (ph.status != SolveStatus::optimal) {
      out.diag.status = ph.status;
      out.diag.message = ph.message;
      out.y = ph.y;
      out.objective = objective_value(p, ph.y);
      return out;
    }
    y = ph.y;
  }

  BarrierProblem bp = compile_program(p);
  const double m = static_cast<double>(bp.constraints.size());
  double t = opts.initial_t;

  if (bp.constraints.empty()) {
    out.diag.message = "unconstrained program";
    CenterState st = center(bp, 1.0, y, opts);
    out.diag.newton_iters += st.iters;
    out.diag.status = st.outcome == CenterOutcome::converged
                          ? SolveStatus::optimal
                          : SolveStatus::iteration_limit;
    out.y = y;
    out.objective = objective_value(p, y);
    return out;
  }

  for (int stage = 0; stage < kMaxOuterStages; ++stage) {
    CenterState st = center(bp, t, y, opts);
    out.diag.newton_iters += st.iters;
    out.diag.outer_stages = stage + 1;
    if (st.outcome == CenterOutcome::numerical_failure) {
      out.diag.status = SolveStatus::numerical_failure;
      out.diag.message = st.message;
      break;
    }
    if (st.outcome == CenterOutcome::iteration_limit) {
      out.diag.status = SolveStatus::iteration_limit;
      out.diag.message = "Newton iteration limit during centering";
      break;
    }
    out.diag.stage_objectives.push_back(objective_value(p, y));
    out.diag.barrier_t = t;
    out.diag.duality_measure = m / t;
    if (m / t < opts.tol) {
      out.diag.status = SolveStatus::optimal;
      break;
    }
    // Never push t past what the tolerance needs; the final stages are the
    // worst conditioned ones.
    t = std::min(t * opts.barrier_growth, 1.0001 * m / opts.tol);
  }
  if (out.diag.status == SolveStatus::numerical_failure &&
      out.diag.message.empty()) {
    out.diag.status = SolveStatus::iteration_limit;
    out.diag.message = "outer stage limit reached";
  }

  out.y = y;
  out.objective = objective_value(p, y);
  if (out.diag.status == SolveStatus::optimal) {
    const KktReport kkt = kkt_report(p, y, out.diag.barrier_t);
    out.diag.kkt_stationarity = kkt.stationarity_norm;
    out.diag.kkt_complementarity = kkt.complementarity_norm;
  }
  return out;
}

KktReport kkt_report(const LogConvexProgram& p, const Eigen::VectorXd& y,
                     double barrier_t) {
  if (!(barrier_t > 0.0))
    throw std::invalid_argument("kkt_report: barrier_t must be > 0");
  KktReport rep;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.num_vars);
  for (const auto& term : p.objective_terms) {
    const double e = std::exp(term.value(y));
    for (const auto& [idx, c] : term.coeffs) grad(idx) += e * c;
  }
  rep.multipliers.resize(static_cast<Eigen::Index>(p.constraints.size()));
  double compl_max = 0.0;
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const CompiledConstraint cc = compile(p.constraints[k], -1);
    const ConstraintEval ev = eval_with_derivs(cc, y);
    if (ev.residual >= 0.0)
      throw std::invalid_argument("kkt_report: y is not strictly feasible");
    const double lambda = 1.0 / (barrier_t * -ev.residual);
    rep.multipliers(static_cast<Eigen::Index>(k)) = lambda;
    compl_max = std::max(compl_max, lambda * -ev.residual);
    for (int l = 0; l < static_cast<int>(cc.vars.size()); ++l)
      grad(cc.vars[l]) += lambda * ev.grad(l);
  }
  rep.stationarity_norm = grad.lpNorm<Eigen::Infinity>();
  rep.complementarity_norm = compl_max;
  return rep;
}

std::string dump_json(const LogConvexProgram& p) {
  nlohmann::json j;
  j["num_vars"] = p.num_vars;
  auto affine_to_json = [](const LogAffine& t) {
    nlohmann::json jt;
    jt["constant"] = t.constant;
    jt["coeffs"] = nlohmann::json::object();
    for (const auto& [idx, c] : t.coeffs) jt["coeffs"][std::to_string(idx)] = c;
    return jt;
  };
  j["vars"] = nlohmann::json::array();
  for (const auto& v : p.vars) j["vars"].push_back(v.name);
  j["objective_terms"] = nlohmann::json::array();
  for (const auto& t : p.objective_terms)
    j["objective_terms"].push_back(affine_to_json(t));
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : p.constraints) {
    nlohmann::json jc;
    jc["bound"] = c.bound;
    jc["label"] = c.label;
    jc["terms"] = nlohmann::json::array();
    for (const auto& t : c.terms) jc["terms"].push_back(affine_to_json(t));
    j["constraints"].push_back(jc);
  }
  return j.dump(2);
}

}  // namespace netmin::gp
