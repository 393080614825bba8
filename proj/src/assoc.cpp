#include "netmin/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace netmin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegralTol = 1e-6;
}  // namespace

gp::LogConvexProgram AssocProblem::build_fixed(const Association& assoc) const {
  if (box) return build_robust(scenario, pw, *box, assoc, sigma_scale);
  return build_migp(scenario, pw, assoc);
}

Eigen::VectorXd AssocProblem::gain_row(int user, int serving) const {
  Eigen::VectorXd row(scenario.num_bs);
  for (int k = 0; k < scenario.num_bs; ++k) {
    double rho = 0.0;
    if (box) rho = (k == serving) ? box->rho_lo(user, k) : box->rho_hi(user, k);
    row(k) = std::exp(kDbToNat * (scenario.mu_db(user, k) +
                                  rho * sigma_scale *
                                      scenario.sigma_db(user, k)));
  }
  return row;
}

Association greedy_assoc(const Scenario& scenario) {
  Association assoc;
  assoc.serving.resize(scenario.num_users);
  for (int i = 0; i < scenario.num_users; ++i) {
    int best = 0;
    for (int j = 1; j < scenario.num_bs; ++j) {
      if (scenario.mu_db(i, j) > scenario.mu_db(i, best)) best = j;
    }
    assoc.serving(i) = best;
  }
  return assoc;
}

EnumerateResult enumerate_assoc(const AssocProblem& prob, std::int64_t limit) {
  const int n = prob.scenario.num_users;
  const int nbs = prob.scenario.num_bs;
  double total = std::pow(static_cast<double>(nbs), n);
  if (total > static_cast<double>(limit))
    throw std::invalid_argument("enumerate_assoc: N^n exceeds the limit");

  EnumerateResult best;
  best.status = SolveStatus::infeasible;
  double best_obj = kInf;

  Association assoc;
  assoc.serving = Eigen::VectorXi::Zero(n);
  while (true) {
    ++best.assignments;
    const gp::LogConvexProgram p = prob.build_fixed(assoc);
    const gp::SolveOutput out = gp::solve(p, prob.solver);
    if (out.diag.status == SolveStatus::optimal && out.objective < best_obj) {
      best_obj = out.objective;
      best.assoc = assoc;
      best.result = extract_result(p, out, prob.scenario, assoc);
      best.status = SolveStatus::optimal;
    }
    // odometer increment, lexicographic order
    int pos = n - 1;
    while (pos >= 0) {
      if (++assoc.serving(pos) < nbs) break;
      assoc.serving(pos) = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

namespace {

// One search node: per-user candidate BS sets. A user with one candidate is
// fixed.
struct Node {
  std::vector<std::vector<int>> candidates;
  double bound = -kInf;
  // Relaxed indicator values keyed (user, bs) for branching.
  std::vector<std::tuple<int, int, double>> frac;
  std::int64_t id = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

bool all_fixed(const Node& node) {
  return std::all_of(node.candidates.begin(), node.candidates.end(),
                     [](const auto& c) { return c.size() == 1; });
}

Association fixed_assoc(const Node& node) {
  Association assoc;
  assoc.serving.resize(static_cast<int>(node.candidates.size()));
  for (std::size_t i = 0; i < node.candidates.size(); ++i)
    assoc.serving(static_cast<int>(i)) = node.candidates[i][0];
  return assoc;
}

// Relaxation over (q, u, z): fixed users contribute plain constraints;
// open users get one allocation variable per candidate plus relaxed
// indicators on the probability simplex (last candidate substituted out so
// the equality never enters the program).
struct Relaxation {
  gp::LogConvexProgram program;
  // (user, bs) -> z variable; the last candidate of each user is implied.
  std::vector<std::tuple<int, int, int>> z_vars;
  std::vector<std::vector<int>> u_vars;  // per user, per candidate position
};

Relaxation build_relaxation(const AssocProblem& prob, const Node& node) {
  const Scenario& sc = prob.scenario;
  const PiecewiseApprox& pw = prob.pw;
  const int n = sc.num_users;
  const int nbs = sc.num_bs;
  const double big_m = prob.solver.big_m;

  Relaxation rel;
  gp::LogConvexProgram& p = rel.program;

  std::vector<int> q_var(nbs);
  for (int j = 0; j < nbs; ++j)
    q_var[j] = p.add_var("q" + std::to_string(j), gp::VarRole::power);

  rel.u_vars.resize(n);
  std::vector<std::vector<int>> z_of(n);  // parallel to candidates, -1 = last
  for (int i = 0; i < n; ++i) {
    const auto& cand = node.candidates[i];
    for (int c = 0; c < static_cast<int>(cand.size()); ++c) {
      rel.u_vars[i].push_back(
          p.add_var("u" + std::to_string(i) + "_" + std::to_string(cand[c]),
                    gp::VarRole::allocation));
    }
    z_of[i].assign(cand.size(), -1);
    if (cand.size() > 1) {
      for (int c = 0; c + 1 < static_cast<int>(cand.size()); ++c) {
        const int zv =
            p.add_var("z" + std::to_string(i) + "_" + std::to_string(cand[c]),
                      gp::VarRole::assignment);
        z_of[i][c] = zv;
        rel.z_vars.emplace_back(i, cand[c], zv);
      }
    }
  }

  for (int j = 0; j < nbs; ++j) {
    gp::LseConstraint cap;
    cap.terms.push_back(gp::LogAffine{}.add(q_var[j], 1.0));
    cap.bound = std::log(sc.p_max_w(j));
    p.constraints.push_back(std::move(cap));
    gp::LseConstraint floor;
    floor.terms.push_back(gp::LogAffine{}.add(q_var[j], -1.0));
    floor.bound = -kLogPowerFloor;
    p.constraints.push_back(std::move(floor));
  }

  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < static_cast<int>(node.candidates[i].size()); ++c) {
      gp::LseConstraint ub;
      ub.terms.push_back(gp::LogAffine{}.add(rel.u_vars[i][c], 1.0));
      ub.bound = 0.0;
      p.constraints.push_back(std::move(ub));
      gp::LseConstraint lb;
      lb.terms.push_back(gp::LogAffine{}.add(rel.u_vars[i][c], -1.0));
      lb.bound = -kLogAllocFloor;
      p.constraints.push_back(std::move(lb));
    }
    // Simplex box for the free indicators: z >= 0 each, sum z <= 1.
    if (node.candidates[i].size() > 1) {
      gp::LogAffine sum_term(0.0);
      for (int c = 0; c + 1 < static_cast<int>(node.candidates[i].size());
           ++c) {
        gp::LseConstraint nonneg;
        nonneg.terms.push_back(gp::LogAffine{}.add(z_of[i][c], -1.0));
        nonneg.bound = 0.0;
        p.constraints.push_back(std::move(nonneg));
        sum_term.add(z_of[i][c], 1.0);
      }
      gp::LseConstraint simplex;
      simplex.terms.push_back(std::move(sum_term));
      simplex.bound = 1.0;
      p.constraints.push_back(std::move(simplex));
    }
  }

  for (int j = 0; j < nbs; ++j) {
    gp::LseConstraint budget;
    for (int i = 0; i < n; ++i) {
      const auto& cand = node.candidates[i];
      for (int c = 0; c < static_cast<int>(cand.size()); ++c) {
        if (cand[c] == j)
          budget.terms.push_back(gp::LogAffine{}.add(rel.u_vars[i][c], 1.0));
      }
    }
    if (budget.terms.empty()) continue;
    budget.bound = 0.0;
    p.constraints.push_back(std::move(budget));
  }

  for (int i = 0; i < n; ++i) {
    const auto& cand = node.candidates[i];
    const int num_cand = static_cast<int>(cand.size());
    for (int c = 0; c < num_cand; ++c) {
      const int j = cand[c];
      const Eigen::VectorXd gains = prob.gain_row(i, j);
      const int u_var = rel.u_vars[i][c];
      for (int l = 0; l < pw.size(); ++l) {
        const double inv_b = 1.0 / pw.b[l];
        gp::LseConstraint rate;
        gp::LogAffine noise_term(std::log(sc.noise_w / gains(j)));
        noise_term.add(q_var[j], -1.0).add(u_var, -inv_b);
        rate.terms.push_back(std::move(noise_term));
        for (int k = 0; k < nbs; ++k) {
          if (k == j) continue;
          gp::LogAffine interferer(std::log(gains(k) / gains(j)));
          interferer.add(q_var[k], 1.0).add(q_var[j], -1.0).add(u_var, -inv_b);
          rate.terms.push_back(std::move(interferer));
        }
        rate.bound = a_coefficient(sc.bandwidth_hz(j), sc.demand_bps(i),
                                   pw.a[l], pw.b[l]);
        // Big-M deactivation: f <= A + M*(1 - z_ij), kept affine by folding
        // the indicator into every exponent.
        if (num_cand > 1) {
          if (z_of[i][c] >= 0) {
            for (auto& term : rate.terms) term.add(z_of[i][c], big_m);
            rate.bound += big_m;
          } else {
            // z of the last candidate is 1 - sum of the free ones.
            for (auto& term : rate.terms)
              for (int c2 = 0; c2 + 1 < num_cand; ++c2)
                term.add(z_of[i][c2], -big_m);
          }
        }
        p.constraints.push_back(std::move(rate));
      }
    }
  }

  for (int j = 0; j < nbs; ++j)
    p.objective_terms.push_back(gp::LogAffine{}.add(q_var[j], 1.0));
  return rel;
}

struct RelaxSolve {
  SolveStatus status;
  double bound = -kInf;
  std::vector<std::tuple<int, int, double>> frac;  // (user, bs, z value)
};

RelaxSolve solve_relaxation(const AssocProblem& prob, const Node& node) {
  RelaxSolve rs;
  const Relaxation rel = build_relaxation(prob, node);
  const gp::SolveOutput out = gp::solve(rel.program, prob.solver);
  rs.status = out.diag.status;
  if (rs.status == SolveStatus::optimal) {
    rs.bound = out.objective;
    // Collect per-user indicator values including the implied last one.
    const int n = prob.scenario.num_users;
    std::vector<double> sum_free(n, 0.0);
    for (const auto& [i, j, zv] : rel.z_vars) {
      const double z = std::clamp(out.y(zv), 0.0, 1.0);
      rs.frac.emplace_back(i, j, z);
      sum_free[i] += z;
    }
    for (int i = 0; i < n; ++i) {
      if (node.candidates[i].size() > 1) {
        rs.frac.emplace_back(i, node.candidates[i].back(),
                             std::clamp(1.0 - sum_free[i], 0.0, 1.0));
      }
    }
  }
  return rs;
}

}  // namespace

BnbResult branch_and_bound(const AssocProblem& prob, const BnbOptions& opts) {
  if (opts.node_limit < 1 || opts.rel_gap <= 0)
    throw std::invalid_argument("branch_and_bound: bad options");
  const int n = prob.scenario.num_users;
  const int nbs = prob.scenario.num_bs;

  BnbResult res;

  // Greedy incumbent.
  const Association greedy = greedy_assoc(prob.scenario);
  {
    const gp::LogConvexProgram p = prob.build_fixed(greedy);
    const gp::SolveOutput out = gp::solve(p, prob.solver);
    if (out.diag.status == SolveStatus::optimal) {
      res.assoc = greedy;
      res.result = extract_result(p, out, prob.scenario, greedy);
      res.incumbent = out.objective;
      res.status = SolveStatus::optimal;
    } else {
      res.incumbent = kInf;
    }
  }

  auto try_incumbent = [&](const Association& assoc) {
    const gp::LogConvexProgram p = prob.build_fixed(assoc);
    const gp::SolveOutput out = gp::solve(p, prob.solver);
    if (out.diag.status == SolveStatus::optimal &&
        out.objective < res.incumbent) {
      res.assoc = assoc;
      res.result = extract_result(p, out, prob.scenario, assoc);
      res.incumbent = out.objective;
      res.status = SolveStatus::optimal;
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t next_id = 0;

  Node root;
  root.candidates.assign(n, {});
  for (auto& c : root.candidates) {
    c.resize(nbs);
    for (int j = 0; j < nbs; ++j) c[j] = j;
  }
  if (nbs == 1 || n == 0) {
    res.lower_bound = res.incumbent;
    res.gap = 0.0;
    res.certified = res.status == SolveStatus::optimal;
    return res;
  }

  {
    const RelaxSolve rs = solve_relaxation(prob, root);
    ++res.nodes;
    if (rs.status == SolveStatus::infeasible &&
        res.status != SolveStatus::optimal) {
      res.status = SolveStatus::infeasible;
      return res;
    }
    root.bound = rs.status == SolveStatus::optimal ? rs.bound : -kInf;
    root.frac = rs.frac;
    root.id = next_id++;
    open.push(root);
  }

  auto prune_level = [&]() {
    return res.incumbent - opts.rel_gap * std::abs(res.incumbent);
  };

  while (!open.empty()) {
    if (res.nodes >= opts.node_limit) {
      res.lower_bound = std::min(open.top().bound, prune_level());
      res.gap = std::isfinite(res.incumbent) && res.incumbent != 0.0
                    ? (res.incumbent - res.lower_bound) / std::abs(res.incumbent)
                    : kInf;
      res.certified = false;
      return res;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= prune_level()) continue;

    // Integral relaxation: its bound equals the best completion in the
    // subtree, so recording the assignment closes the node.
    bool integral = !node.frac.empty();
    for (const auto& [i, j, z] : node.frac) {
      (void)i;
      (void)j;
      if (std::min(z, 1.0 - z) > kIntegralTol) {
        integral = false;
        break;
      }
    }
    if (integral) {
      Association assoc;
      assoc.serving = Eigen::VectorXi::Zero(n);
      std::vector<double> best_z(n, -1.0);
      for (int i = 0; i < n; ++i) assoc.serving(i) = node.candidates[i][0];
      for (const auto& [i, j, z] : node.frac) {
        if (z > best_z[i]) {
          best_z[i] = z;
          assoc.serving(i) = j;
        }
      }
      try_incumbent(assoc);
      continue;
    }

    // Branch on the most fractional indicator; ties to the smallest pair.
    int bi = -1, bj = -1;
    double best_score = -1.0;
    for (const auto& [i, j, z] : node.frac) {
      const double score = std::min(z, 1.0 - z);
      if (score > best_score + 1e-15 ||
          (std::abs(score - best_score) <= 1e-15 &&
           (bi == -1 || i < bi || (i == bi && j < bj)))) {
        best_score = score;
        bi = i;
        bj = j;
      }
    }
    if (bi < 0) {
      // Relaxation failed to produce indicator values; branch on the first
      // open user so the subtree is still enumerated.
      for (int i = 0; i < n && bi < 0; ++i) {
        if (node.candidates[i].size() > 1) {
          bi = i;
          bj = node.candidates[i][0];
        }
      }
      if (bi < 0) continue;  // fully fixed; handled at creation
    }

    for (int side = 0; side < 2; ++side) {
      Node child;
      child.candidates = node.candidates;
      if (side == 0) {
        child.candidates[bi] = {bj};  // fix user bi to bj
      } else {
        auto& cand = child.candidates[bi];
        cand.erase(std::remove(cand.begin(), cand.end(), bj), cand.end());
        if (cand.empty()) continue;
      }
      if (all_fixed(child)) {
        try_incumbent(fixed_assoc(child));
        continue;
      }
      const RelaxSolve rs = solve_relaxation(prob, child);
      ++res.nodes;
      if (rs.status == SolveStatus::infeasible) continue;
      child.bound = rs.status == SolveStatus::optimal ? rs.bound : -kInf;
      if (child.bound >= prune_level()) continue;
      child.frac = rs.frac;
      child.id = next_id++;
      open.push(child);
    }
  }

  res.lower_bound =
      res.status == SolveStatus::optimal ? prune_level() : res.incumbent;
  if (res.status == SolveStatus::optimal) {
    res.gap = res.incumbent != 0.0
                  ? std::max(0.0, (res.incumbent - res.lower_bound) /
                                      std::abs(res.incumbent))
                  : 0.0;
    res.certified = true;
  }
  return res;
}

}  // namespace netmin
