#include "netmin/robust.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace netmin {

namespace {

// Acklam's rational approximation to the standard normal quantile.
double inv_normal_cdf_estimate(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr double kSqrt2Pi = 2.5066282746310002;

}  // namespace

std::string to_string(BoxPolicy p) {
  return p == BoxPolicy::one_sided ? "one-sided" : "two-sided";
}

BoxPolicy box_policy_from_string(const std::string& s) {
  if (s == "one-sided") return BoxPolicy::one_sided;
  if (s == "two-sided") return BoxPolicy::two_sided;
  throw std::invalid_argument("unknown box policy: " + s);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inv_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inv_normal_cdf: p must be in (0,1)");
  double x = inv_normal_cdf_estimate(p);
  // One Halley step against the erfc-based CDF.
  const double e = normal_cdf(x) - p;
  const double pdf = std::exp(-0.5 * x * x) / kSqrt2Pi;
  const double u = e / pdf;
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

std::pair<double, double> box_from_alpha(double alpha, int num_bs,
                                         BoxPolicy policy) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("box_from_alpha: alpha must be in (0,1)");
  if (num_bs < 1)
    throw std::invalid_argument("box_from_alpha: need at least one BS");
  const double per_bs = std::pow(1.0 - alpha, 1.0 / num_bs);
  double rho = 0.0;
  if (policy == BoxPolicy::one_sided) {
    rho = inv_normal_cdf(per_bs);
  } else {
    rho = inv_normal_cdf(0.5 * (1.0 + per_bs));
  }
  return {-rho, rho};
}

UncertaintyBox build_box(int num_users, int num_bs, double alpha,
                         BoxPolicy policy) {
  const auto [lo, hi] = box_from_alpha(alpha, num_bs, policy);
  UncertaintyBox box;
  box.rho_lo = Eigen::MatrixXd::Constant(num_users, num_bs, lo);
  box.rho_hi = Eigen::MatrixXd::Constant(num_users, num_bs, hi);
  box.policy = policy;
  box.target_probability = 1.0 - alpha;
  return box;
}

double fhat_value(const Eigen::VectorXd& q, double u,
                  const Eigen::VectorXd& gain_row, double noise_w,
                  int serving_bs, double b) {
  if (serving_bs < 0 || serving_bs >= q.size())
    throw std::out_of_range("fhat_value: serving BS index out of range");
  if (!(gain_row.array() > 0.0).all())
    throw std::invalid_argument("fhat_value: gains must be > 0");
  if (!(b > 0.0)) throw std::invalid_argument("fhat_value: b must be > 0");

  const double g_serving = gain_row(serving_bs);
  const double common = -q(serving_bs) - u / b;
  std::vector<double> exponents;
  exponents.push_back(std::log(noise_w / g_serving) + common);
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    if (k == serving_bs) continue;
    exponents.push_back(std::log(gain_row(k) / g_serving) + q(k) + common);
  }
  double vmax = exponents[0];
  for (double e : exponents) vmax = std::max(vmax, e);
  double sum = 0.0;
  for (double e : exponents) sum += std::exp(e - vmax);
  return vmax + std::log(sum);
}

GainSample worst_case_gains(const Scenario& scenario, const UncertaintyBox& box,
                            const Association& assoc, double sigma_scale) {
  const int n = scenario.num_users;
  const int nbs = scenario.num_bs;
  GainSample gs;
  gs.g.resize(n, nbs);
  for (int i = 0; i < n; ++i) {
    const int j = assoc.bs_of(i);
    for (int k = 0; k < nbs; ++k) {
      const double rho = (k == j) ? box.rho_lo(i, k) : box.rho_hi(i, k);
      const double exponent =
          kDbToNat *
          (scenario.mu_db(i, k) + rho * sigma_scale * scenario.sigma_db(i, k));
      gs.g(i, k) = std::exp(exponent);
    }
  }
  return gs;
}

namespace {

// Shared fixed-association skeleton; deterministic and robust builds differ
// only in the gains the throughput constraints see.
gp::LogConvexProgram build_fixed(const Scenario& scenario,
                                 const PiecewiseApprox& pw,
                                 const Association& assoc,
                                 const Eigen::MatrixXd& gains) {
  scenario.validate();
  const int n = scenario.num_users;
  const int nbs = scenario.num_bs;
  if (assoc.serving.size() != n)
    throw std::invalid_argument("build: association length != n");
  for (int i = 0; i < n; ++i) {
    if (assoc.bs_of(i) < 0 || assoc.bs_of(i) >= nbs)
      throw std::invalid_argument("build: association entry out of range");
  }

  gp::LogConvexProgram p;
  std::vector<int> q_var(nbs), u_var(n);
  for (int j = 0; j < nbs; ++j)
    q_var[j] = p.add_var("q" + std::to_string(j), gp::VarRole::power);
  for (int i = 0; i < n; ++i)
    u_var[i] = p.add_var("u" + std::to_string(i) + "_" +
                             std::to_string(assoc.bs_of(i)),
                         gp::VarRole::allocation);

  for (int j = 0; j < nbs; ++j) {
    gp::LseConstraint cap;
    cap.terms.push_back(gp::LogAffine{}.add(q_var[j], 1.0));
    cap.bound = std::log(scenario.p_max_w(j));
    cap.label = "power_cap[" + std::to_string(j) + "]";
    p.constraints.push_back(std::move(cap));

    gp::LseConstraint floor;
    floor.terms.push_back(gp::LogAffine{}.add(q_var[j], -1.0));
    floor.bound = -kLogPowerFloor;
    floor.label = "power_floor[" + std::to_string(j) + "]";
    p.constraints.push_back(std::move(floor));
  }

  for (int i = 0; i < n; ++i) {
    gp::LseConstraint ub;
    ub.terms.push_back(gp::LogAffine{}.add(u_var[i], 1.0));
    ub.bound = 0.0;
    ub.label = "alloc_cap[" + std::to_string(i) + "]";
    p.constraints.push_back(std::move(ub));

    gp::LseConstraint lb;
    lb.terms.push_back(gp::LogAffine{}.add(u_var[i], -1.0));
    lb.bound = -kLogAllocFloor;
    lb.label = "alloc_floor[" + std::to_string(i) + "]";
    p.constraints.push_back(std::move(lb));
  }

  for (int j = 0; j < nbs; ++j) {
    gp::LseConstraint budget;
    for (int i = 0; i < n; ++i) {
      if (assoc.bs_of(i) == j)
        budget.terms.push_back(gp::LogAffine{}.add(u_var[i], 1.0));
    }
    if (budget.terms.empty()) continue;
    budget.bound = 0.0;
    budget.label = "resource[" + std::to_string(j) + "]";
    p.constraints.push_back(std::move(budget));
  }

  for (int i = 0; i < n; ++i) {
    const int j = assoc.bs_of(i);
    const double g_serving = gains(i, j);
    for (int l = 0; l < pw.size(); ++l) {
      const double inv_b = 1.0 / pw.b[l];
      gp::LseConstraint rate;
      gp::LogAffine noise_term(std::log(scenario.noise_w / g_serving));
      noise_term.add(q_var[j], -1.0).add(u_var[i], -inv_b);
      rate.terms.push_back(std::move(noise_term));
      for (int k = 0; k < nbs; ++k) {
        if (k == j) continue;
        gp::LogAffine interferer(std::log(gains(i, k) / g_serving));
        interferer.add(q_var[k], 1.0).add(q_var[j], -1.0).add(u_var[i], -inv_b);
        rate.terms.push_back(std::move(interferer));
      }
      rate.bound = a_coefficient(scenario.bandwidth_hz(j),
                                 scenario.demand_bps(i), pw.a[l], pw.b[l]);
      rate.label = "rate[" + std::to_string(i) + "," + std::to_string(j) +
                   "," + std::to_string(l) + "]";
      p.constraints.push_back(std::move(rate));
    }
  }

  for (int j = 0; j < nbs; ++j)
    p.objective_terms.push_back(gp::LogAffine{}.add(q_var[j], 1.0));
  return p;
}

}  // namespace

gp::LogConvexProgram build_migp(const Scenario& scenario,
                                const PiecewiseApprox& pw,
                                const Association& assoc) {
  return build_fixed(scenario, pw, assoc, scenario.mean_gains());
}

gp::LogConvexProgram build_robust(const Scenario& scenario,
                                  const PiecewiseApprox& pw,
                                  const UncertaintyBox& box,
                                  const Association& assoc,
                                  double sigma_scale) {
  if (box.rho_lo.rows() != scenario.num_users ||
      box.rho_lo.cols() != scenario.num_bs)
    throw std::invalid_argument("build_robust: box shape mismatch");
  const GainSample wc = worst_case_gains(scenario, box, assoc, sigma_scale);
  return build_fixed(scenario, pw, assoc, wc.g);
}

SolveResult extract_result(const gp::LogConvexProgram& p,
                           const gp::SolveOutput& out, const Scenario& scenario,
                           const Association& assoc) {
  SolveResult res;
  res.assoc = assoc;
  res.diag = out.diag;
  res.power_w = Eigen::VectorXd::Zero(scenario.num_bs);
  res.alloc = Eigen::MatrixXd::Zero(scenario.num_users, scenario.num_bs);
  if (out.y.size() != p.num_vars) return res;
  int qi = 0, ui = 0;
  for (int v = 0; v < p.num_vars; ++v) {
    if (p.vars[v].role == gp::VarRole::power) {
      res.power_w(qi++) = std::exp(out.y(v));
    } else if (p.vars[v].role == gp::VarRole::allocation) {
      res.alloc(ui, assoc.bs_of(ui)) = std::exp(out.y(v));
      ++ui;
    }
  }
  res.objective_w = res.power_w.sum();
  return res;
}

}  // namespace netmin
