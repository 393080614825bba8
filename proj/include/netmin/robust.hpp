#pragma once

#include <Eigen/Dense>

#include "netmin/approx.hpp"
#include "netmin/gp.hpp"
#include "netmin/scenario.hpp"

namespace netmin {

enum class BoxPolicy { one_sided, two_sided };

std::string to_string(BoxPolicy p);
BoxPolicy box_policy_from_string(const std::string& s);

/// Per-pair interval bounds on the normalized gain deviations realizing a
/// target joint probability per user. Under the one-sided policy the bound
/// that matters is rho_lo at the serving BS and rho_hi at interferers; the
/// opposite sides are open.
struct UncertaintyBox {
  Eigen::MatrixXd rho_lo;  // n x N
  Eigen::MatrixXd rho_hi;  // n x N
  BoxPolicy policy = BoxPolicy::one_sided;
  double target_probability = 1.0;  // joint per-user level 1 - alpha
};

struct RobustConfig {
  Eigen::VectorXd alpha;     // per-user violation budget, entries in (0,1)
  double sigma_scale = 1.0;  // multiplier on the scenario's sigma_db
  BoxPolicy policy = BoxPolicy::one_sided;
};

// Standard normal CDF (via erfc) and its inverse (rational approximation
// refined by one Halley step; |error| well below 1e-9). The inverse rejects
// p outside (0,1).
double normal_cdf(double x);
double inv_normal_cdf(double p);

// Per-user symmetric bounds (rho_lo, rho_hi) realizing joint probability
// (1-alpha)^{1/N} per BS. One-sided: [-rho, +inf) serving, (-inf, +rho]
// interferer, with Phi(rho) = phi. Two-sided: Phi(rho)-Phi(-rho) = phi.
std::pair<double, double> box_from_alpha(double alpha, int num_bs,
                                         BoxPolicy policy);

// Box for every user of a scenario with a uniform violation budget.
UncertaintyBox build_box(int num_users, int num_bs, double alpha,
                         BoxPolicy policy);

// Value of the throughput constraint kernel
// log(noise/g_j * e^{-q_j - u/b} + sum_{k!=j} g_k/g_j * e^{q_k - q_j - u/b})
// at given log-powers q and log-allocation u. Gains must be positive.
double fhat_value(const Eigen::VectorXd& q, double u,
                  const Eigen::VectorXd& gain_row, double noise_w,
                  int serving_bs, double b);

// Worst-case gains inside the box for a fixed association: the serving pair
// sits at rho_lo, every interferer at rho_hi.
GainSample worst_case_gains(const Scenario& scenario, const UncertaintyBox& box,
                            const Association& assoc, double sigma_scale = 1.0);

// Deterministic fixed-association program at the mean gains: minimize
// sum_j exp(q_j) under power caps, per-BS resource budgets and the
// monomial throughput constraints.
gp::LogConvexProgram build_migp(const Scenario& scenario,
                                const PiecewiseApprox& pw,
                                const Association& assoc);

// Same skeleton with every throughput constraint taken at the box's worst
// case. With sigma = 0 the output is identical to build_migp term by term.
gp::LogConvexProgram build_robust(const Scenario& scenario,
                                  const PiecewiseApprox& pw,
                                  const UncertaintyBox& box,
                                  const Association& assoc,
                                  double sigma_scale = 1.0);

// Extracts powers/allocations from a solved fixed-association program.
SolveResult extract_result(const gp::LogConvexProgram& p,
                           const gp::SolveOutput& out, const Scenario& scenario,
                           const Association& assoc);

// Lower bounds on the log variables keeping barrier minimizers attained:
// effectively zero power / allocation but finite in log space.
constexpr double kLogPowerFloor = -69.0;   // ~1e-30 W
constexpr double kLogAllocFloor = -60.0;   // ~1e-26 fraction

// dB-to-natural-log conversion constant ln(10)/10.
constexpr double kDbToNat = 0.23025850929940457;

}  // namespace netmin
