#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netmin {

/// Static description of an OFDMA downlink: users, base stations, radio
/// parameters, and per-pair channel-gain statistics (dB mean / dB std).
/// Immutable after construction; safe to share across threads.
struct Scenario {
  int num_users = 0;                // n
  int num_bs = 0;                   // N
  Eigen::VectorXd bandwidth_hz;     // per-BS bandwidth, length N
  Eigen::VectorXd p_max_w;          // per-BS resource-block power cap, length N
  double noise_w = 0.0;             // noise power at the receiver
  Eigen::VectorXd demand_bps;       // per-user throughput requirement, length n
  Eigen::MatrixXd mu_db;            // n x N dB-gain means
  Eigen::MatrixXd sigma_db;         // n x N dB-gain standard deviations
  std::optional<Eigen::MatrixX2d> user_pos;  // planar positions (m), n x 2
  std::optional<Eigen::MatrixX2d> bs_pos;    // N x 2

  // Throws std::invalid_argument if any invariant is broken.
  void validate() const;

  // Linear mean gains, 10^(mu_db/10), as an n x N matrix.
  Eigen::MatrixXd mean_gains() const;
};

/// Each user is served by exactly one base station.
struct Association {
  Eigen::VectorXi serving;  // length n, entries in [0, N)

  int bs_of(int user) const { return serving(user); }
  bool serves(int user, int bs) const { return serving(user) == bs; }
};

/// One realization of the channel gains (linear power ratios).
struct GainSample {
  Eigen::MatrixXd g;  // n x N, strictly positive
};

enum class SolveStatus {
  optimal,
  infeasible,
  iteration_limit,
  numerical_failure,
};

std::string to_string(SolveStatus s);

/// Solver diagnostics attached to every solve.
struct SolveDiagnostics {
  SolveStatus status = SolveStatus::numerical_failure;
  int newton_iters = 0;
  int outer_stages = 0;
  double duality_measure = 0.0;  // (#constraints)/t at exit
  double barrier_t = 0.0;        // final barrier parameter
  double kkt_stationarity = 0.0;
  double kkt_complementarity = 0.0;
  std::vector<double> stage_objectives;  // objective after each centering
  std::string message;
};

/// Powers, allocations, and association returned by a solve.
struct SolveResult {
  Eigen::VectorXd power_w;   // length N
  Eigen::MatrixXd alloc;     // n x N fractions; zero off-association
  Association assoc;
  double objective_w = 0.0;  // sum of powers
  SolveDiagnostics diag;
};

/// Per-constraint slacks from auditing a solution against one gain sample.
/// Slacks are normalized (relative for caps and throughput); negative means
/// violated. Infeasibility is reported here, never thrown.
struct FeasibilityReport {
  Eigen::VectorXd power_cap_slack;   // (p_max - P)/p_max per BS
  Eigen::VectorXd resource_slack;    // 1 - sum_i x_ij per BS
  Eigen::VectorXd throughput_slack;  // (T_i - r_i)/r_i per user
  bool pass = false;
};

// dB to linear power ratio: 10^(g_db/10).
double db_to_linear(double g_db);
double linear_to_db(double g_linear);

// SINR of a user served by BS `serving_bs` under powers `power_w` and the
// user's gain row `gain_row`. Throws std::out_of_range on a bad BS index.
double sinr(const Eigen::VectorXd& power_w, const Eigen::VectorXd& gain_row,
            double noise_w, int serving_bs);

// Shannon throughput of user i given an allocation row, powers, association
// and gains: x_{i,serving} * B_serving * log2(1 + SINR).
double user_throughput(const Eigen::VectorXd& alloc_row,
                       const Eigen::VectorXd& power_w, const Association& assoc,
                       const Eigen::VectorXd& gain_row,
                       const Eigen::VectorXd& bandwidth_hz, double noise_w,
                       int user);

// Audits a solution against one gain sample at relative tolerance `tol`.
FeasibilityReport check_feasible(const SolveResult& result,
                                 const Scenario& scenario,
                                 const GainSample& gains, double tol = 1e-6);

/// Parameters for the synthetic log-distance scenario generator.
struct SyntheticConfig {
  int num_users = 20;
  int num_bs = 5;
  double area_m = 1000.0;           // square side
  double pathloss_exponent = 3.5;
  double ref_loss_db = 40.0;        // loss at the 1 m reference distance
  double sigma_db = 3.0;            // common shadowing std
  double demand_min_bps = 1e6;
  double demand_max_bps = 3e6;
  double bandwidth_hz = 2e7;        // every BS
  double p_max_w = 1.0;             // every BS
  double noise_w = 1e-13;
  std::uint64_t seed = 0;
};

// Places BSs and users uniformly at random in the square and derives dB-gain
// means from the log-distance model (reference distance clamped at 1 m).
// Deterministic given the seed. Throws std::invalid_argument on a zero area
// or non-positive counts.
Scenario gen_synthetic(const SyntheticConfig& cfg);

}  // namespace netmin
