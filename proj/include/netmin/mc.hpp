#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netmin/robust.hpp"
#include "netmin/scenario.hpp"

namespace netmin::mc {

/// Sampling model for the normalized gain deviations.
struct GainDistribution {
  enum class Kind { lognormal, uniform, student_t };
  Kind kind = Kind::lognormal;
  double half_width = 3.0;  // uniform: deviations on [-k, +k] sigma units
  double dof = 2.0;         // student_t degrees of freedom

  // "lognormal" | "uniform:<k>" | "student:<dof>"
  static GainDistribution parse(const std::string& text);
  std::string str() const;
};

/// Deterministic counter-based substream: every (seed, user, bs, sample)
/// tuple owns an independent draw sequence, so parallel and serial
/// evaluation orders produce identical statistics.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, int user, int bs, std::int64_t sample);
  std::uint64_t next_u64();
  double next_unit();  // (0, 1), never hits the endpoints

 private:
  std::uint64_t state_;
};

// One deviate for pair (user, bs) of a given sample index.
double sample_one_rho(const GainDistribution& dist, std::uint64_t seed,
                      int user, int bs, std::int64_t sample);

// Materialized tensor of deviates, one n x N matrix per sample. Matches
// sample_one_rho entry by entry.
std::vector<Eigen::MatrixXd> sample_rho(const GainDistribution& dist, int n,
                                        int num_bs, std::int64_t samples,
                                        std::uint64_t seed);

// Gains via the log-normal map exp(c*(mu + rho*sigma*sigma_scale)).
GainSample gains_from_rho(const Scenario& scenario, const Eigen::MatrixXd& rho,
                          double sigma_scale = 1.0);

struct ViolationReport {
  Eigen::VectorXd user_violation_frac;  // length n
  Eigen::VectorXd user_outside_frac;    // length n; zero-size without a box
  double overall_violation_frac = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  GainDistribution dist;
};

// Replays `samples` gain draws against a fixed solution and counts users
// whose true Shannon throughput falls below demand. When a box is given,
// also counts samples falling outside it (serving deviation below rho_lo or
// any interferer above rho_hi) on the same draws.
ViolationReport validate(const SolveResult& result, const Scenario& scenario,
                         const GainDistribution& dist, std::int64_t samples,
                         std::uint64_t seed, double sigma_scale = 1.0,
                         const UncertaintyBox* box = nullptr);

// Per-user outside-box fractions over a materialized deviate tensor.
Eigen::VectorXd box_coverage(const std::vector<Eigen::MatrixXd>& rho,
                             const UncertaintyBox& box,
                             const Association& assoc);

struct DemandStressRow {
  double factor = 1.0;
  double overall_violation_frac = 0.0;
};

// Violation fractions with demands scaled by each factor, the solution held
// fixed; all factors share the same draws.
std::vector<DemandStressRow> demand_stress(
    const SolveResult& result, const Scenario& scenario,
    const GainDistribution& dist, const std::vector<double>& factors,
    std::int64_t samples, std::uint64_t seed, double sigma_scale = 1.0);

}  // namespace netmin::mc
