#include "netmin/scenario.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace netmin {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// Uniform double in [0,1) from the top 53 bits; implementation-defined
// std::uniform_real_distribution would break cross-platform reproducibility.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void Scenario::validate() const {
  require(num_users >= 1, "scenario: need at least one user");
  require(num_bs >= 1, "scenario: need at least one base station");
  require(bandwidth_hz.size() == num_bs, "scenario: bandwidth_hz length != N");
  require(p_max_w.size() == num_bs, "scenario: p_max_w length != N");
  require(demand_bps.size() == num_users, "scenario: demand_bps length != n");
  require(mu_db.rows() == num_users && mu_db.cols() == num_bs,
          "scenario: mu_db shape != n x N");
  require(sigma_db.rows() == num_users && sigma_db.cols() == num_bs,
          "scenario: sigma_db shape != n x N");
  require((bandwidth_hz.array() > 0).all(), "scenario: bandwidth must be > 0");
  require((p_max_w.array() > 0).all(), "scenario: power caps must be > 0");
  require(noise_w > 0, "scenario: noise power must be > 0");
  require((demand_bps.array() > 0).all(), "scenario: demands must be > 0");
  require((sigma_db.array() >= 0).all(), "scenario: sigma_db must be >= 0");
  require(mu_db.allFinite() && sigma_db.allFinite(),
          "scenario: gains must be finite");
}

Eigen::MatrixXd Scenario::mean_gains() const {
  return (mu_db.array() / 10.0).unaryExpr(
      [](double e) { return std::pow(10.0, e); });
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::iteration_limit: return "iteration_limit";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

double db_to_linear(double g_db) { return std::pow(10.0, g_db / 10.0); }

double linear_to_db(double g_linear) { return 10.0 * std::log10(g_linear); }

double sinr(const Eigen::VectorXd& power_w, const Eigen::VectorXd& gain_row,
            double noise_w, int serving_bs) {
  if (serving_bs < 0 || serving_bs >= power_w.size())
    throw std::out_of_range("sinr: serving BS index out of range");
  double interference = noise_w;
  for (Eigen::Index k = 0; k < power_w.size(); ++k) {
    if (k != serving_bs) interference += power_w(k) * gain_row(k);
  }
  return power_w(serving_bs) * gain_row(serving_bs) / interference;
}

double user_throughput(const Eigen::VectorXd& alloc_row,
                       const Eigen::VectorXd& power_w, const Association& assoc,
                       const Eigen::VectorXd& gain_row,
                       const Eigen::VectorXd& bandwidth_hz, double noise_w,
                       int user) {
  const int j = assoc.bs_of(user);
  const double x = alloc_row(j);
  if (x == 0.0) return 0.0;
  const double s = sinr(power_w, gain_row, noise_w, j);
  return x * bandwidth_hz(j) * std::log2(1.0 + s);
}

FeasibilityReport check_feasible(const SolveResult& result,
                                 const Scenario& scenario,
                                 const GainSample& gains, double tol) {
  const int n = scenario.num_users;
  const int nbs = scenario.num_bs;
  FeasibilityReport rep;
  rep.power_cap_slack =
      (scenario.p_max_w - result.power_w).cwiseQuotient(scenario.p_max_w);
  rep.resource_slack =
      Eigen::VectorXd::Ones(nbs) - result.alloc.colwise().sum().transpose();
  rep.throughput_slack.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t =
        user_throughput(result.alloc.row(i), result.power_w, result.assoc,
                        gains.g.row(i), scenario.bandwidth_hz,
                        scenario.noise_w, i);
    rep.throughput_slack(i) = (t - scenario.demand_bps(i)) / scenario.demand_bps(i);
  }
  rep.pass = (rep.power_cap_slack.array() >= -tol).all() &&
             (rep.resource_slack.array() >= -tol).all() &&
             (rep.throughput_slack.array() >= -tol).all();
  return rep;
}

Scenario gen_synthetic(const SyntheticConfig& cfg) {
  require(cfg.num_users >= 1 && cfg.num_bs >= 1,
          "gen_synthetic: counts must be >= 1");
  require(cfg.area_m > 0, "gen_synthetic: area must be > 0");
  require(cfg.pathloss_exponent > 0,
          "gen_synthetic: pathloss exponent must be > 0");
  require(cfg.demand_min_bps > 0 && cfg.demand_max_bps >= cfg.demand_min_bps,
          "gen_synthetic: bad demand range");

  std::mt19937_64 rng(cfg.seed);
  Scenario sc;
  sc.num_users = cfg.num_users;
  sc.num_bs = cfg.num_bs;
  sc.bandwidth_hz = Eigen::VectorXd::Constant(cfg.num_bs, cfg.bandwidth_hz);
  sc.p_max_w = Eigen::VectorXd::Constant(cfg.num_bs, cfg.p_max_w);
  sc.noise_w = cfg.noise_w;

  Eigen::MatrixX2d bs(cfg.num_bs, 2);
  for (int j = 0; j < cfg.num_bs; ++j) {
    bs(j, 0) = next_unit(rng) * cfg.area_m;
    bs(j, 1) = next_unit(rng) * cfg.area_m;
  }
  Eigen::MatrixX2d users(cfg.num_users, 2);
  for (int i = 0; i < cfg.num_users; ++i) {
    users(i, 0) = next_unit(rng) * cfg.area_m;
    users(i, 1) = next_unit(rng) * cfg.area_m;
  }

  sc.mu_db.resize(cfg.num_users, cfg.num_bs);
  sc.sigma_db = Eigen::MatrixXd::Constant(cfg.num_users, cfg.num_bs,
                                          cfg.sigma_db);
  for (int i = 0; i < cfg.num_users; ++i) {
    for (int j = 0; j < cfg.num_bs; ++j) {
      const double d = std::max((users.row(i) - bs.row(j)).norm(), 1.0);
      sc.mu_db(i, j) = -(cfg.ref_loss_db +
                         10.0 * cfg.pathloss_exponent * std::log10(d));
    }
  }

  sc.demand_bps.resize(cfg.num_users);
  for (int i = 0; i < cfg.num_users; ++i) {
    sc.demand_bps(i) = cfg.demand_min_bps +
                       next_unit(rng) * (cfg.demand_max_bps - cfg.demand_min_bps);
  }

  sc.user_pos = users;
  sc.bs_pos = bs;
  sc.validate();
  return sc;
}

}  // namespace netmin
