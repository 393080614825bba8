#include "netmin/mc.hpp"

#include <cmath>
#include <stdexcept>

namespace netmin::mc {

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_in(std::uint64_t h, std::uint64_t v) {
  return splitmix_finalize(h ^ (v + 0x9E3779B97F4A7C15ULL));
}

// Marsaglia-Tsang gamma deviate with unit scale; draws sequentially from
// the caller's substream so the count of draws never leaks across pairs.
double gamma_deviate(SubstreamRng& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.next_unit();
    return gamma_deviate(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    const double x = inv_normal_cdf(rng.next_unit());
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.next_unit();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

GainDistribution GainDistribution::parse(const std::string& text) {
  GainDistribution dist;
  if (text == "lognormal") {
    dist.kind = Kind::lognormal;
    return dist;
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "uniform") {
    dist.kind = Kind::uniform;
    if (colon != std::string::npos) dist.half_width = std::stod(text.substr(colon + 1));
    if (!(dist.half_width > 0))
      throw std::invalid_argument("uniform distribution needs k > 0");
    return dist;
  }
  if (head == "student") {
    dist.kind = Kind::student_t;
    if (colon != std::string::npos) dist.dof = std::stod(text.substr(colon + 1));
    if (!(dist.dof > 0))
      throw std::invalid_argument("student distribution needs dof > 0");
    return dist;
  }
  throw std::invalid_argument("unknown distribution: " + text);
}

std::string GainDistribution::str() const {
  switch (kind) {
    case Kind::lognormal: return "lognormal";
    case Kind::uniform: return "uniform:" + std::to_string(half_width);
    case Kind::student_t: return "student:" + std::to_string(dof);
  }
  return "?";
}

SubstreamRng::SubstreamRng(std::uint64_t seed, int user, int bs,
                           std::int64_t sample) {
  std::uint64_t h = splitmix_finalize(seed + 0x9E3779B97F4A7C15ULL);
  h = mix_in(h, static_cast<std::uint64_t>(user) + 1);
  h = mix_in(h, static_cast<std::uint64_t>(bs) + 1);
  h = mix_in(h, static_cast<std::uint64_t>(sample) + 1);
  state_ = h;
}

std::uint64_t SubstreamRng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return splitmix_finalize(state_);
}

double SubstreamRng::next_unit() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_one_rho(const GainDistribution& dist, std::uint64_t seed,
                      int user, int bs, std::int64_t sample) {
  SubstreamRng rng(seed, user, bs, sample);
  switch (dist.kind) {
    case GainDistribution::Kind::lognormal:
      return inv_normal_cdf(rng.next_unit());
    case GainDistribution::Kind::uniform:
      return dist.half_width * (2.0 * rng.next_unit() - 1.0);
    case GainDistribution::Kind::student_t: {
      if (!(dist.dof > 0))
        throw std::invalid_argument("student_t: dof must be > 0");
      const double z = inv_normal_cdf(rng.next_unit());
      const double chi2 = 2.0 * gamma_deviate(rng, dist.dof / 2.0);
      return z / std::sqrt(chi2 / dist.dof);
    }
  }
  throw std::logic_error("unreachable distribution kind");
}

std::vector<Eigen::MatrixXd> sample_rho(const GainDistribution& dist, int n,
                                        int num_bs, std::int64_t samples,
                                        std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("sample_rho: samples >= 1");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t s = 0; s < samples; ++s) {
    Eigen::MatrixXd m(n, num_bs);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < num_bs; ++j)
        m(i, j) = sample_one_rho(dist, seed, i, j, s);
    out.push_back(std::move(m));
  }
  return out;
}

GainSample gains_from_rho(const Scenario& scenario, const Eigen::MatrixXd& rho,
                          double sigma_scale) {
  GainSample gs;
  gs.g = (kDbToNat * (scenario.mu_db.array() +
                      rho.array() * sigma_scale * scenario.sigma_db.array()))
             .exp();
  return gs;
}

namespace {

struct SampleStats {
  Eigen::VectorXi violations;
  Eigen::VectorXi outside;
};

}  // namespace

ViolationReport validate(const SolveResult& result, const Scenario& scenario,
                         const GainDistribution& dist, std::int64_t samples,
                         std::uint64_t seed, double sigma_scale,
                         const UncertaintyBox* box) {
  if (result.alloc.rows() != scenario.num_users ||
      result.alloc.cols() != scenario.num_bs ||
      result.power_w.size() != scenario.num_bs)
    throw std::invalid_argument("validate: result does not match scenario");
  if (samples < 1) throw std::invalid_argument("validate: samples >= 1");

  const int n = scenario.num_users;
  const int nbs = scenario.num_bs;
  Eigen::VectorXi violations = Eigen::VectorXi::Zero(n);
  Eigen::VectorXi outside = Eigen::VectorXi::Zero(n);

  Eigen::MatrixXd rho(n, nbs);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nbs; ++j)
        rho(i, j) = sample_one_rho(dist, seed, i, j, s);
    const GainSample gains = gains_from_rho(scenario, rho, sigma_scale);
    for (int i = 0; i < n; ++i) {
      const double t =
          user_throughput(result.alloc.row(i), result.power_w, result.assoc,
                          gains.g.row(i), scenario.bandwidth_hz,
                          scenario.noise_w, i);
      if (t < scenario.demand_bps(i)) ++violations(i);
      if (box) {
        const int serving = result.assoc.bs_of(i);
        bool out_of_box = rho(i, serving) < box->rho_lo(i, serving);
        for (int k = 0; k < nbs && !out_of_box; ++k) {
          if (k != serving && rho(i, k) > box->rho_hi(i, k)) out_of_box = true;
        }
        if (out_of_box) ++outside(i);
      }
    }
  }

  ViolationReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.dist = dist;
  rep.user_violation_frac = violations.cast<double>() / double(samples);
  rep.overall_violation_frac =
      violations.cast<double>().sum() / (double(samples) * n);
  if (box) rep.user_outside_frac = outside.cast<double>() / double(samples);
  return rep;
}

Eigen::VectorXd box_coverage(const std::vector<Eigen::MatrixXd>& rho,
                             const UncertaintyBox& box,
                             const Association& assoc) {
  if (rho.empty()) throw std::invalid_argument("box_coverage: no samples");
  const int n = static_cast<int>(rho.front().rows());
  const int nbs = static_cast<int>(rho.front().cols());
  Eigen::VectorXi outside = Eigen::VectorXi::Zero(n);
  for (const auto& m : rho) {
    for (int i = 0; i < n; ++i) {
      const int serving = assoc.bs_of(i);
      bool out = m(i, serving) < box.rho_lo(i, serving);
      for (int k = 0; k < nbs && !out; ++k) {
        if (k != serving && m(i, k) > box.rho_hi(i, k)) out = true;
      }
      if (out) ++outside(i);
    }
  }
  return outside.cast<double>() / double(rho.size());
}

std::vector<DemandStressRow> demand_stress(
    const SolveResult& result, const Scenario& scenario,
    const GainDistribution& dist, const std::vector<double>& factors,
    std::int64_t samples, std::uint64_t seed, double sigma_scale) {
  if (factors.empty()) throw std::invalid_argument("demand_stress: no factors");
  const int n = scenario.num_users;
  const int nbs = scenario.num_bs;
  std::vector<std::int64_t> counts(factors.size(), 0);

  Eigen::MatrixXd rho(n, nbs);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nbs; ++j)
        rho(i, j) = sample_one_rho(dist, seed, i, j, s);
    const GainSample gains = gains_from_rho(scenario, rho, sigma_scale);
    for (int i = 0; i < n; ++i) {
      const double t =
          user_throughput(result.alloc.row(i), result.power_w, result.assoc,
                          gains.g.row(i), scenario.bandwidth_hz,
                          scenario.noise_w, i);
      for (std::size_t f = 0; f < factors.size(); ++f) {
        if (t < factors[f] * scenario.demand_bps(i)) ++counts[f];
      }
    }
  }

  std::vector<DemandStressRow> rows;
  rows.reserve(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) {
    rows.push_back({factors[f], double(counts[f]) / (double(samples) * n)});
  }
  return rows;
}

}  // namespace netmin::mc
