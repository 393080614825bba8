#include "netmin/approx.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace netmin {

std::pair<double, double> tangent_monomial(double s0) {
  if (!(s0 > 0.0)) throw std::invalid_argument("tangent_monomial: need s0 > 0");
  const double l1p = std::log1p(s0);
  const double b = s0 / ((1.0 + s0) * l1p);
  const double a = (l1p / std::numbers::ln2) / std::pow(s0, b);
  return {a, b};
}

double approx_value(const PiecewiseApprox& pw, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("approx_value: need s > 0");
  double best = std::numeric_limits<double>::infinity();
  for (int l = 0; l < pw.size(); ++l)
    best = std::min(best, pw.a[l] * std::pow(s, pw.b[l]));
  return best;
}

int approx_argmin(const PiecewiseApprox& pw, double s) {
  int arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int l = 0; l < pw.size(); ++l) {
    const double v = pw.a[l] * std::pow(s, pw.b[l]);
    if (v < best) best = v, arg = l;
  }
  return arg;
}

CertificationReport verify_lower_bound(const PiecewiseApprox& pw, double s_min,
                                       double s_max, int grid_points,
                                       double slack) {
  if (grid_points < 2)
    throw std::invalid_argument("verify_lower_bound: need >= 2 grid points");
  CertificationReport rep;
  rep.grid_points = grid_points;
  rep.max_gap = -std::numeric_limits<double>::infinity();
  const double log_lo = std::log(s_min);
  const double log_hi = std::log(s_max);
  for (int k = 0; k < grid_points; ++k) {
    const double s =
        std::exp(log_lo + (log_hi - log_lo) * k / (grid_points - 1));
    const double gap = approx_value(pw, s) - std::log2(1.0 + s);
    if (gap > rep.max_gap) {
      rep.max_gap = gap;
      rep.worst_s = s;
    }
  }
  rep.pass = rep.max_gap <= slack;
  return rep;
}

PiecewiseApprox fit_piecewise(int m, double s_min, double s_max) {
  if (m < 1) throw std::invalid_argument("fit_piecewise: need m >= 1");
  if (!(0.0 < s_min && s_min < s_max))
    throw std::invalid_argument("fit_piecewise: need 0 < s_min < s_max");

  // Each monomial interpolates log2(1+s) at the two ends of one cell of a
  // geometric partition. log2(1+e^t) is concave in t, so every chord sits
  // below the curve on its own cell and the min envelope is a lower bound
  // on the whole range. (A tangent at an interior point would instead sit
  // above the curve away from its anchor.)
  PiecewiseApprox pw;
  pw.s_min = s_min;
  pw.s_max = s_max;
  const double log_lo = std::log(s_min);
  const double log_hi = std::log(s_max);
  auto rate = [](double s) { return std::log2(1.0 + s); };
  for (int k = 0; k < m; ++k) {
    const double t0 = std::exp(log_lo + (log_hi - log_lo) * k / m);
    const double t1 = std::exp(log_lo + (log_hi - log_lo) * (k + 1) / m);
    const double b = std::log(rate(t1) / rate(t0)) / std::log(t1 / t0);
    const double a = rate(t0) / std::pow(t0, b);
    pw.a.push_back(a);
    pw.b.push_back(b);
  }

  const CertificationReport rep = verify_lower_bound(pw, s_min, s_max);
  if (!rep.pass) {
    std::ostringstream msg;
    msg << "fit_piecewise: lower bound violated at s = " << rep.worst_s
        << " (gap " << rep.max_gap << ")";
    throw CertificationError(msg.str());
  }
  return pw;
}

PiecewiseApprox paper_m5_preset() {
  PiecewiseApprox pw;
  pw.a = {1.4080, 0.7720, 1.3436, 2.0641, 2.8584};
  pw.b = {1.0, 0.7994, 0.3928, 0.2538, 0.1840};
  pw.s_min = 0.01;
  pw.s_max = 100.0;
  return pw;
}

double a_coefficient(double bandwidth_hz, double demand_bps, double a,
                     double b) {
  if (!(bandwidth_hz > 0 && demand_bps > 0 && a > 0 && b > 0))
    throw std::invalid_argument("a_coefficient: all inputs must be > 0");
  return std::log(bandwidth_hz * a / demand_bps) / b;
}

}  // namespace netmin
