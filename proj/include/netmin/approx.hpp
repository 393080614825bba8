#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netmin {

/// Piecewise monomial under-approximation of the spectral efficiency
/// log2(1+s): the envelope min_l a_l * s^{b_l} over a certified SINR range.
struct PiecewiseApprox {
  std::vector<double> a;  // positive scale coefficients
  std::vector<double> b;  // exponents in (0, 1]
  double s_min = 0.0;     // certified validity range
  double s_max = 0.0;

  int size() const { return static_cast<int>(a.size()); }
};

/// Outcome of a lower-bound certification sweep.
struct CertificationReport {
  bool pass = false;
  double max_gap = 0.0;    // max over grid of envelope - log2(1+s)
  double worst_s = 0.0;    // grid point attaining max_gap
  int grid_points = 0;
};

class CertificationError : public std::runtime_error {
 public:
  explicit CertificationError(const std::string& what)
      : std::runtime_error(what) {}
};

// Monomial a*s^b tangent to log2(1+s) at s0 (in log-log coordinates):
// b = s0 / ((1+s0) ln(1+s0)), a = log2(1+s0) / s0^b. Tangents touch the
// rate curve from above away from s0; they are local models, not certified
// lower bounds. Throws on s0 <= 0.
std::pair<double, double> tangent_monomial(double s0);

// Chord monomials over a geometric partition of [s_min, s_max]: monomial l
// interpolates log2(1+s) at the ends of the l-th cell, which concavity in
// log-log coordinates places below the curve inside the cell. The envelope
// is re-certified on a 4096-point log-spaced grid; a violation throws
// CertificationError naming the offending grid point.
PiecewiseApprox fit_piecewise(int m, double s_min, double s_max);

// The published m = 5 coefficient set, valid on [0.01, 100] up to the
// 4-decimal precision the coefficients carry (envelope overshoots by at
// most ~8e-5 in two hair-thin windows; certify with slack 1e-4).
PiecewiseApprox paper_m5_preset();

// Envelope value min_l a_l * s^{b_l}. Throws on s <= 0.
double approx_value(const PiecewiseApprox& pw, double s);

// Index of the envelope-attaining monomial at s.
int approx_argmin(const PiecewiseApprox& pw, double s);

// Sweeps a log-spaced grid on [s_min, s_max] and reports the largest
// signed gap envelope - log2(1+s); passes iff max_gap <= slack.
CertificationReport verify_lower_bound(const PiecewiseApprox& pw, double s_min,
                                       double s_max, int grid_points = 4096,
                                       double slack = 1e-9);

// Constraint constant ln(B*a/r)/b coupling bandwidth, demand and one
// monomial. Throws on non-positive inputs.
double a_coefficient(double bandwidth_hz, double demand_bps, double a,
                     double b);

}  // namespace netmin
