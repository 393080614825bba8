#include <doctest.h>

#include <cmath>

#include "netmin/approx.hpp"

using namespace netmin;

namespace {

// Bisection oracle for the smallest s with envelope(s) >= target.
double invert_by_bisection(const PiecewiseApprox& pw, double target) {
  double lo = 1e-12, hi = 1e12;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (approx_value(pw, mid) >= target) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace

TEST_SUITE_BEGIN("approx");

TEST_CASE("tangent_monomial closed forms") {
  {
    auto [a, b] = tangent_monomial(1.0);
    CHECK(b == doctest::Approx(0.72135).epsilon(1e-5));
    CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    // limit s0 -> 0+: b -> 1, a -> 1/ln 2
    auto [a, b] = tangent_monomial(1e-9);
    CHECK(b == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(a == doctest::Approx(1.4426950408889634).epsilon(1e-6));
  }
  {
    auto [a, b] = tangent_monomial(std::exp(1.0) - 1.0);
    CHECK(b == doctest::Approx(0.63212).epsilon(1e-5));
    CHECK(a == doctest::Approx(1.0247).epsilon(1e-4));
  }
  CHECK_THROWS_AS(tangent_monomial(0.0), std::invalid_argument);
  CHECK_THROWS_AS(tangent_monomial(-1.0), std::invalid_argument);
}

TEST_CASE("tangent monomials overshoot away from the anchor") {
  // tangent at 1 evaluated at 10 exceeds the rate curve: tangents model
  // locally but cannot serve as range-wide lower bounds
  auto [a, b] = tangent_monomial(1.0);
  CHECK(a * std::pow(10.0, b) > std::log2(11.0) + 1.0);
}

TEST_CASE("chords interpolate the rate at their cell edges") {
  const int m = 5;
  const PiecewiseApprox pw = fit_piecewise(m, 0.01, 100.0);
  for (int l = 0; l < m; ++l) {
    for (int end = 0; end < 2; ++end) {
      const double frac = static_cast<double>(l + end) / m;
      const double edge =
          std::exp(std::log(0.01) + (std::log(100.0) - std::log(0.01)) * frac);
      CHECK(pw.a[l] * std::pow(edge, pw.b[l]) ==
            doctest::Approx(std::log2(1.0 + edge)).epsilon(1e-12));
    }
  }
}

TEST_CASE("fit_piecewise with one piece spans the whole range") {
  const PiecewiseApprox pw = fit_piecewise(1, 0.1, 10.0);
  REQUIRE(pw.size() == 1);
  // single chord through (0.1, log2(1.1)) and (10, log2(11))
  CHECK(pw.b[0] == doctest::Approx(0.7003454613).epsilon(1e-9));
  CHECK(pw.a[0] == doctest::Approx(0.6896985122).epsilon(1e-9));
  CHECK(pw.a[0] * std::pow(0.1, pw.b[0]) ==
        doctest::Approx(std::log2(1.1)).epsilon(1e-12));
}

TEST_CASE("fit outputs certify on their own range") {
  for (int m : {3, 5, 8}) {
    const PiecewiseApprox pw = fit_piecewise(m, 0.01, 100.0);
    const auto rep = verify_lower_bound(pw, pw.s_min, pw.s_max);
    CHECK(rep.pass);
  }
}

TEST_CASE("paper preset values") {
  const PiecewiseApprox pw = paper_m5_preset();
  REQUIRE(pw.size() == 5);
  CHECK(approx_value(pw, 10.0) == doctest::Approx(3.3199).epsilon(6e-4));
  CHECK(approx_argmin(pw, 10.0) == 2);  // third monomial
  CHECK(approx_value(pw, 1.0) == doctest::Approx(0.7720).epsilon(1e-12));
}

TEST_CASE("paper preset certification window") {
  const PiecewiseApprox pw = paper_m5_preset();

  // The published 4-decimal coefficients overshoot log2(1+s) in hair-thin
  // windows near s = 0.05 (~1.1e-5) and s = 21.95 (~7.6e-5), so a dense
  // sweep at tight slack fails in one of them.
  const auto strict = verify_lower_bound(pw, 0.01, 100.0, 4096, 1e-9);
  CHECK_FALSE(strict.pass);
  CHECK(strict.max_gap > 1e-9);
  CHECK(strict.max_gap < 1e-4);

  // At the preset's own coefficient precision it certifies.
  const auto loose = verify_lower_bound(pw, 0.01, 100.0, 4096, 1e-4);
  CHECK(loose.pass);

  // Between the two rounding artifacts the bound holds at full precision.
  const auto mid = verify_lower_bound(pw, 0.051, 21.9, 4096, 1e-9);
  CHECK(mid.pass);

  // Far above the fitted range the envelope overtakes the rate curve.
  const auto wide = verify_lower_bound(pw, 0.01, 1000.0, 4096, 1e-9);
  CHECK_FALSE(wide.pass);
  CHECK(wide.worst_s > 500.0);
  CHECK(std::log2(1.0 + wide.worst_s) == doctest::Approx(9.97).epsilon(0.01));
}

TEST_CASE("approx_value rejects non-positive input and is monotone") {
  const PiecewiseApprox pw = paper_m5_preset();
  CHECK_THROWS_AS(approx_value(pw, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(approx_value(pw, -2.0), std::invalid_argument);
  double prev = 0.0;
  for (double s = 0.01; s < 100.0; s *= 1.37) {
    const double v = approx_value(pw, s);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("inversion consistency against bisection") {
  const PiecewiseApprox pw = fit_piecewise(5, 0.01, 100.0);
  for (double target : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    double analytic = 0.0;
    for (int l = 0; l < pw.size(); ++l)
      analytic = std::max(analytic,
                          std::pow(target / pw.a[l], 1.0 / pw.b[l]));
    CHECK(invert_by_bisection(pw, target) ==
          doctest::Approx(analytic).epsilon(1e-6));
  }
}

TEST_CASE("a_coefficient") {
  CHECK(a_coefficient(2.0, 2.0, 1.0, 0.5) == doctest::Approx(0.0));
  CHECK(a_coefficient(2e7, 1e6, 1.0, 0.72135) ==
        doctest::Approx(4.1529).epsilon(1e-3));
  // doubling a adds ln(2)/b
  const double base = a_coefficient(2e7, 1e6, 1.0, 0.4);
  CHECK(a_coefficient(2e7, 1e6, 2.0, 0.4) - base ==
        doctest::Approx(std::log(2.0) / 0.4).epsilon(1e-12));
  CHECK_THROWS_AS(a_coefficient(-1.0, 1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(a_coefficient(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("fit_piecewise rejects bad ranges") {
  CHECK_THROWS_AS(fit_piecewise(0, 0.01, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_piecewise(3, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_piecewise(3, -1.0, 10.0), std::invalid_argument);
}

TEST_SUITE_END();
