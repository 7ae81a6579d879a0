#include <cmath>

#include "doctest.h"
#include "otto/protocols.hpp"
#include "support.hpp"

using namespace otto;

TEST_CASE("quintic ramp boundary values") {
  const RampPoint a = poly_ramp(0.0);
  CHECK(a.value == 0.0);
  CHECK(a.first == 0.0);
  CHECK(a.second == 0.0);
  const RampPoint b = poly_ramp(1.0);
  CHECK(std::abs(b.value - 1.0) < 1e-12);
  CHECK(std::abs(b.first) < 1e-12);
  CHECK(std::abs(b.second) < 1e-12);
  CHECK(std::abs(poly_ramp(0.5).value - 0.5) < 1e-15);
  CHECK_THROWS_AS(poly_ramp(-0.01), InvalidArgument);
  CHECK_THROWS_AS(poly_ramp(1.01), InvalidArgument);
}

TEST_CASE("quintic ramp derivatives match finite differences") {
  const double h = 1e-6;
  for (int k = 1; k < 1000; ++k) {
    const double s = k / 1000.0;
    const RampPoint p = poly_ramp(s);
    const double d1 = (poly_ramp(s + h).value - poly_ramp(s - h).value) / (2 * h);
    const double d2 = (poly_ramp(s + h).first - poly_ramp(s - h).first) / (2 * h);
    CHECK(std::abs(d1 - p.first) < 1e-6);
    CHECK(std::abs(d2 - p.second) < 1e-6);
  }
}

TEST_CASE("frequency schedule") {
  const RampSchedule ramp(1.0, 2.5, 0.7);
  const RampPoint w0 = omega_at(0.0, ramp);
  CHECK(w0.value == 1.0);
  CHECK(w0.first == 0.0);
  CHECK(w0.second == 0.0);
  const RampPoint wt = omega_at(0.7, ramp);
  CHECK(std::abs(wt.value - 2.5) < 1e-12);
  CHECK(std::abs(wt.first) < 1e-12);
  CHECK(std::abs(wt.second) < 1e-12);

  const RampPoint mid = omega_at(0.35, ramp);
  CHECK(std::abs(mid.value - 1.75) < 1e-12);
  // 30 s^2 (1 - s)^2 = 1.875 at s = 1/2, times (2.5 - 1) / 0.7.
  CHECK(std::abs(mid.first - 1.875 * 1.5 / 0.7) < 1e-12);
  CHECK(std::abs(mid.first - 4.0179) < 1e-4);
  const double h = 1e-6;
  const double fd = (omega_at(0.35 + h, ramp).value - omega_at(0.35 - h, ramp).value) / (2 * h);
  CHECK(std::abs(fd - mid.first) < 1e-6);

  for (int k = 1; k < 1000; ++k) {
    const double t = 0.7 * k / 1000.0;
    const RampPoint p = ramp.at(t);
    const double t_hi = std::min(t + h, 0.7);
    const double t_lo = std::max(t - h, 0.0);
    const double d2 = (ramp.at(t_hi).first - ramp.at(t_lo).first) / (t_hi - t_lo);
    CHECK(std::abs(d2 - p.second) < 1e-5 * std::max(1.0, std::abs(p.second)));
  }
  CHECK_THROWS_AS(ramp.at(0.8), InvalidArgument);
  CHECK_THROWS_AS(RampSchedule(1.0, 2.5, 0.0), InvalidArgument);
}

TEST_CASE("effective frequency and trap inversion") {
  CHECK(effective_frequency(1.7, 0.0) == 1.7);
  CHECK_THROWS_AS(effective_frequency(1.0, 2.0), TrapInversion);
  CHECK_THROWS_AS(effective_frequency(1.0, 2.5), TrapInversion);
  CHECK(effective_frequency(1.0, 1.0) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));

  for (double tau : {0.7, 1.0, 2.0, 7.5}) {
    CHECK(check_trap_inversion(RampSchedule(1.0, 2.5, tau)) > 0.0);
    CHECK(check_trap_inversion(RampSchedule(2.5, 1.0, tau)) > 0.0);
  }
  // Fast enough ramps do invert the trap.
  CHECK_THROWS_AS(check_trap_inversion(RampSchedule(2.5, 1.0, 0.2)), TrapInversion);
}

TEST_CASE("counter-diabatic term") {
  const FockBasis b(30);
  CHECK(otto::testing::max_abs(h1_sta(1.3, 0.0, b).entries()) == 0.0);
  for (double wd : {-3.0, 0.5, 4.0}) {
    CHECK(h1_sta(1.75, wd, b).hermiticity_defect() < 1e-12);
  }
  const RampSchedule ramp(1.0, 2.5, 0.7);
  for (double t : {0.0, 0.7}) {
    const RampPoint w = ramp.at(t);
    CHECK(otto::testing::max_abs(h1_sta(w.value, w.first, b).entries()) < 1e-12);
  }
}

TEST_CASE("shortcut-to-equilibrium schedule") {
  const double wh = 2.5;
  const RampSchedule beta(0.4, 0.1, 2.0);

  SUBCASE("stationary at both ends") {
    for (double t : {0.0, 2.0}) {
      const SteParams s = ste_params_at(t, wh, beta);
      CHECK(std::abs(s.u_dot) < 1e-12);
      CHECK(std::abs(s.alpha) < 1e-12);
      CHECK(std::abs(s.gamma) < 1e-12);
      CHECK(std::abs(s.omega_cd_sq - wh * wh) < 1e-10);
    }
  }
  SUBCASE("heating ramp dephases with positive rate") {
    const SteParams mid = ste_params_at(1.0, wh, beta);
    CHECK(mid.gamma > 0.0);
    // u = exp(-0.25 * 2.5), beta_dot = -0.3 * 1.875 / 2.
    const double u = std::exp(-0.625);
    const double u_dot = 2.5 * 0.3 * 1.875 / 2.0 * u;
    CHECK(std::abs(mid.u - u) < 1e-14);
    CHECK(std::abs(mid.u_dot - u_dot) < 1e-12);
    CHECK(std::abs(mid.gamma - wh * u_dot / ((1 - u) * (1 - u))) < 1e-12);
    for (int k = 0; k <= 100; ++k) {
      CHECK(ste_params_at(2.0 * k / 100.0, wh, beta).gamma >= 0.0);
    }
  }
  SUBCASE("alpha is the derivative of atanh(u)") {
    const double h = 1e-6;
    auto primitive = [&](double t) { return std::atanh(ste_params_at(t, wh, beta).u); };
    for (int k = 1; k < 200; ++k) {
      const double t = 2.0 * k / 200.0;
      const SteParams s = ste_params_at(t, wh, beta);
      CHECK(std::abs((primitive(t + h) - primitive(t - h)) / (2 * h) - s.alpha) < 1e-6);
      const double ad =
          (ste_params_at(t + h, wh, beta).alpha - ste_params_at(t - h, wh, beta).alpha) / (2 * h);
      CHECK(std::abs(ad - s.alpha_dot) < 1e-6);
      CHECK(std::abs(s.omega_cd_sq - (wh * wh - s.alpha * s.alpha - s.alpha_dot)) < 1e-12);
    }
  }
  SUBCASE("degenerate ramp is free evolution") {
    const RampSchedule flat(0.25, 0.25, 1.0);
    for (double t : {0.0, 0.3, 1.0}) {
      const SteParams s = ste_params_at(t, wh, flat);
      CHECK(s.gamma == 0.0);
      CHECK(s.alpha == 0.0);
      CHECK(s.omega_cd_sq == wh * wh);
    }
  }
  SUBCASE("infinite temperature is refused") {
    CHECK_THROWS_AS(ste_params_at(0.0, wh, RampSchedule(1e-14, 0.1, 1.0)), ParameterBlowUp);
  }
  SUBCASE("general schedule reduces to the isochoric one") {
    const RampSchedule flat(wh, wh, 2.0);
    for (double t : {0.3, 1.0, 1.7}) {
      const SteParams a = ste_params_at(t, wh, beta);
      const SteParams g = experimental::ste_params_general(t, flat, beta);
      CHECK(std::abs(a.alpha - g.alpha) < 1e-14);
      CHECK(std::abs(a.omega_cd_sq - g.omega_cd_sq) < 1e-12);
    }
  }
}
