#include "otto/protocols.hpp"

#include <cmath>
#include <string>

namespace otto {

RampPoint poly_ramp(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InvalidArgument("ramp parameter s=" + std::to_string(s) + " outside [0,1]");
  }
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {
      s3 * (10.0 - 15.0 * s + 6.0 * s2),
      s2 * (30.0 - 60.0 * s + 30.0 * s2),
      s * (60.0 - 180.0 * s + 120.0 * s2),
  };
}

RampSchedule::RampSchedule(double start_value, double end_value, double duration)
    : start_(start_value), end_(end_value), duration_(duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("ramp duration must be positive, got " + std::to_string(duration));
  }
  if (!std::isfinite(start_value) || !std::isfinite(end_value)) {
    throw InvalidArgument("ramp end points must be finite");
  }
}

RampPoint RampSchedule::at(double t) const {
  if (!(t >= 0.0 && t <= duration_)) {
    throw InvalidArgument("time t=" + std::to_string(t) + " outside the ramp [0, " +
                          std::to_string(duration_) + "]");
  }
  const RampPoint shape = poly_ramp(t / duration_);
  const double span = end_ - start_;
  return {
      start_ + span * shape.value,
      span * shape.first / duration_,
      span * shape.second / (duration_ * duration_),
  };
}

RampPoint omega_at(double t, const RampSchedule& ramp) { return ramp.at(t); }

double effective_frequency(double omega, double omega_dot, double t) {
  if (!(omega > 0.0)) {
    throw InvalidArgument("frequency must be positive, got " + std::to_string(omega));
  }
  const double omega2 = omega * omega;
  const double radicand = 1.0 - omega_dot * omega_dot / (4.0 * omega2 * omega2);
  if (!(radicand > 0.0)) {
    throw TrapInversion(t, omega, omega_dot);
  }
  return omega * std::sqrt(radicand);
}

double check_trap_inversion(const RampSchedule& ramp, int samples) {
  if (samples < 1) {
    throw InvalidArgument("trap-inversion scan needs at least one interval");
  }
  double margin = 1.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = ramp.duration() * static_cast<double>(k) / samples;
    const RampPoint w = ramp.at(t);
    if (!(w.value > 0.0)) {
      throw InvalidArgument("frequency ramp crosses zero at t=" + std::to_string(t));
    }
    effective_frequency(w.value, w.first, t);
    const double w2 = w.value * w.value;
    margin = std::min(margin, 1.0 - w.first * w.first / (4.0 * w2 * w2));
  }
  return margin;
}

OperatorMatrix h1_sta(double omega, double omega_dot, FockBasis basis) {
  if (!(omega > 0.0)) {
    throw InvalidArgument("frequency must be positive, got " + std::to_string(omega));
  }
  const auto [x, p] = build_xp(basis);
  return Complex{-omega_dot / (4.0 * omega)} * anticommutator(x, p);
}

namespace {

// Boltzmann factor u = exp(-beta omega) and its first two time derivatives,
// for omega and beta given with their derivatives.
RampPoint boltzmann_factor(const RampPoint& beta, const RampPoint& omega) {
  const double exponent = beta.value * omega.value;
  const double exponent_dot = beta.first * omega.value + beta.value * omega.first;
  const double exponent_ddot = beta.second * omega.value + 2.0 * beta.first * omega.first +
                               beta.value * omega.second;
  const double u = std::exp(-exponent);
  const double u_dot = -exponent_dot * u;
  const double u_ddot = -exponent_ddot * u - exponent_dot * u_dot;
  return {u, u_dot, u_ddot};
}

SteParams assemble(const RampPoint& u, const RampPoint& omega) {
  if (1.0 - u.value < kBoltzmannGuard) {
    throw ParameterBlowUp("Boltzmann factor u=" + std::to_string(u.value) +
                          " too close to 1 (temperature diverges)");
  }
  const double one_minus_u2 = 1.0 - u.value * u.value;
  const double drift = omega.first / (2.0 * omega.value);
  const double drift_dot = omega.second / (2.0 * omega.value) -
                           omega.first * omega.first / (2.0 * omega.value * omega.value);

  SteParams out;
  out.u = u.value;
  out.u_dot = u.first;
  out.zeta = -drift + u.first / one_minus_u2;
  out.alpha = out.zeta - drift;
  out.alpha_dot = u.second / one_minus_u2 +
                  2.0 * u.value * u.first * u.first / (one_minus_u2 * one_minus_u2) -
                  2.0 * drift_dot;
  const double one_minus_u = 1.0 - u.value;
  out.gamma = omega.value * u.first / (one_minus_u * one_minus_u);
  out.omega_cd_sq = omega.value * omega.value - out.alpha * out.alpha - out.alpha_dot;
  return out;
}

}  // namespace

SteParams ste_params_at(double t, double omega_h, const RampSchedule& beta_ramp) {
  if (!(omega_h > 0.0)) {
    throw InvalidArgument("frequency must be positive, got " + std::to_string(omega_h));
  }
  const RampPoint beta = beta_ramp.at(t);
  const RampPoint omega{omega_h, 0.0, 0.0};
  return assemble(boltzmann_factor(beta, omega), omega);
}

namespace experimental {

SteParams ste_params_general(double t, const RampSchedule& omega_ramp,
                             const RampSchedule& beta_ramp) {
  const RampPoint omega = omega_ramp.at(t);
  if (!(omega.value > 0.0)) {
    throw InvalidArgument("frequency must be positive along the ramp");
  }
  const RampPoint beta = beta_ramp.at(t);
  return assemble(boltzmann_factor(beta, omega), omega);
}

}  // namespace experimental

}  // namespace otto
