#pragma once

// Control schedules: quintic ramps for frequency and inverse temperature,
// the counter-diabatic term for the adiabats, and the shortcut-to-equilibrium
// parameters for an isochore. All derivatives are analytic.

#include <limits>

#include "otto/fock.hpp"

namespace otto {

/// A scalar and its first two derivatives.
struct RampPoint {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// 10s^3 - 15s^4 + 6s^5 and its s-derivatives. Throws InvalidArgument outside [0,1].
RampPoint poly_ramp(double s);

/// Quintic interpolation start -> end over [0, duration]; derivatives in time.
class RampSchedule {
 public:
  RampSchedule(double start_value, double end_value, double duration);

  double start_value() const noexcept { return start_; }
  double end_value() const noexcept { return end_; }
  double duration() const noexcept { return duration_; }

  /// Throws InvalidArgument for t outside [0, duration].
  RampPoint at(double t) const;

 private:
  double start_;
  double end_;
  double duration_;
};

/// (omega, omega_dot, omega_ddot) at time t.
RampPoint omega_at(double t, const RampSchedule& ramp);

/// omega * sqrt(1 - omega_dot^2 / 4 omega^4). Throws TrapInversion when the
/// radicand is <= 0; `t` is only used to annotate the error.
double effective_frequency(double omega, double omega_dot,
                           double t = std::numeric_limits<double>::quiet_NaN());

/// Scans `samples`+1 evenly spaced points of a frequency ramp; throws
/// TrapInversion at the first point where the effective frequency is not real.
/// Returns min over the ramp of (1 - omega_dot^2 / 4 omega^4).
double check_trap_inversion(const RampSchedule& ramp, int samples = 10000);

/// Counter-diabatic term -(omega_dot / 4 omega)(xp + px).
OperatorMatrix h1_sta(double omega, double omega_dot, FockBasis basis);

/// Shortcut-to-equilibrium schedule values at one instant.
struct SteParams {
  double u = 0.0;          // Boltzmann factor exp(-beta omega)
  double u_dot = 0.0;
  double alpha = 0.0;      // chirp rate of the frame transformation
  double alpha_dot = 0.0;
  double zeta = 0.0;
  double gamma = 0.0;      // dephasing rate
  double omega_cd_sq = 0.0;
};

/// Boltzmann factors closer to 1 than this are treated as a divergence.
inline constexpr double kBoltzmannGuard = 1e-12;

/// Isochoric schedule: frequency held at omega_h, inverse temperature follows
/// `beta_ramp`. Throws ParameterBlowUp if 1 - u < kBoltzmannGuard.
SteParams ste_params_at(double t, double omega_h, const RampSchedule& beta_ramp);

namespace experimental {

/// Schedule with a time-dependent frequency as well. Not used by the engine;
/// the isochoric variant above is the supported path.
SteParams ste_params_general(double t, const RampSchedule& omega_ramp,
                             const RampSchedule& beta_ramp);

}  // namespace experimental

}  // namespace otto
