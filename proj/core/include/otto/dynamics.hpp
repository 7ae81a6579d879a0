#pragma once

// Stroke propagators. Three generator classes are supported:
//   * closed evolution under H0(omega_t), optionally with the counter-diabatic
//     term (adiabats),
//   * a thermal GKLS channel at fixed frequency (uncontrolled isochores),
//   * the shortcut-to-equilibrium master equation in the chirped frame
//     (controlled hot isochore).
// Each propagator returns a StrokeLedger with the integrated work, heat and
// control cost, sampled observables, and numerical diagnostics.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "otto/fock.hpp"
#include "otto/protocols.hpp"

namespace otto {

struct PropagationTolerances {
  double step_trace = 1e-9;        // |Tr rho - 1| allowed after one RK4 step
  double total_trace = 1e-8;       // accumulated over a stroke
  double hermiticity = 1e-9;       // max |M - M^dagger| before re-hermitization
  double positivity_floor = -1e-8; // smallest eigenvalue allowed at checkpoints
};

/// Time-grid policy. A stroke of length tau is split into
///   n = substeps * max(min_steps, ceil(tau * spectral_bound / stiffness_limit))
/// equal RK4 steps (rounded up to even n for Simpson quadrature). The
/// spectral bound is a Gershgorin estimate of the generator norm, so the cap
/// only binds where the default tau/min_steps would leave the RK4 stability
/// region.
struct PropagationSettings {
  int min_steps = 2000;
  double stiffness_limit = 2.0;
  int substeps = 1;
  int record_stride = 100;  // positivity checkpoint and sample spacing, in steps
  /// Propagate even and odd levels as separate blocks when the start state
  /// has no coherence between them (exact for every generator here).
  bool exploit_parity = true;
  PropagationTolerances tolerances{};

  void validate() const;
  /// Same settings with every time step halved.
  PropagationSettings refined() const;
  int steps_for(double duration, double spectral_bound) const;
};

/// End states with more weight than this in the top Fock level get a warning.
/// Gibbs states at the hot corner already hold about 1e-4 there at dim 80.
inline constexpr double kTailWarning = 1e-3;

/// d rho/dt = generator(t, rho); the output is written into the third argument.
using Generator = std::function<void(double t, const Matrix& rho, Matrix& drho)>;

/// One classical RK4 step. The result is re-hermitized and renormalized;
/// throws PropagationError if the trace moved by more than tol.step_trace or
/// the smallest eigenvalue is below tol.positivity_floor.
DensityMatrix rk4_step(const DensityMatrix& rho, const Generator& generator, double t, double dt,
                       const PropagationTolerances& tol = {});

/// Thermal bath coupling obeying detailed balance:
/// k_up = Gamma nbar, k_down = Gamma (nbar + 1), nbar = 1/(exp(omega/T) - 1).
class ThermalChannel {
 public:
  ThermalChannel(double conductivity, double omega, double temperature);

  double conductivity() const noexcept { return conductivity_; }
  double omega() const noexcept { return omega_; }
  double temperature() const noexcept { return temperature_; }
  double mean_occupation() const noexcept { return nbar_; }
  double k_up() const noexcept { return conductivity_ * nbar_; }
  double k_down() const noexcept { return conductivity_ * (nbar_ + 1.0); }

 private:
  double conductivity_;
  double omega_;
  double temperature_;
  double nbar_;
};

enum class StrokeKind { Adiabat, ControlledAdiabat, Thermalization, ShortcutToEquilibrium };

std::string to_string(StrokeKind kind);

/// Observables at one time point of a stroke.
struct StrokeSample {
  double t = 0.0;
  double omega = 0.0;
  double energy = 0.0;     // Tr(rho H0(omega_t)); chirped-frame state on STE strokes
  double cd_energy = 0.0;  // <H1> via the generalized-oscillator relation (controlled adiabats)
  double h1_raw = 0.0;     // Tr(rho H1) (controlled adiabats)
};

struct StrokeLedger {
  explicit StrokeLedger(DensityMatrix state) : end_state(std::move(state)) {}

  StrokeKind kind = StrokeKind::Adiabat;
  double duration = 0.0;
  int steps = 0;

  double work = 0.0;                // integral of Tr(dH0/dt rho)
  double heat = 0.0;                // conventional heat: GKLS integral, or Delta E on STE strokes
  double cd_cost = 0.0;             // time-averaged <H1> (adiabats) or integral |dW_CD| (STE)
  double heat_entropy_based = 0.0;  // integral of Tr(D(rho~) H0), STE strokes only
  double cd_work = 0.0;             // energy from the control field (adiabats) or W_CD (STE)
  double energy_start = 0.0;
  double energy_end = 0.0;

  DensityMatrix end_state;

  double trace_drift = 0.0;        // accumulated |Tr rho - 1| before renormalization
  double positivity_floor = 0.0;   // smallest eigenvalue seen at checkpoints
  double hermiticity_drift = 0.0;  // largest pre-hermitization defect
  double tail_population = 0.0;    // end-state population of the top Fock level

  std::vector<StrokeSample> samples;
  std::vector<std::string> warnings;
};

/// Unitary stroke along a frequency ramp. With `controlled`, the
/// counter-diabatic term is added and the ramp is checked for trap inversion.
StrokeLedger evolve_adiabat(const DensityMatrix& rho0, const RampSchedule& ramp, bool controlled,
                            const PropagationSettings& settings = {});

/// Fixed-frequency GKLS stroke of length tau.
StrokeLedger evolve_gkls(const DensityMatrix& rho0, const ThermalChannel& channel, double tau,
                         const PropagationSettings& settings = {});

/// Shortcut to equilibrium at fixed frequency omega_h, inverse temperature
/// following `beta_ramp`. Propagated in the chirped frame, which coincides
/// with the lab frame at both ends.
StrokeLedger evolve_ste(const DensityMatrix& rho0, double omega_h, const RampSchedule& beta_ramp,
                        const PropagationSettings& settings = {});

/// Lab-frame state U^dagger rho~ U with U = exp(i alpha x^2 / 2).
DensityMatrix frame_transform(const DensityMatrix& chirped, double alpha);

/// exp(i alpha x^2 / 2) on the truncated basis.
OperatorMatrix chirp_unitary(double alpha, FockBasis basis);

/// Tr(rho H0(omega)).
double mean_energy(const DensityMatrix& rho, double omega);

}  // namespace otto
