#include "otto/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "sectors.hpp"

#if defined(__SSE__) || defined(_M_X64)
#include <xmmintrin.h>
#define OTTO_HAVE_MXCSR 1
#endif
#include "otto/metrics.hpp"

namespace otto {

void PropagationSettings::validate() const {
  if (min_steps < 200) {
    throw InvalidArgument("min_steps must be >= 200 (dt <= tau/200), got " +
                          std::to_string(min_steps));
  }
  if (!(stiffness_limit > 0.0) || stiffness_limit > 2.5) {
    throw InvalidArgument("stiffness_limit must lie in (0, 2.5]");
  }
  if (substeps < 1) {
    throw InvalidArgument("substeps must be >= 1");
  }
  if (record_stride < 1) {
    throw InvalidArgument("record_stride must be >= 1");
  }
}

PropagationSettings PropagationSettings::refined() const {
  PropagationSettings out = *this;
  out.substeps *= 2;
  out.record_stride *= 2;
  return out;
}

int PropagationSettings::steps_for(double duration, double spectral_bound) const {
  const double stable = std::ceil(duration * spectral_bound / stiffness_limit);
  int n = std::max(min_steps, static_cast<int>(stable));
  if (n % 2 != 0) {
    ++n;
  }
  return n * substeps;
}

ThermalChannel::ThermalChannel(double conductivity, double omega, double temperature)
    : conductivity_(conductivity), omega_(omega), temperature_(temperature) {
  if (!(conductivity > 0.0) || !std::isfinite(conductivity)) {
    throw InvalidArgument("heat conductivity must be positive and finite");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidArgument("channel frequency must be positive");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("bath temperature must be positive");
  }
  nbar_ = 1.0 / std::expm1(omega / temperature);
}

std::string to_string(StrokeKind kind) {
  switch (kind) {
    case StrokeKind::Adiabat:
      return "adiabat";
    case StrokeKind::ControlledAdiabat:
      return "controlled-adiabat";
    case StrokeKind::Thermalization:
      return "thermalization";
    case StrokeKind::ShortcutToEquilibrium:
      return "shortcut-to-equilibrium";
  }
  return "unknown";
}

namespace {

using detail::DriftTerm;
using detail::JumpTerm;
using detail::SectorLayout;
using detail::SectorOperator;
using detail::Sectors;

struct StepDiagnostics {
  double trace_error = 0.0;
  double hermiticity = 0.0;
};

class Rk4Workspace {
 public:
  explicit Rk4Workspace(const Sectors& shape)
      : k1_(shape), k2_(shape), k3_(shape), k4_(shape), stage_(shape) {}

  // Advances rho in place, then restores Hermiticity. The trace is left for
  // the caller to check and restore.
  template <class Gen>
  StepDiagnostics step(Sectors& rho, Gen& generator, double t, double dt) {
    const double half = 0.5 * dt;
    const std::size_t count = rho.size();
    generator(t, rho, k1_);
    for (std::size_t s = 0; s < count; ++s) {
      stage_[s] = rho[s] + half * k1_[s];
    }
    generator(t + half, stage_, k2_);
    for (std::size_t s = 0; s < count; ++s) {
      stage_[s] = rho[s] + half * k2_[s];
    }
    generator(t + half, stage_, k3_);
    for (std::size_t s = 0; s < count; ++s) {
      stage_[s] = rho[s] + dt * k3_[s];
    }
    generator(t + dt, stage_, k4_);

    StepDiagnostics diag;
    double tr = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      rho[s] += (dt / 6.0) * (k1_[s] + 2.0 * k2_[s] + 2.0 * k3_[s] + k4_[s]);
      stage_[s] = rho[s].adjoint();
      diag.hermiticity =
          std::max(diag.hermiticity, std::sqrt((rho[s] - stage_[s]).cwiseAbs2().maxCoeff()));
      rho[s] = 0.5 * (rho[s] + stage_[s]);
      tr += rho[s].trace().real();
    }
    diag.trace_error = std::abs(tr - 1.0);
    return diag;
  }

 private:
  Sectors k1_, k2_, k3_, k4_, stage_;
};

double trace_of(const Sectors& rho) {
  double tr = 0.0;
  for (const Matrix& b : rho) {
    tr += b.trace().real();
  }
  return tr;
}

double min_eigenvalue(const Sectors& rho) {
  double lmin = std::numeric_limits<double>::infinity();
  for (const Matrix& b : rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues().minCoeff());
  }
  return lmin;
}

// Tracks per-step diagnostics of one stroke and enforces the tolerances.
class StrokeMonitor {
 public:
  explicit StrokeMonitor(const PropagationTolerances& tol) : tol_(tol) {}

  void after_step(Sectors& rho, const StepDiagnostics& diag, double t) {
    if (diag.trace_error >= tol_.step_trace) {
      throw PropagationError("trace drift " + std::to_string(diag.trace_error) +
                                 " in one step at t=" + std::to_string(t),
                             t);
    }
    if (diag.hermiticity > tol_.hermiticity) {
      throw PropagationError("hermiticity drift " + std::to_string(diag.hermiticity) +
                                 " at t=" + std::to_string(t),
                             t);
    }
    const double tr = trace_of(rho);
    for (Matrix& b : rho) {
      b /= tr;
    }
    trace_drift_ += diag.trace_error;
    hermiticity_drift_ = std::max(hermiticity_drift_, diag.hermiticity);
    if (trace_drift_ >= tol_.total_trace) {
      throw PropagationError("accumulated trace drift " + std::to_string(trace_drift_), t);
    }
  }

  void checkpoint(const Sectors& rho, double t) {
    const double lmin = min_eigenvalue(rho);
    positivity_floor_ = std::min(positivity_floor_, lmin);
    if (lmin < tol_.positivity_floor) {
      throw PropagationError("positivity floor " + std::to_string(lmin) +
                                 " at t=" + std::to_string(t),
                             t);
    }
  }

  void fill(StrokeLedger& ledger) const {
    ledger.trace_drift = trace_drift_;
    ledger.hermiticity_drift = hermiticity_drift_;
    ledger.positivity_floor = std::min(0.0, positivity_floor_);
  }

 private:
  PropagationTolerances tol_;
  double trace_drift_ = 0.0;
  double hermiticity_drift_ = 0.0;
  double positivity_floor_ = 1.0;
};

double simpson_weight(int k, int n, double dt) {
  if (k == 0 || k == n) {
    return dt / 3.0;
  }
  return (k % 2 == 1 ? 4.0 : 2.0) * dt / 3.0;
}

// Decaying coherences underflow into subnormals on long dissipative strokes,
// which slows x86 arithmetic by orders of magnitude; flush them to zero.
class FlushSubnormals {
 public:
#ifdef OTTO_HAVE_MXCSR
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
};

// Drives the fixed-step loop shared by every stroke. `observe(k, t, rho)` is
// called on every grid point k = 0..n with the state at that point.
template <class Gen, class Observe>
void integrate(Sectors& rho, double tau, int n, Gen& generator, Observe&& observe,
               const PropagationSettings& settings, StrokeMonitor& monitor) {
  const FlushSubnormals ftz;
  Rk4Workspace ws(rho);
  const double dt = tau / n;
  monitor.checkpoint(rho, 0.0);
  observe(0, 0.0, rho);
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const StepDiagnostics diag = ws.step(rho, generator, t, dt);
    const double t_next = (k + 1 == n) ? tau : (k + 1) * dt;
    monitor.after_step(rho, diag, t_next);
    if ((k + 1) % settings.record_stride == 0 || k + 1 == n) {
      monitor.checkpoint(rho, t_next);
    }
    observe(k + 1, t_next, rho);
  }
}

bool is_sample_point(int k, int n, int stride) { return k % stride == 0 || k == n; }

Matrix minus_i_commutator(const Matrix& a, const Matrix& b) {
  return Complex{0.0, -1.0} * (a * b - b * a);
}

// Quadratures of the number basis, dense and cut along a layout.
struct QuadraticOperators {
  Matrix x_dense;
  Matrix x2_dense;
  Matrix p2_dense;
  Matrix xps_dense;  // xp + px
  SectorOperator x2;
  SectorOperator p2;
  SectorOperator xps;

  QuadraticOperators(FockBasis basis, const SectorLayout& layout) {
    const auto [xo, po] = build_xp(basis);
    x_dense = xo.entries();
    const Matrix& pm = po.entries();
    x2_dense = x_dense * x_dense;
    p2_dense = pm * pm;
    xps_dense = x_dense * pm + pm * x_dense;
    x2 = SectorOperator(x2_dense, layout);
    p2 = SectorOperator(p2_dense, layout);
    xps = SectorOperator(xps_dense, layout);
  }
};

Sectors scratch_like(const Sectors& rho) { return rho; }

}  // namespace

DensityMatrix rk4_step(const DensityMatrix& rho, const Generator& generator, double t, double dt,
                       const PropagationTolerances& tol) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  Sectors state{rho.entries()};
  auto adapter = [&](double tt, const Sectors& in, Sectors& out) { generator(tt, in[0], out[0]); };
  Rk4Workspace ws(state);
  StrokeMonitor monitor(tol);
  const StepDiagnostics diag = ws.step(state, adapter, t, dt);
  monitor.after_step(state, diag, t + dt);
  monitor.checkpoint(state, t + dt);
  return {rho.basis(), std::move(state[0])};
}

double mean_energy(const DensityMatrix& rho, double omega) {
  return rho.expectation(hamiltonian_h0(omega, rho.basis()));
}

namespace {

void note_truncation(StrokeLedger& ledger) {
  const int top = ledger.end_state.dim() - 1;
  ledger.tail_population = ledger.end_state(top, top).real();
  if (ledger.tail_population > kTailWarning) {
    ledger.warnings.push_back("population " + std::to_string(ledger.tail_population) +
                              " in the top Fock level; results depend on dim");
  }
}

}  // namespace

StrokeLedger evolve_adiabat(const DensityMatrix& rho0, const RampSchedule& ramp, bool controlled,
                            const PropagationSettings& settings) {
  settings.validate();
  if (!(ramp.start_value() > 0.0 && ramp.end_value() > 0.0)) {
    throw InvalidArgument("frequency ramp end points must be positive");
  }
  if (controlled) {
    check_trap_inversion(ramp);
  }
  const FockBasis basis = rho0.basis();
  const SectorLayout layout = detail::choose_layout(rho0.entries(), settings.exploit_parity);
  const QuadraticOperators ops(basis, layout);
  const double tau = ramp.duration();

  // Energy flowing into H0 through the counter-diabatic term: -i[H0, H1] is
  // kappa * (Cp/2 + omega^2 Cx/2) with kappa = -omega_dot / (4 omega).
  const SectorOperator cx(minus_i_commutator(ops.x2_dense, ops.xps_dense), layout);
  const SectorOperator cp(minus_i_commutator(ops.p2_dense, ops.xps_dense), layout);

  const double omega_max = std::max(ramp.start_value(), ramp.end_value());
  double kappa_max = 0.0;
  if (controlled) {
    for (int k = 0; k <= 2000; ++k) {
      const RampPoint w = ramp.at(tau * k / 2000.0);
      kappa_max = std::max(kappa_max, std::abs(w.first / (4.0 * w.value)));
    }
  }
  // Eigenvalues of -i[H, .] are level differences. p^2 and x^2 are positive,
  // so their spread is at most their norm; xp + px is indefinite.
  const double spread = 0.5 * ops.p2.norm_bound() +
                        0.5 * omega_max * omega_max * ops.x2.norm_bound() +
                        2.0 * kappa_max * ops.xps.norm_bound();
  const int n = settings.steps_for(tau, spread);
  const double dt = tau / n;

  DriftTerm drift(layout, {&ops.p2, &ops.x2, &ops.xps});
  std::vector<Complex> coefs(3);
  Sectors rho = layout.split(rho0.entries());
  Sectors scratch = scratch_like(rho);
  auto generator = [&](double t, const Sectors& state, Sectors& out) {
    const RampPoint w = ramp.at(std::min(t, tau));
    const double kappa = controlled ? -w.first / (4.0 * w.value) : 0.0;
    const Complex mi{0.0, -1.0};
    coefs[0] = mi * 0.5;
    coefs[1] = mi * (0.5 * w.value * w.value);
    coefs[2] = mi * kappa;
    drift.set(coefs);
    drift.apply(state, out, scratch);
  };

  StrokeLedger ledger(rho0);
  ledger.kind = controlled ? StrokeKind::ControlledAdiabat : StrokeKind::Adiabat;
  ledger.duration = tau;
  ledger.steps = n;

  auto observe = [&](int k, double t, const Sectors& state) {
    const RampPoint w = ramp.at(t);
    const double xx = ops.x2.trace_real(state);
    const double pp = ops.p2.trace_real(state);
    const double energy = 0.5 * pp + 0.5 * w.value * w.value * xx;
    const double weight = simpson_weight(k, n, dt);
    ledger.work += weight * w.value * w.first * xx;

    double cd_energy = 0.0;
    double h1_raw = 0.0;
    if (controlled) {
      const double kappa = -w.first / (4.0 * w.value);
      const double big_omega = effective_frequency(w.value, w.first, t);
      cd_energy = energy * (w.value / big_omega - 1.0);
      h1_raw = kappa * ops.xps.trace_real(state);
      const double field_power =
          kappa * (0.5 * cp.trace_real(state) + 0.5 * w.value * w.value * cx.trace_real(state));
      ledger.cd_cost += weight * cd_energy;
      ledger.cd_work += weight * field_power;
    }
    if (k == 0) {
      ledger.energy_start = energy;
    }
    if (k == n) {
      ledger.energy_end = energy;
    }
    if (is_sample_point(k, n, settings.record_stride)) {
      ledger.samples.push_back({t, w.value, energy, cd_energy, h1_raw});
    }
  };

  StrokeMonitor monitor(settings.tolerances);
  integrate(rho, tau, n, generator, observe, settings, monitor);
  monitor.fill(ledger);
  ledger.cd_cost /= tau;
  ledger.end_state = DensityMatrix(basis, layout.merge(rho));
  note_truncation(ledger);
  return ledger;
}

StrokeLedger evolve_gkls(const DensityMatrix& rho0, const ThermalChannel& channel, double tau,
                         const PropagationSettings& settings) {
  settings.validate();
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("stroke duration must be positive");
  }
  const FockBasis basis = rho0.basis();
  const int dim = basis.dim();
  const EnergyEigenbasis eb = energy_eigenbasis(channel.omega(), basis);
  const Matrix v = eb.vectors.cast<Complex>();
  const double k_up = channel.k_up();
  const double k_down = channel.k_down();

  // The channel acts on the ladder of H0(omega) eigenstates: a|n> = sqrt(n)|n-1>.
  const auto [lower, raise] = build_ladder(basis);
  const Matrix& a = lower.entries();
  const Matrix& ad = raise.entries();
  const Matrix energy = eb.energies.cast<Complex>().asDiagonal();
  const Matrix mi_energy = Complex{0.0, -1.0} * energy;
  const Matrix anti = -0.5 * (k_down * (ad * a) + k_up * (a * ad));
  const Matrix heat_rate = k_down * (ad * energy * a) + k_up * (a * energy * ad) +
                           anti * energy + energy * anti;

  Matrix in_eigenbasis = v.adjoint() * rho0.entries() * v;
  in_eigenbasis = 0.5 * (in_eigenbasis + in_eigenbasis.adjoint()).eval();
  const SectorLayout layout = detail::choose_layout(in_eigenbasis, settings.exploit_parity);
  const SectorOperator drift_op(mi_energy + anti, layout);
  const SectorOperator energy_op(energy, layout);
  const SectorOperator heat_op(heat_rate, layout);
  DriftTerm drift(layout, {&drift_op});
  drift.set({Complex{1.0, 0.0}});
  JumpTerm emit(a, layout);
  JumpTerm absorb(ad, layout);

  Sectors rho = layout.split(in_eigenbasis);
  Sectors scratch = scratch_like(rho);
  auto generator = [&](double, const Sectors& state, Sectors& out) {
    drift.apply(state, out, scratch);
    emit.apply_add(k_down, state, out);
    absorb.apply_add(k_up, state, out);
  };

  const double bound =
      (eb.energies.maxCoeff() - eb.energies.minCoeff()) + 2.0 * (k_up + k_down) * dim;
  const int n = settings.steps_for(tau, bound);
  const double dt = tau / n;

  StrokeLedger ledger(rho0);
  ledger.kind = StrokeKind::Thermalization;
  ledger.duration = tau;
  ledger.steps = n;

  auto observe = [&](int k, double t, const Sectors& state) {
    const double e = energy_op.trace_real(state);
    ledger.heat += simpson_weight(k, n, dt) * heat_op.trace_real(state);
    if (k == 0) {
      ledger.energy_start = e;
    }
    if (k == n) {
      ledger.energy_end = e;
    }
    if (is_sample_point(k, n, settings.record_stride)) {
      ledger.samples.push_back({t, channel.omega(), e, 0.0, 0.0});
    }
  };

  StrokeMonitor monitor(settings.tolerances);
  integrate(rho, tau, n, generator, observe, settings, monitor);
  monitor.fill(ledger);
  Matrix lab = v * layout.merge(rho) * v.adjoint();
  lab = 0.5 * (lab + lab.adjoint()).eval();
  ledger.end_state = DensityMatrix(basis, std::move(lab));
  note_truncation(ledger);
  return ledger;
}

StrokeLedger evolve_ste(const DensityMatrix& rho0, double omega_h, const RampSchedule& beta_ramp,
                        const PropagationSettings& settings) {
  settings.validate();
  if (!(omega_h > 0.0)) {
    throw InvalidArgument("frequency must be positive");
  }
  const FockBasis basis = rho0.basis();
  const SectorLayout layout = detail::choose_layout(rho0.entries(), settings.exploit_parity);
  const QuadraticOperators ops(basis, layout);
  const double tau = beta_ramp.duration();

  StrokeLedger ledger(rho0);
  ledger.kind = StrokeKind::ShortcutToEquilibrium;
  ledger.duration = tau;

  // The control law presumes a thermal start at the initial inverse temperature.
  try {
    const DensityMatrix expected = thermal_state(omega_h, 1.0 / beta_ramp.start_value(), basis);
    const double f = uhlmann_fidelity(rho0, expected);
    if (f < 0.99) {
      ledger.warnings.push_back("initial state fidelity " + std::to_string(f) +
                                " to the presumed thermal start");
    }
  } catch (const Error& e) {
    ledger.warnings.push_back(std::string("could not compare with the presumed start: ") +
                              e.what());
  }

  const Matrix h0_dense = 0.5 * ops.p2_dense + 0.5 * omega_h * omega_h * ops.x2_dense;
  const Matrix& xm = ops.x_dense;
  const Matrix xh = xm * h0_dense - h0_dense * xm;
  // Tr(D~(rho) H0) = gamma Tr(rho Kq) with Kq = -[x,[x,H0]].
  const SectorOperator kq(-(xm * xh - xh * xm), layout);
  // -i Tr([H0, H~_CD] rho) = (omega_cd^2 - omega^2)/2 * Tr(rho Kw), Kw = -i[H0, x^2].
  const SectorOperator kw(minus_i_commutator(h0_dense, ops.x2_dense), layout);

  double gamma_max = 0.0;
  double omega_cd_sq_max = omega_h * omega_h;
  for (int k = 0; k <= 4000; ++k) {
    const SteParams sp = ste_params_at(tau * k / 4000.0, omega_h, beta_ramp);
    gamma_max = std::max(gamma_max, std::abs(sp.gamma));
    omega_cd_sq_max = std::max(omega_cd_sq_max, std::abs(sp.omega_cd_sq));
  }
  const double x_norm = detail::BandedMatrix::from_dense(xm, 1e-14).norm_bound();
  const double spread = 0.5 * ops.p2.norm_bound() + 0.5 * omega_cd_sq_max * ops.x2.norm_bound();
  const int n = settings.steps_for(tau, spread + 4.0 * gamma_max * x_norm * x_norm);
  const double dt = tau / n;
  ledger.steps = n;

  // B = -i H~ - gamma x^2, so B rho + (B rho)^dagger = -i[H~, rho] - gamma{x^2, rho}.
  DriftTerm drift(layout, {&ops.p2, &ops.x2});
  JumpTerm dephasing(xm, layout);
  std::vector<Complex> coefs(2);
  Sectors rho = layout.split(rho0.entries());
  Sectors scratch = scratch_like(rho);
  auto generator = [&](double t, const Sectors& state, Sectors& out) {
    const SteParams sp = ste_params_at(std::min(t, tau), omega_h, beta_ramp);
    const Complex mi{0.0, -1.0};
    coefs[0] = mi * 0.5;
    coefs[1] = mi * (0.5 * sp.omega_cd_sq) - sp.gamma;
    drift.set(coefs);
    drift.apply(state, out, scratch);
    dephasing.apply_add(2.0 * sp.gamma, state, out);
  };

  auto observe = [&](int k, double t, const Sectors& state) {
    const SteParams sp = ste_params_at(t, omega_h, beta_ramp);
    const double xx = ops.x2.trace_real(state);
    const double pp = ops.p2.trace_real(state);
    const double energy = 0.5 * pp + 0.5 * omega_h * omega_h * xx;
    const double weight = simpson_weight(k, n, dt);
    const double dissipative_work_rate =
        0.5 * (sp.omega_cd_sq - omega_h * omega_h) * kw.trace_real(state);
    ledger.heat_entropy_based += weight * sp.gamma * kq.trace_real(state);
    ledger.cd_work += weight * dissipative_work_rate;
    ledger.cd_cost += weight * std::abs(dissipative_work_rate);
    if (k == 0) {
      ledger.energy_start = energy;
    }
    if (k == n) {
      ledger.energy_end = energy;
    }
    if (is_sample_point(k, n, settings.record_stride)) {
      ledger.samples.push_back({t, omega_h, energy, 0.0, 0.0});
    }
  };

  StrokeMonitor monitor(settings.tolerances);
  integrate(rho, tau, n, generator, observe, settings, monitor);
  monitor.fill(ledger);
  ledger.heat = ledger.energy_end - ledger.energy_start;
  ledger.end_state = DensityMatrix(basis, layout.merge(rho));
  note_truncation(ledger);
  return ledger;
}

OperatorMatrix chirp_unitary(double alpha, FockBasis basis) {
  if (!std::isfinite(alpha)) {
    throw InvalidArgument("chirp rate must be finite");
  }
  const auto [x, p] = build_xp(basis);
  const RealMatrix x2 = (x * x).entries().real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(x2);
  const Eigen::VectorXcd phases =
      (Complex{0.0, 0.5 * alpha} * es.eigenvalues().cast<Complex>()).array().exp();
  const Matrix vecs = es.eigenvectors().cast<Complex>();
  return {basis, vecs * phases.asDiagonal() * vecs.adjoint()};
}

DensityMatrix frame_transform(const DensityMatrix& chirped, double alpha) {
  const Matrix u = chirp_unitary(alpha, chirped.basis()).entries();
  Matrix lab = u.adjoint() * chirped.entries() * u;
  lab = 0.5 * (lab + lab.adjoint()).eval();
  return {chirped.basis(), std::move(lab)};
}

}  // namespace otto
