#include "otto/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <string>

#include "otto/metrics.hpp"

namespace otto {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::UNA:
      return "UNA";
    case Variant::STA:
      return "STA";
    case Variant::STAE:
      return "STÆ";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string upper;
  for (char c : name) {
    upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (upper == "UNA") {
    return Variant::UNA;
  }
  if (upper == "STA") {
    return Variant::STA;
  }
  // "æ" has no ASCII upper-casing; match both spellings of the ligature.
  if (upper == "STAE" || upper == "STÆ" || upper == "STæ") {
    return Variant::STAE;
  }
  throw InvalidArgument("unknown engine variant '" + std::string(name) +
                        "' (expected UNA, STA, STAE)");
}

void EngineConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) + " must be positive and finite");
    }
  };
  positive(omega_c, "omega_c");
  positive(omega_h, "omega_h");
  positive(T_c, "T_c");
  positive(T_h, "T_h");
  positive(gamma_h, "gamma_h");
  positive(gamma_c, "gamma_c");
  positive(tau_adi, "tau_adi");
  positive(tau_iso, "tau_iso");
  if (!(omega_h > omega_c)) {
    throw InvalidArgument("omega_h must exceed omega_c");
  }
  if (!(T_h > T_c)) {
    throw InvalidArgument("T_h must exceed T_c");
  }
  if (dim < 2) {
    throw InvalidArgument("dim must be >= 2");
  }
  propagation.validate();
  // Hottest, softest corner of the cycle in Boltzmann terms.
  const FockBasis b(dim);
  check_truncation(omega_h, T_h, b);
  check_truncation(omega_c, T4(), b);
  check_truncation(omega_c, T_c, b);
  check_truncation(omega_h, T2(), b);
}

double CycleOutcome::tail_population() const {
  return std::max({compression.tail_population, hot.tail_population, expansion.tail_population,
                   cold.tail_population});
}

std::vector<std::string> CycleOutcome::warnings() const {
  std::vector<std::string> out;
  for (const StrokeLedger* l : {&compression, &hot, &expansion, &cold}) {
    for (const auto& w : l->warnings) {
      out.push_back(to_string(l->kind) + ": " + w);
    }
  }
  return out;
}

namespace {

template <class F>
StrokeLedger run_stroke(const char* name, F&& body) {
  try {
    return body();
  } catch (const StrokeError&) {
    throw;
  } catch (const std::exception& e) {
    throw StrokeError(name, e.what());
  }
}

}  // namespace

CycleOutcome run_cycle(const DensityMatrix& rho0, const EngineConfig& config) {
  config.validate();
  if (rho0.dim() != config.dim) {
    throw InvalidArgument("initial state dimension does not match the configured basis");
  }
  const bool controlled = config.variant != Variant::UNA;
  const PropagationSettings& ps = config.propagation;
  CycleOutcome out(rho0);

  out.compression = run_stroke("compression", [&] {
    return evolve_adiabat(rho0, RampSchedule(config.omega_c, config.omega_h, config.tau_adi),
                          controlled, ps);
  });
  out.hot = run_stroke("hot isochore", [&] {
    if (config.variant == Variant::STAE) {
      // The control law presumes a thermal start at T2, as left by an exact shortcut.
      const RampSchedule beta(1.0 / config.T2(), config.beta_h(), config.tau_iso);
      return evolve_ste(out.compression.end_state, config.omega_h, beta, ps);
    }
    return evolve_gkls(out.compression.end_state,
                       ThermalChannel(config.gamma_h, config.omega_h, config.T_h), config.tau_iso,
                       ps);
  });
  out.expansion = run_stroke("expansion", [&] {
    return evolve_adiabat(out.hot.end_state,
                          RampSchedule(config.omega_h, config.omega_c, config.tau_adi), controlled,
                          ps);
  });
  out.cold = run_stroke("cold isochore", [&] {
    return evolve_gkls(out.expansion.end_state,
                       ThermalChannel(config.gamma_c, config.omega_c, config.T_c), config.tau_iso,
                       ps);
  });
  out.end_state = out.cold.end_state;

  out.W12 = out.compression.work;
  out.Q23 = out.hot.heat;
  out.W34 = out.expansion.work;
  out.Q41 = out.cold.heat;
  const double extracted = -(out.W12 + out.W34);
  out.power = extracted / config.tau_total();
  out.eta_th = extracted / out.Q23;

  switch (config.variant) {
    case Variant::UNA:
      out.heat_in = out.Q23;
      break;
    case Variant::STA:
      out.heat_in = out.Q23;
      out.C12 = out.compression.cd_cost;
      out.C34 = out.expansion.cd_cost;
      break;
    case Variant::STAE:
      out.heat_in = out.hot.heat_entropy_based;
      out.C12 = out.compression.cd_cost;
      out.C23 = out.hot.cd_cost;
      out.C34 = out.expansion.cd_cost;
      break;
  }
  out.eta_op = extracted / (out.heat_in + out.total_cost());
  out.not_an_engine = !(out.power > 0.0) || !(out.eta_th > 0.0) || !(out.eta_op > 0.0);
  return out;
}

LimitCycleReport run_to_limit_cycle(const EngineConfig& config, double fidelity_tol,
                                    int max_cycles) {
  if (max_cycles < 1) {
    throw InvalidArgument("max_cycles must be >= 1");
  }
  if (!(fidelity_tol > 0.0 && fidelity_tol <= 1.0)) {
    throw InvalidArgument("fidelity tolerance must lie in (0, 1]");
  }
  config.validate();
  LimitCycleReport report;
  DensityMatrix state = thermal_state(config.omega_c, config.T_c, config.basis());
  for (int k = 0; k < max_cycles; ++k) {
    CycleOutcome outcome = run_cycle(state, config);
    const double f = uhlmann_fidelity(outcome.end_state, state);
    report.fidelities.push_back(f);
    report.trace_distances.push_back(trace_distance(outcome.end_state, state));
    report.coherence.push_back(l1_coherence(outcome.end_state, config.omega_c));
    state = outcome.end_state;
    report.cycles.push_back(std::move(outcome));
    report.cycles_run = k + 1;
    if (f >= fidelity_tol) {
      report.converged = true;
      break;
    }
  }
  for (const CycleOutcome& c : report.cycles) {
    report.distance_to_final.push_back(trace_distance(c.end_state, state));
  }
  return report;
}

QuasistaticLedger quasistatic_oracle(const EngineConfig& config) {
  auto coth = [](double x) { return 1.0 / std::tanh(x); };
  const double cold = coth(config.omega_c / (2.0 * config.T_c));
  const double hot = coth(config.omega_h / (2.0 * config.T_h));
  QuasistaticLedger q;
  q.W12 = 0.5 * (config.omega_h - config.omega_c) * cold;
  q.Q23 = 0.5 * config.omega_h * (hot - cold);
  q.W34 = 0.5 * (config.omega_c - config.omega_h) * hot;
  q.Q41 = 0.5 * config.omega_c * (cold - hot);
  q.eta_ideal = 1.0 - config.omega_c / config.omega_h;
  return q;
}

ReferenceBounds reference_bounds(const EngineConfig& config) {
  if (config.T_h < config.T_c || !(config.T_c > 0.0)) {
    throw InvalidArgument("reference bounds need T_h >= T_c > 0");
  }
  const double ratio = config.T_c / config.T_h;
  return {1.0 - ratio, 1.0 - std::sqrt(ratio)};
}

std::array<DensityMatrix, 4> quasistatic_endpoints(const EngineConfig& config) {
  const FockBasis b = config.basis();
  return {thermal_state(config.omega_h, config.T2(), b),
          thermal_state(config.omega_h, config.T_h, b),
          thermal_state(config.omega_c, config.T4(), b),
          thermal_state(config.omega_c, config.T_c, b)};
}

std::array<double, 4> stroke_fidelities(const CycleOutcome& outcome, const EngineConfig& config) {
  const auto refs = quasistatic_endpoints(config);
  return {uhlmann_fidelity(outcome.compression.end_state, refs[0]),
          uhlmann_fidelity(outcome.hot.end_state, refs[1]),
          uhlmann_fidelity(outcome.expansion.end_state, refs[2]),
          uhlmann_fidelity(outcome.cold.end_state, refs[3])};
}

}  // namespace otto
