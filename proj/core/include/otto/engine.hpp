#pragma once

// Four-stroke Otto cycle for the three controlled/uncontrolled variants,
// limit-cycle iteration and closed-form quasistatic references.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "otto/dynamics.hpp"

namespace otto {

enum class Variant { UNA, STA, STAE };

/// "UNA", "STA", "STÆ".
std::string to_string(Variant v);
/// Accepts UNA, STA, STÆ and the ASCII alias STAE (case-insensitive).
Variant parse_variant(std::string_view name);

inline constexpr std::array<Variant, 3> kAllVariants{Variant::UNA, Variant::STA, Variant::STAE};

struct EngineConfig {
  double omega_c = 1.0;
  double omega_h = 2.5;
  double T_c = 1.0;
  double T_h = 10.0;
  double gamma_h = 0.22;
  double gamma_c = 0.22;
  double tau_adi = 1.0;
  double tau_iso = 1.0;
  Variant variant = Variant::UNA;
  int dim = 80;
  PropagationSettings propagation{};

  /// Throws InvalidArgument naming the offending field, TruncationError if
  /// dim cannot hold thermal(omega_h, T_h).
  void validate() const;

  double beta_c() const { return 1.0 / T_c; }
  double beta_h() const { return 1.0 / T_h; }
  double tau_total() const { return 2.0 * tau_adi + 2.0 * tau_iso; }
  /// Temperature reached by a quasistatic compression from (omega_c, T_c).
  double T2() const { return omega_h / omega_c * T_c; }
  /// Temperature reached by a quasistatic expansion from (omega_h, T_h).
  double T4() const { return omega_c / omega_h * T_h; }
  FockBasis basis() const { return FockBasis(dim); }
};

struct CycleOutcome {
  explicit CycleOutcome(DensityMatrix state)
      : compression(state), hot(state), expansion(state), cold(state), end_state(state) {}

  StrokeLedger compression;  // 1 -> 2
  StrokeLedger hot;          // 2 -> 3
  StrokeLedger expansion;    // 3 -> 4
  StrokeLedger cold;         // 4 -> 1

  double W12 = 0.0;
  double Q23 = 0.0;  // conventional heat
  double W34 = 0.0;
  double Q41 = 0.0;
  double heat_in = 0.0;  // heat in the operational-efficiency denominator

  double power = 0.0;
  double eta_th = 0.0;
  double eta_op = 0.0;
  double C12 = 0.0;
  double C23 = 0.0;
  double C34 = 0.0;
  bool not_an_engine = false;

  DensityMatrix end_state;

  double total_cost() const { return C12 + C23 + C34; }
  /// Largest top-Fock-level population over the four stroke end states.
  double tail_population() const;
  std::vector<std::string> warnings() const;
};

/// One cycle from rho0. Stroke failures are rethrown as StrokeError.
CycleOutcome run_cycle(const DensityMatrix& rho0, const EngineConfig& config);

struct LimitCycleReport {
  int cycles_run = 0;
  bool converged = false;
  std::vector<double> fidelities;       // F(end_k, end_{k-1}); entry 0 compares with the start
  std::vector<double> trace_distances;  // D(end_k, end_{k-1}), same indexing
  std::vector<double> distance_to_final;  // D(end_k, end of the last cycle run)
  std::vector<double> coherence;        // l1 coherence of end-of-cold state at omega_c
  std::vector<CycleOutcome> cycles;

  const CycleOutcome& final_cycle() const { return cycles.back(); }
};

inline constexpr double kDefaultFidelityTol = 1.0 - 1e-8;

/// Iterates run_cycle from thermal(omega_c, T_c) until consecutive end states
/// reach fidelity_tol. Non-convergence is reported, not thrown.
LimitCycleReport run_to_limit_cycle(const EngineConfig& config,
                                    double fidelity_tol = kDefaultFidelityTol,
                                    int max_cycles = 50);

struct QuasistaticLedger {
  double W12 = 0.0;
  double Q23 = 0.0;
  double W34 = 0.0;
  double Q41 = 0.0;
  double eta_ideal = 0.0;
};

/// Closed-form quasistatic stroke energies with unit adiabaticity parameters.
QuasistaticLedger quasistatic_oracle(const EngineConfig& config);

struct ReferenceBounds {
  double carnot = 0.0;
  double curzon_ahlborn = 0.0;
};

ReferenceBounds reference_bounds(const EngineConfig& config);

/// Thermal states at the four ideal corners:
/// (omega_h, T2), (omega_h, T_h), (omega_c, T4), (omega_c, T_c).
std::array<DensityMatrix, 4> quasistatic_endpoints(const EngineConfig& config);

/// Fidelity of each stroke's end state to its quasistatic corner, in stroke order.
std::array<double, 4> stroke_fidelities(const CycleOutcome& outcome, const EngineConfig& config);

}  // namespace otto
