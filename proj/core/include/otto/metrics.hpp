#pragma once

#include "otto/fock.hpp"

namespace otto {

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Sum of |off-diagonal| entries of rho in the eigenbasis of H0(omega).
double l1_coherence(const DensityMatrix& rho, double omega);

struct MetricReport {
  double fidelity = 0.0;
  double trace_distance = 0.0;
  double l1_coherence = 0.0;  // of the first argument
};

MetricReport compare_states(const DensityMatrix& rho, const DensityMatrix& sigma, double omega);

}  // namespace otto
