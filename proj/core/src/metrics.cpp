#include "otto/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otto {

namespace {

void require_same_basis(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.basis() == sigma.basis())) {
    throw InvalidArgument("states live on different Fock bases (dim " +
                          std::to_string(rho.dim()) + " vs " + std::to_string(sigma.dim()) + ")");
  }
}

// PSD square root of a state. Eigenvalues at roundoff level are dropped:
// their square roots would otherwise add spurious weight of order 1e-8.
Matrix state_root(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries());
  RealVector lambda = es.eigenvalues();
  const double cutoff = rho.dim() * std::numeric_limits<double>::epsilon() * lambda.maxCoeff();
  for (double& l : lambda) {
    l = l > cutoff ? std::sqrt(l) : 0.0;
  }
  const Matrix& v = es.eigenvectors();
  return v * lambda.cast<Complex>().asDiagonal() * v.adjoint();
}

}  // namespace

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_basis(rho, sigma);
  // sqrt F is the trace norm of sqrt(rho) sqrt(sigma); the singular values are
  // symmetric in the two arguments and avoid square roots of tiny eigenvalues
  // of sqrt(rho) sigma sqrt(rho).
  const Matrix product = state_root(rho) * state_root(sigma);
  Eigen::JacobiSVD<Matrix> svd(product);
  const double root_fidelity = svd.singularValues().sum();
  return std::clamp(root_fidelity * root_fidelity, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_basis(rho, sigma);
  Matrix diff = rho.entries() - sigma.entries();
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return std::clamp(0.5 * es.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

double l1_coherence(const DensityMatrix& rho, double omega) {
  const EnergyEigenbasis eb = energy_eigenbasis(omega, rho.basis());
  const Matrix v = eb.vectors.cast<Complex>();
  Matrix in_energy_basis = v.adjoint() * rho.entries() * v;
  in_energy_basis.diagonal().setZero();
  return in_energy_basis.cwiseAbs().sum();
}

MetricReport compare_states(const DensityMatrix& rho, const DensityMatrix& sigma, double omega) {
  return {uhlmann_fidelity(rho, sigma), trace_distance(rho, sigma), l1_coherence(rho, omega)};
}

}  // namespace otto
