#pragma once

// Truncated Fock-space operator algebra for a single harmonic mode.
//
// All operators live on the number basis of the oscillator at the reference
// frequency 1 (hbar = m = k_B = 1). Frequency dependence enters only through
// H0(omega) = p^2/2 + omega^2 x^2/2, assembled from the fixed x and p.

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "otto/errors.hpp"

namespace otto {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Natural units used throughout. Every formula in the library assumes them.
struct UnitSystem {
  static constexpr double hbar = 1.0;
  static constexpr double mass = 1.0;
  static constexpr double kB = 1.0;
};

class FockBasis {
 public:
  explicit FockBasis(int dim);

  int dim() const noexcept { return dim_; }

  friend bool operator==(const FockBasis&, const FockBasis&) = default;

 private:
  int dim_;
};

/// Dense complex operator on a truncated Fock basis.
class OperatorMatrix {
 public:
  OperatorMatrix(FockBasis basis, Matrix entries);

  static OperatorMatrix zero(FockBasis basis);
  static OperatorMatrix identity(FockBasis basis);

  FockBasis basis() const noexcept { return basis_; }
  int dim() const noexcept { return basis_.dim(); }
  const Matrix& entries() const noexcept { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  OperatorMatrix adjoint() const;
  /// max |M - M^dagger|
  double hermiticity_defect() const;
  Complex trace() const { return entries_.trace(); }

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex c, const OperatorMatrix& a);

 private:
  FockBasis basis_;
  Matrix entries_;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// Tolerances a matrix must satisfy to be accepted as a quantum state.
struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-9;
  double min_eigenvalue = -1e-8;
};

/// Hermitian, unit-trace, positive-semidefinite operator. Validated on construction.
class DensityMatrix {
 public:
  DensityMatrix(FockBasis basis, Matrix entries, StateTolerances tol = {});

  /// |psi><psi| for a normalized state vector.
  static DensityMatrix pure(FockBasis basis, const Eigen::VectorXcd& psi);

  FockBasis basis() const noexcept { return basis_; }
  int dim() const noexcept { return basis_.dim(); }
  const Matrix& entries() const noexcept { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }
  OperatorMatrix as_operator() const { return {basis_, entries_}; }

  /// Tr(rho A), real part (A Hermitian in every use).
  double expectation(const OperatorMatrix& observable) const;
  double min_eigenvalue() const;

 private:
  FockBasis basis_;
  Matrix entries_;
};

/// Lowering operator a (a[n-1, n] = sqrt(n)) and its adjoint.
std::pair<OperatorMatrix, OperatorMatrix> build_ladder(FockBasis basis);

/// x = (a + a^dagger)/sqrt2, p = i(a^dagger - a)/sqrt2 at the reference frequency.
std::pair<OperatorMatrix, OperatorMatrix> build_xp(FockBasis basis);

/// p^2/2 + omega^2 x^2/2. Throws InvalidArgument for omega <= 0.
OperatorMatrix hamiltonian_h0(double omega, FockBasis basis);

/// Spectral decomposition of H0(omega); H0 is real symmetric on this basis.
/// Levels are labelled along the ladder: level 2k is the k-th lowest
/// even-parity eigenvector, level 2k+1 the k-th lowest odd one. This is the
/// ascending order wherever the truncated spectrum is still harmonic; near the
/// cutoff the two parity ladders can cross and energies need not be sorted.
struct EnergyEigenbasis {
  RealVector energies;
  RealMatrix vectors;  // column n is level n, with parity n mod 2
};

EnergyEigenbasis energy_eigenbasis(double omega, FockBasis basis);

/// Largest population left in the top Fock level that thermal_state accepts.
inline constexpr double kThermalTailLimit = 1e-8;

/// Normalized p_n ~ exp(-n omega / T) over the ladder labels 0..dim-1.
RealVector thermal_populations(double omega, double temperature, FockBasis basis);

/// Population of the highest retained level of the geometric distribution at (omega, T).
double thermal_tail(double omega, double temperature, FockBasis basis);

/// Throws TruncationError if thermal_tail(omega, T) >= kThermalTailLimit.
void check_truncation(double omega, double temperature, FockBasis basis);

/// Gibbs state of H0(omega) at temperature T. Populations in the H0(omega)
/// eigenbasis follow p_n ~ exp(-n omega / T).
DensityMatrix thermal_state(double omega, double temperature, FockBasis basis);

/// Hermitian PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-8, 0) are clipped to zero; anything lower is rejected.
OperatorMatrix matrix_sqrt_psd(const OperatorMatrix& m);

}  // namespace otto
