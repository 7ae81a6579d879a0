#include "otto/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace otto {

TrapInversion::TrapInversion(double t, double omega, double omega_dot)
    : Error("trap inversion at t=" + std::to_string(t) +
            " (omega=" + std::to_string(omega) +
            ", omega_dot=" + std::to_string(omega_dot) + ")"),
      t_(t),
      omega_(omega),
      omega_dot_(omega_dot) {}

FockBasis::FockBasis(int dim) : dim_(dim) {
  if (dim < 2) {
    throw InvalidArgument("Fock basis needs at least 2 levels, got " + std::to_string(dim));
  }
}

OperatorMatrix::OperatorMatrix(FockBasis basis, Matrix entries)
    : basis_(basis), entries_(std::move(entries)) {
  if (entries_.rows() != basis_.dim() || entries_.cols() != basis_.dim()) {
    throw InvalidArgument("operator shape does not match the Fock basis");
  }
}

OperatorMatrix OperatorMatrix::zero(FockBasis basis) {
  return {basis, Matrix::Zero(basis.dim(), basis.dim())};
}

OperatorMatrix OperatorMatrix::identity(FockBasis basis) {
  return {basis, Matrix::Identity(basis.dim(), basis.dim())};
}

OperatorMatrix OperatorMatrix::adjoint() const { return {basis_, entries_.adjoint()}; }

double OperatorMatrix::hermiticity_defect() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (!(a.basis() == b.basis())) {
    throw InvalidArgument("operators live on different Fock bases");
  }
}

}  // namespace

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.basis_, a.entries_ + b.entries_};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.basis_, a.entries_ - b.entries_};
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.basis_, a.entries_ * b.entries_};
}

OperatorMatrix operator*(Complex c, const OperatorMatrix& a) {
  return {a.basis_, c * a.entries_};
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b - b * a;
}

OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b + b * a;
}

DensityMatrix::DensityMatrix(FockBasis basis, Matrix entries, StateTolerances tol)
    : basis_(basis), entries_(std::move(entries)) {
  if (entries_.rows() != basis_.dim() || entries_.cols() != basis_.dim()) {
    throw InvalidArgument("density matrix shape does not match the Fock basis");
  }
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermiticity) {
    throw InvalidArgument("density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw InvalidArgument("density matrix trace is " + std::to_string(tr.real()));
  }
  const double lmin = min_eigenvalue();
  if (lmin < tol.min_eigenvalue) {
    throw NotPositiveSemidefinite("density matrix has eigenvalue " + std::to_string(lmin), lmin);
  }
}

DensityMatrix DensityMatrix::pure(FockBasis basis, const Eigen::VectorXcd& psi) {
  if (psi.size() != basis.dim()) {
    throw InvalidArgument("state vector length does not match the Fock basis");
  }
  return {basis, psi * psi.adjoint()};
}

double DensityMatrix::expectation(const OperatorMatrix& observable) const {
  if (!(observable.basis() == basis_)) {
    throw InvalidArgument("observable lives on a different Fock basis");
  }
  // Tr(rho A) = sum_ij rho_ij A_ji
  return (entries_.transpose().cwiseProduct(observable.entries())).sum().real();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::pair<OperatorMatrix, OperatorMatrix> build_ladder(FockBasis basis) {
  const int n = basis.dim();
  Matrix lower = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    lower(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Matrix raise = lower.adjoint();
  return {OperatorMatrix(basis, std::move(lower)), OperatorMatrix(basis, std::move(raise))};
}

std::pair<OperatorMatrix, OperatorMatrix> build_xp(FockBasis basis) {
  const auto [a, ad] = build_ladder(basis);
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  OperatorMatrix x = Complex{s} * (a + ad);
  OperatorMatrix p = (i * s) * (ad - a);
  return {std::move(x), std::move(p)};
}

namespace {

void require_positive_frequency(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidArgument("frequency must be positive, got " + std::to_string(omega));
  }
}

void require_positive_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("temperature must be positive, got " + std::to_string(temperature));
  }
}

}  // namespace

OperatorMatrix hamiltonian_h0(double omega, FockBasis basis) {
  require_positive_frequency(omega);
  const auto [x, p] = build_xp(basis);
  return Complex{0.5} * (p * p) + Complex{0.5 * omega * omega} * (x * x);
}

EnergyEigenbasis energy_eigenbasis(double omega, FockBasis basis) {
  const OperatorMatrix h = hamiltonian_h0(omega, basis);
  // p^2 is real on the number basis, so H0 is real symmetric. It only couples
  // Fock levels of equal parity; each parity block is diagonalized on its own.
  const RealMatrix real_h = h.entries().real();
  const int dim = basis.dim();
  EnergyEigenbasis out{RealVector::Zero(dim), RealMatrix::Zero(dim, dim)};
  for (int parity = 0; parity < 2; ++parity) {
    const int size = (dim - parity + 1) / 2;
    RealMatrix block(size, size);
    for (int i = 0; i < size; ++i) {
      for (int j = 0; j < size; ++j) {
        block(i, j) = real_h(2 * i + parity, 2 * j + parity);
      }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(block);
    for (int k = 0; k < size; ++k) {
      const int level = 2 * k + parity;
      out.energies(level) = es.eigenvalues()(k);
      for (int i = 0; i < size; ++i) {
        out.vectors(2 * i + parity, level) = es.eigenvectors()(i, k);
      }
    }
  }
  return out;
}

RealVector thermal_populations(double omega, double temperature, FockBasis basis) {
  require_positive_frequency(omega);
  require_positive_temperature(temperature);
  const double ratio = std::exp(-omega / temperature);
  RealVector pops(basis.dim());
  double w = 1.0;
  for (int k = 0; k < basis.dim(); ++k) {
    pops(k) = w;
    w *= ratio;
  }
  return pops / pops.sum();
}

double thermal_tail(double omega, double temperature, FockBasis basis) {
  return thermal_populations(omega, temperature, basis)(basis.dim() - 1);
}

void check_truncation(double omega, double temperature, FockBasis basis) {
  const double tail = thermal_tail(omega, temperature, basis);
  if (tail >= kThermalTailLimit) {
    throw TruncationError("dim=" + std::to_string(basis.dim()) +
                              " too small for omega=" + std::to_string(omega) +
                              ", T=" + std::to_string(temperature) +
                              " (top-level population " + std::to_string(tail) + ")",
                          tail);
  }
}

DensityMatrix thermal_state(double omega, double temperature, FockBasis basis) {
  check_truncation(omega, temperature, basis);
  const EnergyEigenbasis eb = energy_eigenbasis(omega, basis);
  const RealVector pops = thermal_populations(omega, temperature, basis);
  const RealMatrix rho = eb.vectors * pops.asDiagonal() * eb.vectors.transpose();
  Matrix entries = rho.cast<Complex>();
  entries = 0.5 * (entries + entries.adjoint()).eval();
  return {basis, std::move(entries)};
}

OperatorMatrix matrix_sqrt_psd(const OperatorMatrix& m) {
  if (m.hermiticity_defect() > 1e-9) {
    throw InvalidArgument("matrix_sqrt_psd needs a Hermitian input");
  }
  const Matrix herm = 0.5 * (m.entries() + m.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  RealVector lambda = es.eigenvalues();
  const double lmin = lambda.minCoeff();
  if (lmin < -1e-8) {
    throw NotPositiveSemidefinite("matrix_sqrt_psd: eigenvalue " + std::to_string(lmin), lmin);
  }
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = es.eigenvectors();
  return {m.basis(), v * lambda.cast<Complex>().asDiagonal() * v.adjoint()};
}

}  // namespace otto
