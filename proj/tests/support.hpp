#pragma once

// Shared generators for property tests.

#include <cmath>
#include <random>

#include "otto/fock.hpp"

namespace otto::testing {

inline Matrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = Complex(g(rng), g(rng));
    }
  }
  return m;
}

// G G^dagger / Tr, with G of rank `rank`.
inline DensityMatrix random_state(FockBasis b, std::mt19937_64& rng, int rank = -1) {
  const int r = rank > 0 ? rank : b.dim();
  const Matrix g = random_complex(b.dim(), r, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {b, rho};
}

inline Matrix random_unitary(int dim, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_complex(dim, dim, rng));
  return qr.householderQ();
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace otto::testing
