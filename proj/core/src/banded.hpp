#pragma once

// Sparse-by-diagonal operators for the propagation hot loop. Every generator
// in the engine is built from x, x^2, p^2 and xp+px, which occupy at most five
// diagonals of the number basis, so products with a dense state cost
// O(bands * dim^2) instead of O(dim^3). Rectangular shapes appear when an
// operator maps one parity sector onto the other.

#include <span>
#include <utility>
#include <vector>

#include "otto/fock.hpp"

namespace otto::detail {

class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int dim, std::vector<int> offsets) : BandedMatrix(dim, dim, std::move(offsets)) {}
  BandedMatrix(int rows, int cols, std::vector<int> offsets);

  /// Keeps the listed diagonals of `dense` (offset k holds entries (i, i+k)).
  static BandedMatrix from_dense(const Matrix& dense, std::vector<int> offsets);
  /// Keeps every diagonal of `dense` holding an entry with |value| > cutoff.
  static BandedMatrix from_dense(const Matrix& dense, double cutoff = 0.0);
  /// Zero operator whose pattern covers every listed operator's pattern.
  static BandedMatrix pattern_union(std::span<const BandedMatrix* const> ops);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  const std::vector<int>& offsets() const noexcept { return offsets_; }
  std::span<const Eigen::VectorXcd> bands() const noexcept { return bands_; }

  Matrix to_dense() const;

  /// sum_k c_k A_k, written into *this. Each A_k's pattern must be contained in ours.
  void assign_combination(std::span<const std::pair<Complex, const BandedMatrix*>> terms);

  /// out = A * rho
  void left_multiply(const Matrix& rho, Matrix& out) const;
  /// out += A * rho
  void left_multiply_add(const Matrix& rho, Matrix& out) const;
  /// out = rho * A
  void right_multiply(const Matrix& rho, Matrix& out) const;

  /// Tr(A rho)
  Complex trace_product(const Matrix& rho) const;

  /// Upper bound on the operator 2-norm, sqrt(max row sum * max column sum).
  double norm_bound() const;

 private:
  // Row range [first_row(k), first_row(k) + band length) of diagonal k.
  int first_row(int k) const noexcept { return k < 0 ? -k : 0; }
  int band_length(int k) const noexcept;

  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> offsets_;
  std::vector<Eigen::VectorXcd> bands_;
};

}  // namespace otto::detail
