#pragma once

// Block structure of the number basis. Every generator used by the engine
// commutes with the parity (-1)^n, so a state without coherences between even
// and odd levels stays block-diagonal; the propagators then work on two
// half-size blocks instead of one dense matrix.

#include <vector>

#include "banded.hpp"

namespace otto::detail {

using Sectors = std::vector<Matrix>;

class SectorLayout {
 public:
  /// One sector holding every level.
  static SectorLayout whole(int dim);
  /// Even levels, then odd levels.
  static SectorLayout parity(int dim);

  int dim() const noexcept { return dim_; }
  int count() const noexcept { return static_cast<int>(levels_.size()); }
  int size(int sector) const { return static_cast<int>(levels_[sector].size()); }

  /// Rows of sector r and columns of sector c of a full matrix.
  Matrix block(const Matrix& full, int r, int c) const;
  /// Diagonal blocks of a full matrix.
  Sectors split(const Matrix& full) const;
  /// Full matrix with the given diagonal blocks and zeros elsewhere.
  Matrix merge(const Sectors& blocks) const;
  /// Largest |entry| of `full` outside the diagonal blocks.
  double leakage(const Matrix& full) const;

 private:
  int dim_ = 0;
  std::vector<std::vector<int>> levels_;
};

/// Entries of states with a larger inter-sector leakage force the whole layout.
inline constexpr double kSectorLeakTolerance = 1e-14;

/// Parity layout when allowed and `rho` has no inter-parity coherence.
SectorLayout choose_layout(const Matrix& rho, bool allow_parity);

/// An operator cut into banded blocks along a layout; blocks whose entries
/// are all below the cutoff are dropped.
class SectorOperator {
 public:
  struct Block {
    int row = 0;
    int col = 0;
    BandedMatrix op;
  };

  SectorOperator() = default;
  SectorOperator(const Matrix& full, const SectorLayout& layout, double cutoff = 1e-14);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  /// Block (s, s), or nullptr when it vanishes.
  const BandedMatrix* diagonal(int s) const;
  /// Block (r, c), or nullptr when it vanishes.
  const BandedMatrix* find(int r, int c) const;

  /// Tr(A rho) for a block-diagonal rho.
  double trace_real(const Sectors& rho) const;
  /// Bound on the operator 2-norm.
  double norm_bound() const;

 private:
  std::vector<Block> blocks_;
};

/// Sector-diagonal part of sum_j c_j A_j, applied as B rho + (B rho)^dagger.
class DriftTerm {
 public:
  DriftTerm(const SectorLayout& layout, std::vector<const SectorOperator*> ops);

  /// Sets the coefficients c_j, one per operator.
  void set(const std::vector<Complex>& coefs);
  void apply(const Sectors& rho, Sectors& out, Sectors& scratch) const;

 private:
  std::vector<const SectorOperator*> ops_;
  std::vector<BandedMatrix> combined_;  // one per sector
};

/// c * L rho L^dagger, for an operator L that may connect different sectors.
class JumpTerm {
 public:
  JumpTerm(const Matrix& full, const SectorLayout& layout);

  void apply_add(double c, const Sectors& rho, Sectors& out);

 private:
  struct Piece {
    int row;
    int col;
    BandedMatrix left;   // L restricted to (row, col)
    BandedMatrix right;  // L^dagger restricted to (col, row)
    Matrix half;
    Matrix full;
  };
  std::vector<Piece> pieces_;
};

}  // namespace otto::detail
