#include "sectors.hpp"

#include <algorithm>

namespace otto::detail {

SectorLayout SectorLayout::whole(int dim) {
  SectorLayout out;
  out.dim_ = dim;
  out.levels_.resize(1);
  for (int n = 0; n < dim; ++n) {
    out.levels_[0].push_back(n);
  }
  return out;
}

SectorLayout SectorLayout::parity(int dim) {
  SectorLayout out;
  out.dim_ = dim;
  out.levels_.resize(2);
  for (int n = 0; n < dim; ++n) {
    out.levels_[n % 2].push_back(n);
  }
  return out;
}

Matrix SectorLayout::block(const Matrix& full, int r, int c) const {
  return full(levels_[r], levels_[c]);
}

Sectors SectorLayout::split(const Matrix& full) const {
  Sectors out;
  out.reserve(levels_.size());
  for (int s = 0; s < count(); ++s) {
    out.push_back(block(full, s, s));
  }
  return out;
}

Matrix SectorLayout::merge(const Sectors& blocks) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int s = 0; s < count(); ++s) {
    out(levels_[s], levels_[s]) = blocks[s];
  }
  return out;
}

double SectorLayout::leakage(const Matrix& full) const {
  double worst = 0.0;
  for (int r = 0; r < count(); ++r) {
    for (int c = 0; c < count(); ++c) {
      if (r != c) {
        worst = std::max(worst, block(full, r, c).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

SectorLayout choose_layout(const Matrix& rho, bool allow_parity) {
  const int dim = static_cast<int>(rho.rows());
  if (allow_parity && dim >= 4) {
    SectorLayout parity = SectorLayout::parity(dim);
    if (parity.leakage(rho) <= kSectorLeakTolerance) {
      return parity;
    }
  }
  return SectorLayout::whole(dim);
}

SectorOperator::SectorOperator(const Matrix& full, const SectorLayout& layout, double cutoff) {
  for (int r = 0; r < layout.count(); ++r) {
    for (int c = 0; c < layout.count(); ++c) {
      const Matrix piece = layout.block(full, r, c);
      if (piece.size() == 0 || piece.cwiseAbs().maxCoeff() <= cutoff) {
        continue;
      }
      blocks_.push_back({r, c, BandedMatrix::from_dense(piece, cutoff)});
    }
  }
}

const BandedMatrix* SectorOperator::find(int r, int c) const {
  for (const Block& b : blocks_) {
    if (b.row == r && b.col == c) {
      return &b.op;
    }
  }
  return nullptr;
}

const BandedMatrix* SectorOperator::diagonal(int s) const { return find(s, s); }

double SectorOperator::trace_real(const Sectors& rho) const {
  double acc = 0.0;
  for (const Block& b : blocks_) {
    if (b.row == b.col) {
      acc += b.op.trace_product(rho[b.row]).real();
    }
  }
  return acc;
}

double SectorOperator::norm_bound() const {
  double worst = 0.0;
  for (const Block& b : blocks_) {
    worst = std::max(worst, b.op.norm_bound());
  }
  // With at most one nonzero block per block-row in every layout used here,
  // the largest block bound is a bound for the whole operator.
  return worst;
}

DriftTerm::DriftTerm(const SectorLayout& layout, std::vector<const SectorOperator*> ops)
    : ops_(std::move(ops)) {
  for (int s = 0; s < layout.count(); ++s) {
    std::vector<const BandedMatrix*> present;
    for (const SectorOperator* op : ops_) {
      if (const BandedMatrix* d = op->diagonal(s)) {
        present.push_back(d);
      }
    }
    if (present.empty()) {
      combined_.emplace_back(layout.size(s), std::vector<int>{0});
    } else {
      combined_.push_back(BandedMatrix::pattern_union(present));
    }
  }
}

void DriftTerm::set(const std::vector<Complex>& coefs) {
  if (coefs.size() != ops_.size()) {
    throw InvalidArgument("drift term needs one coefficient per operator");
  }
  std::vector<std::pair<Complex, const BandedMatrix*>> terms;
  for (std::size_t s = 0; s < combined_.size(); ++s) {
    terms.clear();
    for (std::size_t j = 0; j < ops_.size(); ++j) {
      if (const BandedMatrix* d = ops_[j]->diagonal(static_cast<int>(s))) {
        terms.emplace_back(coefs[j], d);
      }
    }
    combined_[s].assign_combination(terms);
  }
}

void DriftTerm::apply(const Sectors& rho, Sectors& out, Sectors& scratch) const {
  for (std::size_t s = 0; s < combined_.size(); ++s) {
    combined_[s].left_multiply(rho[s], scratch[s]);
    out[s] = scratch[s] + scratch[s].adjoint();
  }
}

JumpTerm::JumpTerm(const Matrix& full, const SectorLayout& layout) {
  const SectorOperator l(full, layout);
  const SectorOperator ld(full.adjoint(), layout);
  for (const auto& b : l.blocks()) {
    const BandedMatrix* back = ld.find(b.col, b.row);
    if (back == nullptr) {
      throw InvalidArgument("jump operator adjoint lost a block");
    }
    pieces_.push_back({b.row, b.col, b.op, *back, Matrix(), Matrix()});
  }
}

void JumpTerm::apply_add(double c, const Sectors& rho, Sectors& out) {
  for (Piece& p : pieces_) {
    p.left.left_multiply(rho[p.col], p.half);
    p.right.right_multiply(p.half, p.full);
    out[p.row] += c * p.full;
  }
}

}  // namespace otto::detail
