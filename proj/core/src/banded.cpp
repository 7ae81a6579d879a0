#include "banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace otto::detail {

BandedMatrix::BandedMatrix(int rows, int cols, std::vector<int> offsets)
    : rows_(rows), cols_(cols), offsets_(std::move(offsets)) {
  std::sort(offsets_.begin(), offsets_.end());
  offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
  bands_.reserve(offsets_.size());
  for (int k : offsets_) {
    if (k <= -rows_ || k >= cols_) {
      throw InvalidArgument("band offset outside the matrix");
    }
    bands_.emplace_back(Eigen::VectorXcd::Zero(band_length(k)));
  }
}

int BandedMatrix::band_length(int k) const noexcept {
  return std::min(rows_, cols_ - k) - first_row(k);
}

BandedMatrix BandedMatrix::from_dense(const Matrix& dense, std::vector<int> offsets) {
  BandedMatrix out(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()),
                   std::move(offsets));
  for (std::size_t b = 0; b < out.offsets_.size(); ++b) {
    out.bands_[b] = dense.diagonal(out.offsets_[b]);
  }
  return out;
}

BandedMatrix BandedMatrix::from_dense(const Matrix& dense, double cutoff) {
  const int rows = static_cast<int>(dense.rows());
  const int cols = static_cast<int>(dense.cols());
  std::vector<int> offsets;
  for (int k = -(rows - 1); k < cols; ++k) {
    if (dense.diagonal(k).cwiseAbs().maxCoeff() > cutoff) {
      offsets.push_back(k);
    }
  }
  return from_dense(dense, std::move(offsets));
}

BandedMatrix BandedMatrix::pattern_union(std::span<const BandedMatrix* const> ops) {
  if (ops.empty()) {
    throw InvalidArgument("pattern_union needs at least one operator");
  }
  std::set<int> offsets;
  for (const BandedMatrix* op : ops) {
    if (op->rows_ != ops[0]->rows_ || op->cols_ != ops[0]->cols_) {
      throw InvalidArgument("pattern_union needs operators of one shape");
    }
    offsets.insert(op->offsets_.begin(), op->offsets_.end());
  }
  return {ops[0]->rows_, ops[0]->cols_, std::vector<int>(offsets.begin(), offsets.end())};
}

Matrix BandedMatrix::to_dense() const {
  Matrix out = Matrix::Zero(rows_, cols_);
  for (std::size_t b = 0; b < offsets_.size(); ++b) {
    out.diagonal(offsets_[b]) = bands_[b];
  }
  return out;
}

void BandedMatrix::assign_combination(
    std::span<const std::pair<Complex, const BandedMatrix*>> terms) {
  for (auto& band : bands_) {
    band.setZero();
  }
  for (const auto& [coef, op] : terms) {
    if (op->rows_ != rows_ || op->cols_ != cols_) {
      throw InvalidArgument("banded combination needs operators of one shape");
    }
    std::size_t b = 0;
    for (std::size_t j = 0; j < op->offsets_.size(); ++j) {
      while (b < offsets_.size() && offsets_[b] < op->offsets_[j]) {
        ++b;
      }
      if (b == offsets_.size() || offsets_[b] != op->offsets_[j]) {
        throw InvalidArgument("banded combination term outside the target pattern");
      }
      bands_[b] += coef * op->bands_[j];
    }
  }
}

void BandedMatrix::left_multiply(const Matrix& rho, Matrix& out) const {
  out.setZero(rows_, rho.cols());
  left_multiply_add(rho, out);
}

void BandedMatrix::left_multiply_add(const Matrix& rho, Matrix& out) const {
  // (A rho)(i, j) = sum_k A(i, i+k) rho(i+k, j)
  for (std::size_t b = 0; b < offsets_.size(); ++b) {
    const int k = offsets_[b];
    const int i0 = first_row(k);
    const int len = static_cast<int>(bands_[b].size());
    out.middleRows(i0, len).noalias() += bands_[b].asDiagonal() * rho.middleRows(i0 + k, len);
  }
}

void BandedMatrix::right_multiply(const Matrix& rho, Matrix& out) const {
  out.setZero(rho.rows(), cols_);
  // (rho A)(i, j) = sum_l rho(i, l) A(l, j), with A(l, l+k) on diagonal k
  for (std::size_t b = 0; b < offsets_.size(); ++b) {
    const int k = offsets_[b];
    const int l0 = first_row(k);
    const int len = static_cast<int>(bands_[b].size());
    out.middleCols(l0 + k, len).noalias() += rho.middleCols(l0, len) * bands_[b].asDiagonal();
  }
}

Complex BandedMatrix::trace_product(const Matrix& rho) const {
  // Tr(A rho) = sum_i sum_k A(i, i+k) rho(i+k, i); the pairs rho(i+k, i)
  // form the (-k)-th diagonal of rho, starting at i = first_row(k).
  Complex acc{0.0, 0.0};
  for (std::size_t b = 0; b < offsets_.size(); ++b) {
    const int k = offsets_[b];
    const auto len = bands_[b].size();
    acc += bands_[b].cwiseProduct(rho.diagonal(-k).head(len)).sum();
  }
  return acc;
}

double BandedMatrix::norm_bound() const {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(rows_);
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(cols_);
  for (std::size_t b = 0; b < offsets_.size(); ++b) {
    const int k = offsets_[b];
    const int i0 = first_row(k);
    const Eigen::VectorXd mag = bands_[b].cwiseAbs();
    row_sums.segment(i0, mag.size()) += mag;
    col_sums.segment(i0 + k, mag.size()) += mag;
  }
  if (rows_ == 0 || cols_ == 0) {
    return 0.0;
  }
  return std::sqrt(row_sums.maxCoeff() * col_sums.maxCoeff());
}

}  // namespace otto::detail
