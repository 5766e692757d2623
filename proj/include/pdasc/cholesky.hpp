#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "pdasc/errors.hpp"
#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

// Lower-triangular Cholesky factor of the restricted Gram matrix
// Psi_A^t Psi_A, maintained incrementally as the active set A changes.
// Adding a column costs one triangular solve; removing one costs a sweep
// of Givens rotations. Columns are tracked in the order they were added,
// which need not be sorted; `indices()` exposes that order and solves are
// expressed in it.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;

  int size() const noexcept { return static_cast<int>(indices_.size()); }
  const IndexList& indices() const noexcept { return indices_; }

  bool contains(int j) const {
    return std::find(indices_.begin(), indices_.end(), j) != indices_.end();
  }

  // Extends the factor to cover column j of the operator. Throws
  // RankDeficientError (carrying j) when the updated matrix is not
  // numerically positive definite.
  void add_column(int j, const SensingOperator& op) {
    const int m = size();
    const double diag = op.gram_diagonal(j);
    Vector w(m);
    if (m > 0) {
      const Vector cross = op.gram_column(j, indices_);
      w = forward_solve(cross);
    }
    const double rem = diag - w.squaredNorm();
    if (!(rem > kPivotRelTol * diag))
      throw RankDeficientError(
          "restricted Gram matrix lost positive definiteness at column " + std::to_string(j),
          j);
    ensure_capacity(m + 1);
    for (int i = 0; i < m; ++i) l_(m, i) = w[i];
    l_(m, m) = std::sqrt(rem);
    indices_.push_back(j);
  }

  // Removes column j (which must be present). The rows below its position
  // slide up and a sequence of Givens rotations restores triangularity.
  void remove_column(int j) {
    const auto it = std::find(indices_.begin(), indices_.end(), j);
    if (it == indices_.end())
      throw DimensionError("remove_column: index is not in the factor");
    const int pos = static_cast<int>(it - indices_.begin());
    const int m = size();
    // Delete row `pos`; rows pos+1..m-1 move up one slot. The surviving
    // block is lower triangular except for a superdiagonal spill in
    // columns pos..m-2.
    for (int r = pos + 1; r < m; ++r)
      for (int c = 0; c <= r; ++c) l_(r - 1, c) = l_(r, c);
    indices_.erase(it);
    const int mm = m - 1;
    for (int c = pos; c < mm; ++c) {
      // Rotate columns (c, c+1) to zero the entry above the new diagonal.
      const double a = l_(c, c);
      const double b = l_(c, c + 1);
      const double r = std::hypot(a, b);
      if (r == 0.0) continue;
      const double cs = a / r;
      const double sn = b / r;
      for (int row = c; row < mm; ++row) {
        const double u = l_(row, c);
        const double v = l_(row, c + 1);
        l_(row, c) = cs * u + sn * v;
        l_(row, c + 1) = -sn * u + cs * v;
      }
      l_(c, c + 1) = 0.0;
      if (l_(c, c) < 0.0) {
        // Keep the diagonal positive; flip the column's sign.
        for (int row = c; row < mm; ++row) l_(row, c) = -l_(row, c);
      }
    }
  }

  // Solves (Psi_A^t Psi_A) z = rhs, with rhs and z ordered like indices().
  Vector solve(const Vector& rhs) const {
    if (rhs.size() != size()) throw DimensionError("solve: rhs size mismatch");
    Vector y = forward_solve(rhs);
    return backward_solve(y);
  }

  // L z = rhs
  Vector forward_solve(const Vector& rhs) const {
    const int m = size();
    if (rhs.size() != m) throw DimensionError("forward_solve: rhs size mismatch");
    Vector z(m);
    for (int i = 0; i < m; ++i) {
      double s = rhs[i];
      for (int k = 0; k < i; ++k) s -= l_(i, k) * z[k];
      z[i] = s / l_(i, i);
    }
    return z;
  }

  // L^t z = rhs
  Vector backward_solve(const Vector& rhs) const {
    const int m = size();
    if (rhs.size() != m) throw DimensionError("backward_solve: rhs size mismatch");
    Vector z(m);
    for (int i = m - 1; i >= 0; --i) {
      double s = rhs[i];
      for (int k = i + 1; k < m; ++k) s -= l_(k, i) * z[k];
      z[i] = s / l_(i, i);
    }
    return z;
  }

  // The factor's current L, for inspection in tests.
  Matrix matrix() const {
    const int m = size();
    Matrix out = Matrix::Zero(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c <= r; ++c) out(r, c) = l_(r, c);
    return out;
  }

 private:
  static constexpr double kPivotRelTol = 1e-12;

  void ensure_capacity(int m) {
    if (l_.rows() >= m) return;
    const int cap = std::max(m, static_cast<int>(l_.rows()) * 2 + 8);
    Matrix grown = Matrix::Zero(cap, cap);
    if (l_.rows() > 0) grown.topLeftCorner(l_.rows(), l_.cols()) = l_;
    l_ = std::move(grown);
  }

  Matrix l_;  // capacity x capacity; the leading size() x size() block is live
  IndexList indices_;
};

// Applies a batch of removals then sorted additions to a factor. Removals
// go first so transient fill never exceeds the final set size.
inline void chol_update_downdate(CholeskyFactor& f, IndexList add, const IndexList& remove,
                                 const SensingOperator& op) {
  for (int j : remove) f.remove_column(j);
  std::sort(add.begin(), add.end());
  for (int j : add) f.add_column(j, op);
}

}  // namespace pdasc
