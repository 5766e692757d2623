#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "pdasc/dct.hpp"
#include "pdasc/errors.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

namespace detail {

inline void write_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void write_f64_le(std::ostream& os, double d) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, 8);
  write_u64_le(os, bits);
}

inline double read_f64_le(std::istream& is) {
  const std::uint64_t bits = read_u64_le(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace detail

// Column-normalized sensing operator Psi in R^{n x p}, n <= p, with value
// semantics and no mutation after construction. Dense operators store the
// matrix explicitly, plus the full Gram matrix Psi^t Psi when p is small
// enough to afford it (the Gram cache is bookkeeping, not part of any
// algorithm's cost model). The partial-DCT backend keeps only a row subset
// of the orthonormal DCT-II matrix and a global scale sqrt(p/n); it is
// applied by fast transform and never materialized during solves.
class SensingOperator {
 public:
  // Largest p for which a dense operator precomputes its p x p Gram matrix.
  static constexpr int kGramCacheMaxCols = 2048;
  // Largest p for which the partial-DCT backend evaluates its realized
  // column norms from the explicit cosine formula at construction.
  static constexpr int kDctNormCheckMaxCols = 4096;

  // Takes ownership of the matrix and normalizes every column to unit
  // Euclidean norm. Throws DimensionError for n > p or a zero column.
  static SensingOperator dense(Matrix a) {
    if (a.rows() < 1 || a.cols() < 1)
      throw DimensionError("dense operator must have at least one row and column");
    if (a.rows() > a.cols())
      throw DimensionError("dense operator requires n <= p");
    SensingOperator op;
    op.is_dense_ = true;
    op.n_ = static_cast<int>(a.rows());
    op.p_ = static_cast<int>(a.cols());
    for (int j = 0; j < op.p_; ++j) {
      const double norm = a.col(j).norm();
      if (!(norm > 0.0))
        throw DimensionError("dense operator has a zero column and cannot be normalized");
      a.col(j) /= norm;
    }
    op.column_norms_ = Vector::Ones(op.p_);
    op.matrix_ = std::move(a);
    if (op.p_ <= kGramCacheMaxCols)
      op.gram_ = op.matrix_.transpose() * op.matrix_;
    return op;
  }

  // Rows of the p x p orthonormal DCT-II matrix selected by `rows`
  // (0-based, distinct), scaled by sqrt(p/n) so columns have unit norm in
  // expectation. The realized per-column norms are stored for p small
  // enough to evaluate them exactly.
  static SensingOperator partial_dct(int p, IndexList rows) {
    if (p < 1) throw DimensionError("partial_dct operator requires p >= 1");
    if (rows.empty()) throw DimensionError("partial_dct operator requires at least one row");
    std::sort(rows.begin(), rows.end());
    if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
      throw DimensionError("partial_dct row indices must be distinct");
    if (rows.front() < 0 || rows.back() >= p)
      throw DimensionError("partial_dct row indices must lie in [0, p)");
    SensingOperator op;
    op.is_dense_ = false;
    op.n_ = static_cast<int>(rows.size());
    op.p_ = p;
    op.dct_rows_ = std::move(rows);
    op.dct_scale_ = std::sqrt(static_cast<double>(p) / op.n_);
    if (p <= kDctNormCheckMaxCols) {
      op.column_norms_.resize(p);
      for (int j = 0; j < p; ++j) {
        double s = 0.0;
        for (int r : op.dct_rows_) {
          const double e = dct_entry(r, j, p);
          s += e * e;
        }
        op.column_norms_[j] = op.dct_scale_ * std::sqrt(s);
      }
    } else {
      op.column_norms_ = Vector::Ones(p);
    }
    return op;
  }

  int rows() const noexcept { return n_; }
  int cols() const noexcept { return p_; }
  bool is_dense() const noexcept { return is_dense_; }
  const Vector& column_norms() const noexcept { return column_norms_; }

  const Matrix& dense_matrix() const {
    if (!is_dense_) throw DimensionError("dense_matrix: operator is not dense");
    return matrix_;
  }

  const IndexList& dct_rows() const {
    if (is_dense_) throw DimensionError("dct_rows: operator is dense");
    return dct_rows_;
  }

  bool has_gram_cache() const noexcept { return gram_.has_value(); }

  // y = Psi x
  Vector apply(const Vector& x) const {
    if (x.size() != p_) throw DimensionError("apply: x must have p entries");
    if (is_dense_) return matrix_ * x;
    const Vector full = dct2_orthonormal(x);
    Vector out(n_);
    for (int i = 0; i < n_; ++i) out[i] = dct_scale_ * full[dct_rows_[static_cast<std::size_t>(i)]];
    return out;
  }

  // v = Psi^t r
  Vector apply_adjoint(const Vector& r) const {
    if (r.size() != n_) throw DimensionError("apply_adjoint: r must have n entries");
    if (is_dense_) return matrix_.transpose() * r;
    Vector full = Vector::Zero(p_);
    for (int i = 0; i < n_; ++i) full[dct_rows_[static_cast<std::size_t>(i)]] = dct_scale_ * r[i];
    return dct3_orthonormal(full);
  }

  // Column psi_j. For the DCT backend this is evaluated from the cosine
  // formula directly (O(n)), bypassing the transform.
  Vector column(int j) const {
    check_column_index(j);
    if (is_dense_) return matrix_.col(j);
    Vector out(n_);
    for (int i = 0; i < n_; ++i)
      out[i] = dct_scale_ * dct_entry(dct_rows_[static_cast<std::size_t>(i)], j, p_);
    return out;
  }

  // n x |set| block of columns, in the order given.
  Matrix columns(const IndexList& set) const {
    Matrix b(n_, static_cast<Eigen::Index>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k)
      b.col(static_cast<Eigen::Index>(k)) = column(set[k]);
    return b;
  }

  // Psi_A^t Psi_A for the (ordered) index set A.
  Matrix gram_restricted(const IndexList& set) const {
    for (int j : set) check_column_index(j);
    if (static_cast<int>(set.size()) > n_)
      std::cerr << "pdasc warning: gram_restricted called with |A| = " << set.size()
                << " > n = " << n_ << "; the restricted Gram matrix is rank deficient\n";
    if (set.empty()) return Matrix(0, 0);
    if (gram_) {
      Matrix g(static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(set.size()));
      for (std::size_t r = 0; r < set.size(); ++r)
        for (std::size_t c = 0; c < set.size(); ++c)
          g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*gram_)(set[r], set[c]);
      return g;
    }
    const Matrix b = is_dense_ ? Matrix(matrix_(Eigen::all, set)) : columns(set);
    return b.transpose() * b;
  }

  // Entries psi_i^t psi_j for i in `set`.
  Vector gram_column(int j, const IndexList& set) const {
    check_column_index(j);
    Vector out(static_cast<Eigen::Index>(set.size()));
    if (gram_) {
      for (std::size_t k = 0; k < set.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = (*gram_)(set[k], j);
      return out;
    }
    if (is_dense_) {
      for (std::size_t k = 0; k < set.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = matrix_.col(set[k]).dot(matrix_.col(j));
      return out;
    }
    const Vector cj = column(j);
    for (std::size_t k = 0; k < set.size(); ++k)
      out[static_cast<Eigen::Index>(k)] = column(set[k]).dot(cj);
    return out;
  }

  double gram_diagonal(int j) const {
    check_column_index(j);
    if (gram_) return (*gram_)(j, j);
    if (is_dense_) return matrix_.col(j).squaredNorm();
    return column(j).squaredNorm();
  }

  // Explicit n x p matrix. For the DCT backend this uses the cosine
  // formula, independent of the fast-transform code path, so tests can
  // check one against the other.
  Matrix materialize() const {
    if (is_dense_) return matrix_;
    Matrix a(n_, p_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < p_; ++j)
        a(i, j) = dct_scale_ * dct_entry(dct_rows_[static_cast<std::size_t>(i)], j, p_);
    return a;
  }

  // --- serialization ---------------------------------------------------
  // Dense binary format: magic "PDASCOP1", then n and p as 64-bit
  // little-endian unsigned integers, then the normalized matrix as
  // row-major little-endian float64. Round-trips bit-exactly.

  void save(std::ostream& os) const {
    if (!is_dense_)
      throw DimensionError("save: binary serialization covers dense operators only");
    os.write(kMagic, 8);
    detail::write_u64_le(os, static_cast<std::uint64_t>(n_));
    detail::write_u64_le(os, static_cast<std::uint64_t>(p_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < p_; ++j) detail::write_f64_le(os, matrix_(i, j));
    if (!os) throw Error("save: write failed");
  }

  static SensingOperator load(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != kMagic)
      throw Error("load: bad magic, not a dense operator file");
    const std::uint64_t n = detail::read_u64_le(is);
    const std::uint64_t p = detail::read_u64_le(is);
    if (!is || n < 1 || p < 1 || n > p || p > (1u << 20))
      throw Error("load: implausible dimensions");
    Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < p; ++j)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = detail::read_f64_le(is);
    if (!is) throw Error("load: truncated operator file");
    // Columns must already be normalized; the matrix is adopted without
    // rescaling so that save followed by load is bit-exact.
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::abs(a.col(j).norm() - 1.0) > 1e-12)
        throw Error("load: operator file is not column-normalized");
    SensingOperator op;
    op.is_dense_ = true;
    op.n_ = static_cast<int>(n);
    op.p_ = static_cast<int>(p);
    op.column_norms_ = Vector::Ones(op.p_);
    op.matrix_ = std::move(a);
    if (op.p_ <= kGramCacheMaxCols)
      op.gram_ = op.matrix_.transpose() * op.matrix_;
    return op;
  }

  // Text descriptor for the partial-DCT backend, e.g. "dct p=8 rows=1,2,5"
  // with 1-based row indices.
  std::string descriptor() const {
    if (is_dense_) throw DimensionError("descriptor: defined for partial-DCT operators only");
    std::ostringstream os;
    os << "dct p=" << p_ << " rows=";
    for (std::size_t i = 0; i < dct_rows_.size(); ++i) {
      if (i) os << ',';
      os << dct_rows_[i] + 1;
    }
    return os.str();
  }

  static SensingOperator from_descriptor(const std::string& text) {
    std::istringstream is(text);
    std::string kind, ptok, rtok;
    is >> kind >> ptok >> rtok;
    if (!is || kind != "dct" || ptok.rfind("p=", 0) != 0 || rtok.rfind("rows=", 0) != 0)
      throw ConfigError("descriptor must look like \"dct p=<p> rows=<i1,i2,...>\"");
    int p = 0;
    try {
      std::size_t used = 0;
      p = std::stoi(ptok.substr(2), &used);
      if (used != ptok.size() - 2) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("descriptor: cannot parse p in \"" + ptok + "\"");
    }
    IndexList rows;
    std::istringstream rs(rtok.substr(5));
    std::string item;
    while (std::getline(rs, item, ',')) {
      try {
        std::size_t used = 0;
        const int r = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("");
        rows.push_back(r - 1);  // descriptor rows are 1-based
      } catch (const std::exception&) {
        throw ConfigError("descriptor: cannot parse row index \"" + item + "\"");
      }
    }
    if (rows.empty()) throw ConfigError("descriptor: empty row list");
    return partial_dct(p, std::move(rows));
  }

 private:
  SensingOperator() = default;

  static double dct_entry(int r, int j, int p) {
    const double c = r == 0 ? std::sqrt(1.0 / p) : std::sqrt(2.0 / p);
    return c * std::cos(std::numbers::pi * r * (j + 0.5) / p);
  }

  void check_column_index(int j) const {
    if (j < 0 || j >= p_) throw DimensionError("column index out of range");
  }

  static constexpr const char* kMagic = "PDASCOP1";

  bool is_dense_ = true;
  int n_ = 0;
  int p_ = 0;
  Matrix matrix_;
  std::optional<Matrix> gram_;
  IndexList dct_rows_;
  double dct_scale_ = 0.0;
  Vector column_norms_;
};

}  // namespace pdasc
