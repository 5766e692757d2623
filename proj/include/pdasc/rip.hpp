#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <string>

#include "pdasc/errors.hpp"
#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

// Number of k-subsets of p, saturating at `cap`.
inline double subset_count(int p, int k, double cap = 1e18) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c *= static_cast<double>(p - k + i) / i;
    if (c > cap) return cap;
  }
  return c;
}

// Restricted isometry constant delta_k by exhaustive enumeration: for every
// support S with |S| = k, the extreme eigenvalues of Psi_S^t Psi_S bound
// how far the operator is from an isometry on k-sparse vectors. Dense
// operators only, and the enumeration budget is C(p, k) <= 1e6 supports;
// beyond either limit this throws UnsupportedError.
inline double rip_constant_bruteforce(const SensingOperator& op, int k) {
  if (!op.is_dense() && op.cols() > SensingOperator::kDctNormCheckMaxCols)
    throw UnsupportedError("rip_constant_bruteforce: operator too large to materialize");
  const int p = op.cols();
  if (k < 1 || k > op.rows())
    throw UnsupportedError("rip_constant_bruteforce: need 1 <= k <= n");
  if (subset_count(p, k) > 1e6)
    throw UnsupportedError("rip_constant_bruteforce: C(p, k) exceeds the 1e6 support budget");

  const Matrix a = op.materialize();
  const Matrix gram = a.transpose() * a;

  double delta = 0.0;
  IndexList support(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) support[static_cast<std::size_t>(i)] = i;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  while (true) {
    Matrix g(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c)
        g(r, c) = gram(support[static_cast<std::size_t>(r)], support[static_cast<std::size_t>(c)]);
    eig.compute(g, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    delta = std::max(delta, std::max(hi - 1.0, 1.0 - lo));

    // next k-combination in lexicographic order
    int i = k - 1;
    while (i >= 0 && support[static_cast<std::size_t>(i)] == p - k + i) --i;
    if (i < 0) break;
    ++support[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
  }
  return delta;
}

// Squared spectral norm ||Psi||^2. Dense operators get the exact largest
// eigenvalue of whichever Gram product is smaller; implicit operators get
// a 100-iteration power-method estimate from a fixed seeded start vector,
// so repeated calls agree bit for bit.
inline double spectral_norm_sq(const SensingOperator& op) {
  if (op.is_dense()) {
    const Matrix& a = op.dense_matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    if (a.rows() <= a.cols())
      eig.compute(Matrix(a * a.transpose()), Eigen::EigenvaluesOnly);
    else
      eig.compute(Matrix(a.transpose() * a), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
  }
  const int p = op.cols();
  // Deterministic pseudo-random start; an all-ones start can be orthogonal
  // to the dominant subspace when the operator drops the constant row.
  Vector v(p);
  std::uint64_t s = 0x6b43a9b1u;
  for (int i = 0; i < p; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    v[i] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
  }
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector w = op.apply_adjoint(op.apply(v));
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = v.dot(w);
    v = w / norm;
  }
  return lambda;
}

}  // namespace pdasc
