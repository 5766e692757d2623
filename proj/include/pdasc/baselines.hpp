#pragma once

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pdasc/errors.hpp"
#include "pdasc/kkt.hpp"
#include "pdasc/rip.hpp"
#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

// Proximal-gradient reference solver. Exists to validate the active-set
// solver from an independent code path, so it deliberately shares nothing
// with it beyond the operator and the soft-threshold map.
struct IstaConfig {
  // Defaults to 1/||Psi||^2: exact spectral norm for dense operators, a
  // power-method estimate padded by 1% for implicit ones (the estimate
  // approaches the true norm from below).
  std::optional<double> step_size;
  double tol = 1e-10;       // stop when ||x - T_lambda(x + d)||_inf <= tol
  long max_iterations = 1000000;
};

struct IstaResult {
  Vector x;
  bool converged = false;
  long iterations = 0;  // proximal steps taken
};

inline double default_ista_step(const SensingOperator& op) {
  const double norm_sq = spectral_norm_sq(op);
  if (!(norm_sq > 0.0)) throw ConfigError("ista: operator spectral norm is zero");
  return op.is_dense() ? 1.0 / norm_sq : 1.0 / (1.01 * norm_sq);
}

// x <- T_{lambda*step}(x + step * d) with d = Psi^t (y - Psi x), from
// x = 0, until the soft-threshold fixed-point residual at the current
// iterate drops to tol. One apply + one adjoint per iteration. The
// stationarity residual is zero by construction here (d is the exact
// dual), so the fixed-point component alone certifies optimality.
inline IstaResult ista_solve(const SensingOperator& op, const Vector& y, double lambda,
                             const IstaConfig& cfg = {}) {
  if (y.size() != op.rows()) throw DimensionError("ista_solve: y must have n entries");
  if (!(lambda >= 0.0)) throw ConfigError("ista_solve: lambda must be nonnegative");
  if (cfg.max_iterations < 1) throw ConfigError("ista_solve: iteration budget must be >= 1");
  const double step = cfg.step_size.value_or(default_ista_step(op));
  if (!(step > 0.0)) throw ConfigError("ista_solve: step size must be positive");

  IstaResult res;
  res.x = Vector::Zero(op.cols());
  for (long it = 0; it < cfg.max_iterations; ++it) {
    const Vector d = op.apply_adjoint(y - op.apply(res.x));
    if ((res.x - soft_threshold(res.x + d, lambda)).lpNorm<Eigen::Infinity>() <= cfg.tol) {
      res.converged = true;
      return res;
    }
    res.x = soft_threshold(res.x + step * d, lambda * step);
    res.iterations = it + 1;
  }
  return res;
}

// Least-squares fit restricted to the columns in A, zeros elsewhere.
// Solved by column-pivoted QR — intentionally a different factorization
// than the solver's Cholesky machinery, so the two can check each other.
inline Vector oracle_ls_on_support(const SensingOperator& op, const Vector& y,
                                   const IndexList& support) {
  if (y.size() != op.rows()) throw DimensionError("oracle_ls_on_support: y must have n entries");
  Vector out = Vector::Zero(op.cols());
  if (support.empty()) return out;
  const Matrix cols = op.columns(support);
  Eigen::ColPivHouseholderQR<Matrix> qr(cols);
  if (qr.rank() < cols.cols())
    throw RankDeficientError("oracle_ls_on_support: restricted operator is rank deficient",
                             support.front());
  const Vector z = qr.solve(y);
  for (std::size_t k = 0; k < support.size(); ++k)
    out[support[k]] = z[static_cast<Eigen::Index>(k)];
  return out;
}

struct L0Result {
  IndexList support;
  Vector x;
  double residual_norm = 0.0;
};

// Exhaustive best-subset search at toy scale: for every support of size
// 0..k_max, the least-squares residual; the answer is the smallest
// cardinality whose best residual matches the overall best within
// 1e-10 * (1 + ||y||). Ties within one cardinality go to the smaller
// residual, then to the lexicographically smaller support (enumeration
// order). Guards: p <= 20 and k_max <= 6, else UnsupportedError.
inline L0Result l0_bruteforce(const SensingOperator& op, const Vector& y, int k_max) {
  const int p = op.cols();
  if (p > 20 || k_max > 6)
    throw UnsupportedError("l0_bruteforce: supports only p <= 20 and k_max <= 6");
  if (k_max < 0 || k_max > op.rows())
    throw UnsupportedError("l0_bruteforce: need 0 <= k_max <= n");
  if (y.size() != op.rows()) throw DimensionError("l0_bruteforce: y must have n entries");

  struct Best {
    double residual;
    IndexList support;
    Vector x;
  };
  std::vector<Best> best_at(static_cast<std::size_t>(k_max) + 1,
                            Best{std::numeric_limits<double>::infinity(), {}, Vector()});
  best_at[0] = Best{y.norm(), {}, Vector::Zero(p)};

  IndexList support;
  for (int k = 1; k <= k_max; ++k) {
    support.assign(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) support[static_cast<std::size_t>(i)] = i;
    while (true) {
      const Matrix cols = op.columns(support);
      Eigen::ColPivHouseholderQR<Matrix> qr(cols);
      if (qr.rank() == cols.cols()) {
        const Vector z = qr.solve(y);
        const double res = (cols * z - y).norm();
        Best& b = best_at[static_cast<std::size_t>(k)];
        if (res < b.residual) {
          b.residual = res;
          b.support = support;
          b.x = Vector::Zero(p);
          for (int i = 0; i < k; ++i) b.x[support[static_cast<std::size_t>(i)]] = z[i];
        }
      }
      int i = k - 1;
      while (i >= 0 && support[static_cast<std::size_t>(i)] == p - k + i) --i;
      if (i < 0) break;
      ++support[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  double r_min = std::numeric_limits<double>::infinity();
  for (const Best& b : best_at) r_min = std::min(r_min, b.residual);
  const double tol = 1e-10 * (1.0 + y.norm());
  for (const Best& b : best_at) {
    if (b.residual <= r_min + tol) {
      L0Result out;
      out.support = b.support;
      out.x = b.x;
      out.residual_norm = b.residual;
      return out;
    }
  }
  throw Error("l0_bruteforce: unreachable");  // r_min itself always qualifies
}

}  // namespace pdasc
