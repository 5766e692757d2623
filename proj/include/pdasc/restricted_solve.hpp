#pragma once

#include <optional>

#include "pdasc/cholesky.hpp"
#include "pdasc/errors.hpp"
#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

enum class RestrictedMethod { cholesky, cg };

struct RestrictedOptions {
  // Defaults to Cholesky for dense operators and CG for implicit ones.
  std::optional<RestrictedMethod> method;
  // Fixed iteration count for the CG branch. A handful of iterations per
  // grid step is enough under warm starting; the continuation driver
  // resupplies the previous solution as the initial guess.
  int cg_iterations = 2;
};

inline RestrictedMethod resolve_restricted_method(const RestrictedOptions& opts,
                                                  const SensingOperator& op) {
  if (opts.method) return *opts.method;
  return op.is_dense() ? RestrictedMethod::cholesky : RestrictedMethod::cg;
}

// Exact solve of (Psi_A^t Psi_A) z = rhs through an incrementally
// maintained factor. `factor` must already cover exactly the set A that
// `rhs` is ordered by.
inline Vector solve_restricted_cholesky(const CholeskyFactor& factor, const Vector& rhs) {
  return factor.solve(rhs);
}

// Conjugate gradient on the restricted normal equations, with the
// matrix-vector product expressed through one operator apply and one
// adjoint apply (Psi_A z is formed by scattering z to full length). Runs
// exactly `iterations` steps from `z0`; no tolerance-based early exit, so
// the work per call is deterministic.
inline Vector solve_restricted_cg(const SensingOperator& op, const IndexList& set,
                                  const Vector& rhs, const Vector& z0, int iterations) {
  const int m = static_cast<int>(set.size());
  if (rhs.size() != m) throw DimensionError("solve_restricted_cg: rhs size mismatch");
  if (z0.size() != m) throw DimensionError("solve_restricted_cg: initial guess size mismatch");
  const int p = op.cols();

  const auto apply_gram = [&](const Vector& z) -> Vector {
    Vector full = Vector::Zero(p);
    for (int k = 0; k < m; ++k) full[set[static_cast<std::size_t>(k)]] = z[k];
    const Vector img = op.apply(full);
    const Vector back = op.apply_adjoint(img);
    return gather(back, set);
  };

  Vector z = z0;
  Vector r = rhs - apply_gram(z);
  Vector d = r;
  double rho = r.squaredNorm();
  for (int it = 0; it < iterations; ++it) {
    if (rho == 0.0) break;
    const Vector q = apply_gram(d);
    const double dq = d.dot(q);
    if (!(dq > 0.0)) break;  // curvature lost; stop rather than diverge
    const double alpha = rho / dq;
    z += alpha * d;
    r -= alpha * q;
    const double rho_next = r.squaredNorm();
    d = r + (rho_next / rho) * d;
    rho = rho_next;
  }
  return z;
}

}  // namespace pdasc
