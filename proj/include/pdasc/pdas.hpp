#pragma once

#include <algorithm>
#include <utility>

#include "pdasc/cholesky.hpp"
#include "pdasc/errors.hpp"
#include "pdasc/kkt.hpp"
#include "pdasc/restricted_solve.hpp"
#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

enum class PdasOutcome { converged_sets_stable, hit_max_iter, rank_deficient };

inline const char* to_string(PdasOutcome o) {
  switch (o) {
    case PdasOutcome::converged_sets_stable: return "converged_sets_stable";
    case PdasOutcome::hit_max_iter: return "hit_max_iter";
    case PdasOutcome::rank_deficient: return "rank_deficient";
  }
  return "unknown";
}

struct PdasStatus {
  PdasOutcome outcome = PdasOutcome::hit_max_iter;
  int iterations = 0;  // completed steps
  PrimalDualState final_state;
};

namespace detail {

// One active-set step: read the signed sets off the incoming pair, zero x
// on the inactive set, pin d to +/-lambda on the active set, solve the
// restricted normal equations for x on the active set, then refresh d on
// the inactive set from the residual with a single apply + adjoint pair
// (the cross-Gram block is never formed). An empty active set degenerates
// to x = 0, d = Psi^t y through the same code path.
//
// `factor`, when given, must be consistent with whatever set it was last
// used on; it is diffed against the new active set and updated
// incrementally. Rank loss inside that update throws RankDeficientError
// and leaves the factor covering the columns added so far (still a
// consistent state for a later diff).
inline PrimalDualState pdas_step_impl(const PrimalDualState& state, const SensingOperator& op,
                                      const Vector& y, const Vector& psi_t_y, double lambda,
                                      const RestrictedOptions& ropts, CholeskyFactor* factor) {
  if (state.x.size() != op.cols() || state.d.size() != op.cols())
    throw DimensionError("pdas step: state dimensions do not match the operator");
  if (y.size() != op.rows()) throw DimensionError("pdas step: y must have n entries");

  PrimalDualState next;
  next.lambda = lambda;
  next.sets = active_sets_from(state.x, state.d, lambda);
  next.x = Vector::Zero(op.cols());

  const IndexList active = next.sets.active_union();
  if (!active.empty()) {
    const auto sign_at = [&](int i) {
      return std::binary_search(next.sets.a_plus.begin(), next.sets.a_plus.end(), i) ? 1.0
                                                                                     : -1.0;
    };
    if (resolve_restricted_method(ropts, op) == RestrictedMethod::cholesky) {
      CholeskyFactor local;
      CholeskyFactor* f = factor ? factor : &local;
      IndexList add, remove;
      {
        IndexList covered = f->indices();
        std::sort(covered.begin(), covered.end());
        std::set_difference(active.begin(), active.end(), covered.begin(), covered.end(),
                            std::back_inserter(add));
        std::set_difference(covered.begin(), covered.end(), active.begin(), active.end(),
                            std::back_inserter(remove));
      }
      chol_update_downdate(*f, std::move(add), remove, op);
      const IndexList& order = f->indices();
      Vector rhs(static_cast<Eigen::Index>(order.size()));
      for (std::size_t k = 0; k < order.size(); ++k)
        rhs[static_cast<Eigen::Index>(k)] = psi_t_y[order[k]] - sign_at(order[k]) * lambda;
      const Vector z = f->solve(rhs);
      for (std::size_t k = 0; k < order.size(); ++k)
        next.x[order[k]] = z[static_cast<Eigen::Index>(k)];
    } else {
      Vector rhs(static_cast<Eigen::Index>(active.size()));
      for (std::size_t k = 0; k < active.size(); ++k)
        rhs[static_cast<Eigen::Index>(k)] = psi_t_y[active[k]] - sign_at(active[k]) * lambda;
      const Vector z0 = gather(state.x, active);
      const Vector z = solve_restricted_cg(op, active, rhs, z0, ropts.cg_iterations);
      for (std::size_t k = 0; k < active.size(); ++k)
        next.x[active[k]] = z[static_cast<Eigen::Index>(k)];
    }
  }

  next.d = op.apply_adjoint(y - op.apply(next.x));
  for (int i : next.sets.a_plus) next.d[i] = lambda;
  for (int i : next.sets.a_minus) next.d[i] = -lambda;
  return next;
}

}  // namespace detail

// Single step from an explicit state. Set extraction, the restricted
// solve, and the dual refresh exactly as in the iteration's inner loop;
// the incoming state's `sets` field is ignored and rederived from (x, d).
inline PrimalDualState pdas_step(const PrimalDualState& state, const SensingOperator& op,
                                 const Vector& y, double lambda,
                                 const RestrictedOptions& ropts = {}) {
  return detail::pdas_step_impl(state, op, y, op.apply_adjoint(y), lambda, ropts, nullptr);
}

// Runs steps until the signed active sets repeat (both A+ and A- equal to
// the previous iteration's) or the iteration budget J is exhausted,
// whichever first. The stability check needs two completed steps, so J = 1
// always reports hit_max_iter after its single step. Rank loss in the
// restricted solve stops the iteration with the last valid state.
//
// `factor` optionally carries an incremental Cholesky factor across calls
// (the continuation driver passes one so consecutive grids share work);
// `psi_t_y` optionally supplies the precomputed adjoint image of y.
inline PdasStatus pdas_solve(const Vector& x0, const Vector& d0, double lambda, int J,
                             const SensingOperator& op, const Vector& y,
                             const RestrictedOptions& ropts = {},
                             CholeskyFactor* factor = nullptr,
                             const Vector* psi_t_y = nullptr) {
  if (J < 1) throw ConfigError("pdas_solve: iteration budget J must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("pdas_solve: lambda must be positive");
  const Vector pty = psi_t_y ? *psi_t_y : op.apply_adjoint(y);

  PdasStatus status;
  PrimalDualState state;
  state.x = x0;
  state.d = d0;
  state.lambda = lambda;

  CholeskyFactor local;
  CholeskyFactor* f = nullptr;
  if (resolve_restricted_method(ropts, op) == RestrictedMethod::cholesky)
    f = factor ? factor : &local;

  bool have_prev = false;
  ActiveSets prev;
  for (;;) {
    PrimalDualState next;
    try {
      next = detail::pdas_step_impl(state, op, y, pty, lambda, ropts, f);
    } catch (const RankDeficientError&) {
      status.outcome = PdasOutcome::rank_deficient;
      status.final_state = std::move(state);
      return status;
    }
    status.iterations += 1;
    const bool stable = have_prev && next.sets.signed_equal(prev);
    prev = next.sets;
    have_prev = true;
    state = std::move(next);
    if (stable) {
      status.outcome = PdasOutcome::converged_sets_stable;
      break;
    }
    if (status.iterations >= J) {
      status.outcome = PdasOutcome::hit_max_iter;
      break;
    }
  }
  status.final_state = std::move(state);
  return status;
}

}  // namespace pdasc
