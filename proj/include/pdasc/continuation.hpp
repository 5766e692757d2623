#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pdasc/cholesky.hpp"
#include "pdasc/errors.hpp"
#include "pdasc/kkt.hpp"
#include "pdasc/pdas.hpp"
#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

enum class SelectionRule { mdp, dp, bic, active_set_cap };

inline const char* to_string(SelectionRule r) {
  switch (r) {
    case SelectionRule::mdp: return "mdp";
    case SelectionRule::dp: return "dp";
    case SelectionRule::bic: return "bic";
    case SelectionRule::active_set_cap: return "cap";
  }
  return "unknown";
}

struct ContinuationConfig {
  // Grid endpoints; defaults are ||Psi^t y||_inf and 1e-10 times that.
  std::optional<double> lambda_max;
  std::optional<double> lambda_min;
  // Number of log-scale intervals between the endpoints...
  int grid_size = 100;
  // ...unless a decrease factor is given directly, in which case the grid
  // is lambda_max * rho^s for s = 0, 1, ... while the value stays above
  // lambda_min.
  std::optional<double> rho;
  // Inner iteration budget per grid value. One step per value is the
  // normal continuation regime; the support-recovery analysis mode raises
  // it to the expected sparsity level.
  int max_inner_iterations = 1;
  SelectionRule rule = SelectionRule::bic;
  // Noise level for the two discrepancy rules; required there, unused
  // elsewhere.
  std::optional<double> epsilon;
  // Stop once the solution has eta * n or more nonzeros, whatever the
  // rule; a solution that dense has left the sparse regime.
  double eta = 0.5;
  RestrictedOptions restricted;
};

struct PathStep {
  double lambda = 0.0;
  Vector x;
  Vector d;
  ActiveSets sets;
  PdasOutcome outcome = PdasOutcome::hit_max_iter;
  int pdas_iterations = 0;
  KktResiduals kkt;
  double residual_norm = 0.0;  // ||Psi x - y||_2, raw
  double bic = 0.0;
  int nnz = 0;
  // ||Psi x_debiased - y||_2, recorded only on paths run under the
  // debiased discrepancy rule; NaN otherwise.
  double debiased_residual_norm = std::numeric_limits<double>::quiet_NaN();

  IndexList active() const { return sets.active_union(); }
};

struct SolutionPath {
  std::vector<PathStep> steps;
  std::optional<int> selected;
  Vector selected_x;  // empty when nothing was selected
  bool truncated = false;  // rank loss ended the grid early
  SelectionRule rule = SelectionRule::bic;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double eta = 0.5;
  double cap_threshold = 0.0;  // eta * n, the realized nonzero-count cap
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double rho = 0.0;
};

// Log-equispaced grid lambda_max * rho^s, s = 0..n_intervals, with rho
// chosen so the last value lands on lambda_min.
inline std::vector<double> lambda_grid(double lambda_max, double lambda_min, int n_intervals) {
  if (!(lambda_min > 0.0) || !(lambda_min < lambda_max))
    throw ConfigError("lambda_grid: need 0 < lambda_min < lambda_max");
  if (n_intervals < 1) throw ConfigError("lambda_grid: need at least one interval");
  const double rho = std::pow(lambda_min / lambda_max, 1.0 / n_intervals);
  std::vector<double> grid(static_cast<std::size_t>(n_intervals) + 1);
  for (int s = 0; s <= n_intervals; ++s)
    grid[static_cast<std::size_t>(s)] = lambda_max * std::pow(rho, s);
  return grid;
}

// Grid for a caller-chosen decrease factor: lambda_max * rho^s while the
// value stays at or above lambda_min (up to 1e-12 relative slack).
inline std::vector<double> lambda_grid_rho(double lambda_max, double rho, double lambda_min) {
  if (!(lambda_min > 0.0) || !(lambda_min < lambda_max))
    throw ConfigError("lambda_grid_rho: need 0 < lambda_min < lambda_max");
  if (!(rho > 0.0) || !(rho < 1.0)) throw ConfigError("lambda_grid_rho: rho must be in (0,1)");
  const double floor = lambda_min * (1.0 - 1e-12);
  std::vector<double> grid;
  for (int s = 0;; ++s) {
    const double v = lambda_max * std::pow(rho, s);
    if (v < floor) break;
    grid.push_back(v);
    if (grid.size() > 1000000) throw ConfigError("lambda_grid_rho: grid exceeds 1e6 values");
  }
  return grid;
}

// x + (Psi_A^t Psi_A)^{-1} d on the active set, zero elsewhere. When the
// pair satisfies the stationarity equation this is exactly the
// least-squares solution on A.
inline Vector debias(const SensingOperator& op, const Vector& x, const Vector& d,
                     const IndexList& active) {
  Vector out = Vector::Zero(op.cols());
  if (active.empty()) return out;
  const Matrix g = op.gram_restricted(active);
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw RankDeficientError("debias: restricted Gram matrix is not positive definite",
                             active.front());
  const Vector w = llt.solve(gather(d, active));
  for (std::size_t k = 0; k < active.size(); ++k)
    out[active[k]] = x[active[k]] + w[static_cast<Eigen::Index>(k)];
  return out;
}

// Discrepancy test on a debiased candidate.
inline bool mdp_check(const SensingOperator& op, const Vector& y, const Vector& x_debiased,
                      double epsilon) {
  if (epsilon < 0.0) throw ConfigError("mdp_check: epsilon must be nonnegative");
  return (op.apply(x_debiased) - y).norm() <= epsilon;
}

// Discrepancy test on the raw iterate.
inline bool dp_check(const SensingOperator& op, const Vector& y, const Vector& x,
                     double epsilon) {
  if (epsilon < 0.0) throw ConfigError("dp_check: epsilon must be nonnegative");
  return (op.apply(x) - y).norm() <= epsilon;
}

// 1/2 ||Psi x - y||^2 + (ln n / n) * ||x||_0
inline double bic_score(const SensingOperator& op, const Vector& y, const Vector& x) {
  const double n = static_cast<double>(op.rows());
  return 0.5 * (op.apply(x) - y).squaredNorm() +
         (std::log(n) / n) * static_cast<double>(count_nonzeros(x));
}

// Applies a selection rule to a recorded path. The debiased discrepancy
// rule reads the per-step debiased residuals, so it requires a path that
// was run under that rule (those are the only paths that track them); the
// other three rules work on any path. Throws SelectionFailedError when the
// rule identifies no step.
inline std::pair<int, Vector> select_solution(const SolutionPath& path, SelectionRule rule) {
  const auto& steps = path.steps;
  if (steps.empty()) throw SelectionFailedError("selection on a path with no completed steps");
  switch (rule) {
    case SelectionRule::mdp: {
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const double dres = steps[i].debiased_residual_norm;
        if (std::isnan(dres))
          throw UnsupportedError(
              "debiased-discrepancy selection needs a path run under that rule");
        if (dres <= path.epsilon) {
          if (path.selected && *path.selected == static_cast<int>(i))
            return {static_cast<int>(i), path.selected_x};
          throw UnsupportedError(
              "debiased candidate for this step is not stored on the path");
        }
      }
      throw SelectionFailedError("debiased discrepancy never reached the noise level");
    }
    case SelectionRule::dp: {
      for (std::size_t i = 0; i < steps.size(); ++i)
        if (steps[i].residual_norm <= path.epsilon) return {static_cast<int>(i), steps[i].x};
      throw SelectionFailedError("raw discrepancy never reached the noise level");
    }
    case SelectionRule::bic: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i].bic < steps[best].bic) best = i;  // ties keep the larger lambda
      return {static_cast<int>(best), steps[best].x};
    }
    case SelectionRule::active_set_cap: {
      std::optional<std::size_t> last;
      for (std::size_t i = 0; i < steps.size(); ++i)
        if (static_cast<double>(steps[i].nnz) < path.cap_threshold) last = i;
      if (!last) throw SelectionFailedError("every completed step is at or above the size cap");
      return {static_cast<int>(*last), steps[*last].x};
    }
  }
  throw ConfigError("select_solution: unknown rule");
}

// Continuation over the decreasing lambda grid. Starts from (0, Psi^t y),
// runs the active-set iteration at every grid value warm-started from the
// previous value's pair, records every completed step, and stops early
// when the selection rule fires (discrepancy rules), when the solution
// density hits the cap, or when the grid is exhausted. Rank loss truncates
// the path; selection then runs over the completed steps.
inline SolutionPath pdasc_solve(const SensingOperator& op, const Vector& y,
                                const ContinuationConfig& config) {
  if (y.size() != op.rows()) throw DimensionError("pdasc_solve: y must have n entries");
  if (config.max_inner_iterations < 1)
    throw ConfigError("pdasc_solve: inner iteration budget must be >= 1");
  if (!(config.eta >= 0.5 && config.eta <= 1.0))
    throw ConfigError("pdasc_solve: eta must lie in [0.5, 1]");
  const bool needs_epsilon =
      config.rule == SelectionRule::mdp || config.rule == SelectionRule::dp;
  if (needs_epsilon && !config.epsilon)
    throw ConfigError("pdasc_solve: discrepancy rules need a noise level epsilon");
  if (needs_epsilon && !(*config.epsilon >= 0.0))
    throw ConfigError("pdasc_solve: epsilon must be nonnegative");

  const Vector psi_t_y = op.apply_adjoint(y);
  const double auto_lambda_max = psi_t_y.lpNorm<Eigen::Infinity>();
  const double lambda_max = config.lambda_max.value_or(auto_lambda_max);

  SolutionPath path;
  path.rule = config.rule;
  path.epsilon = config.epsilon.value_or(std::numeric_limits<double>::quiet_NaN());
  path.eta = config.eta;
  path.cap_threshold = config.eta * static_cast<double>(op.rows());

  const double log_n_over_n = std::log(static_cast<double>(op.rows())) / op.rows();

  if (!(lambda_max > 0.0)) {
    // Psi^t y = 0: zero is the exact minimizer at every positive lambda,
    // so the whole path collapses to a single degenerate record.
    PathStep step;
    step.lambda = 0.0;
    step.x = Vector::Zero(op.cols());
    step.d = psi_t_y;
    for (int i = 0; i < op.cols(); ++i) step.sets.inactive.push_back(i);
    step.outcome = PdasOutcome::converged_sets_stable;
    step.pdas_iterations = 0;
    step.residual_norm = y.norm();
    step.bic = 0.5 * y.squaredNorm();
    step.nnz = 0;
    if (config.rule == SelectionRule::mdp) step.debiased_residual_norm = step.residual_norm;
    path.steps.push_back(std::move(step));
    path.lambda_max = 0.0;
    path.lambda_min = 0.0;
    path.rho = 0.0;
    const bool fires = needs_epsilon && path.steps[0].residual_norm <= *config.epsilon;
    if (!needs_epsilon || fires) {
      path.selected = 0;
      path.selected_x = path.steps[0].x;
    }
    return path;
  }

  const double lambda_min = config.lambda_min.value_or(1e-10 * lambda_max);
  std::vector<double> grid;
  if (config.rho) {
    grid = lambda_grid_rho(lambda_max, *config.rho, lambda_min);
    path.rho = *config.rho;
  } else {
    grid = lambda_grid(lambda_max, lambda_min, config.grid_size);
    path.rho = std::pow(lambda_min / lambda_max, 1.0 / config.grid_size);
  }
  path.lambda_max = lambda_max;
  path.lambda_min = lambda_min;

  Vector x = Vector::Zero(op.cols());
  Vector d = psi_t_y;
  CholeskyFactor factor;

  for (double lambda : grid) {
    PdasStatus status = pdas_solve(x, d, lambda, config.max_inner_iterations, op, y,
                                   config.restricted, &factor, &psi_t_y);
    if (status.outcome == PdasOutcome::rank_deficient) {
      path.truncated = true;
      break;
    }
    x = std::move(status.final_state.x);
    d = std::move(status.final_state.d);

    PathStep step;
    step.lambda = lambda;
    step.x = x;
    step.d = d;
    step.sets = std::move(status.final_state.sets);
    step.outcome = status.outcome;
    step.pdas_iterations = status.iterations;
    const Vector applied = op.apply(x);
    const Vector residual = y - applied;
    step.residual_norm = residual.norm();
    step.kkt = kkt_residual_given(psi_t_y, op.apply_adjoint(applied), x, d, lambda);
    step.nnz = count_nonzeros(x);
    step.bic = 0.5 * residual.squaredNorm() + log_n_over_n * static_cast<double>(step.nnz);

    bool fired = false;
    Vector fired_x;
    if (config.rule == SelectionRule::mdp) {
      try {
        Vector xd = debias(op, x, d, step.sets.active_union());
        step.debiased_residual_norm = (op.apply(xd) - y).norm();
        if (step.debiased_residual_norm <= *config.epsilon) {
          fired = true;
          fired_x = std::move(xd);
        }
      } catch (const RankDeficientError&) {
        path.truncated = true;
        path.steps.push_back(std::move(step));
        break;
      }
    } else if (config.rule == SelectionRule::dp) {
      if (step.residual_norm <= *config.epsilon) {
        fired = true;
        fired_x = x;
      }
    }

    const int nnz = step.nnz;
    path.steps.push_back(std::move(step));

    if (fired) {
      path.selected = static_cast<int>(path.steps.size()) - 1;
      path.selected_x = std::move(fired_x);
      return path;
    }
    if (static_cast<double>(nnz) >= path.cap_threshold) break;
  }

  if (config.rule == SelectionRule::bic || config.rule == SelectionRule::active_set_cap) {
    try {
      auto [index, chosen] = select_solution(path, config.rule);
      path.selected = index;
      path.selected_x = std::move(chosen);
    } catch (const SelectionFailedError&) {
      // leave selected empty
    }
  }
  return path;
}

}  // namespace pdasc
