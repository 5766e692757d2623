#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdasc/continuation.hpp"
#include "pdasc/errors.hpp"
#include "pdasc/rng.hpp"
#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

enum class Ensemble { gaussian, bernoulli, partial_dct };

inline const char* to_string(Ensemble e) {
  switch (e) {
    case Ensemble::gaussian: return "gaussian";
    case Ensemble::bernoulli: return "bernoulli";
    case Ensemble::partial_dct: return "partial_dct";
  }
  return "unknown";
}

struct ExperimentSpec {
  Ensemble ensemble = Ensemble::gaussian;
  int n = 0;
  int p = 0;
  int T = 0;
  double dyna = 1.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  SelectionRule rule = SelectionRule::bic;
  int replications = 10;
  // Noise level handed to the discrepancy rules; when absent, each
  // replication uses its realized noise norm (1e-10 when sigma = 0).
  std::optional<double> epsilon_override;
  // Grid/iteration knobs; the rule and epsilon fields in here are
  // overwritten per replication from the fields above.
  ContinuationConfig solver;
};

struct MetricsRow {
  double time_seconds = 0.0;
  double l2_re = 0.0;     // ||x_hat - x_true||_2 / ||x_true||_2
  double linf_ae = 0.0;   // ||x_hat - x_true||_inf
  double l2_dre = 0.0;    // same pair of errors for the debiased estimate
  double linf_dae = 0.0;
  double set_extra = 0.0;   // |support(x_hat) \ support(x_true)|
  double set_missed = 0.0;  // |support(x_true) \ support(x_hat)|
  double lambda_hat = 0.0;
  double psnr = 0.0;
  bool failed = false;  // selection rule never fired
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;      // one per replication
  MetricsRow aggregate;              // mean over the non-failed rows
  int failed_count = 0;
};

// T-sparse signal: support uniform without replacement; magnitudes
// log-uniform on [1, dyna] with both extremes forced to appear (two
// random slots get exactly 1 and exactly dyna, so the realized dynamic
// range equals dyna whenever T >= 2); signs fair coins. Draw order is
// fixed forever: support, extreme-slot permutation, remaining magnitudes
// in slot order, then signs in slot order.
inline Vector gen_sparse_signal(int p, int T, double dyna, std::uint64_t seed) {
  if (T < 1 || T > p) throw DimensionError("gen_sparse_signal: need 1 <= T <= p");
  if (!(dyna >= 1.0)) throw ConfigError("gen_sparse_signal: dynamic range must be >= 1");
  SplitMix64 rng(seed);
  const IndexList support = sample_without_replacement(p, T, rng);

  std::vector<int> perm(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = T - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1))]);

  std::vector<double> mags(static_cast<std::size_t>(T));
  mags[static_cast<std::size_t>(perm[0])] = 1.0;
  if (T >= 2) mags[static_cast<std::size_t>(perm[1])] = dyna;
  for (int i = 0; i < T; ++i) {
    if (i == perm[0] || (T >= 2 && i == perm[1])) continue;
    mags[static_cast<std::size_t>(i)] = std::pow(dyna, rng.uniform01());
  }

  Vector x = Vector::Zero(p);
  for (int i = 0; i < T; ++i)
    x[support[static_cast<std::size_t>(i)]] =
        (rng.coin() ? 1.0 : -1.0) * mags[static_cast<std::size_t>(i)];
  return x;
}

// Sensing ensembles. Gaussian: i.i.d. normal entries, exact column
// normalization. Bernoulli: +-1/sqrt(n) entries (columns unit-norm by
// construction; the dense constructor's normalization is a no-op up to
// rounding). Partial DCT: n distinct rows sampled uniformly, implicit
// fast-transform backend. Entries are drawn column by column.
inline SensingOperator gen_sensing_matrix(Ensemble ensemble, int n, int p, std::uint64_t seed) {
  if (n < 1 || n >= p) throw DimensionError("gen_sensing_matrix: need 1 <= n < p");
  SplitMix64 rng(seed);
  switch (ensemble) {
    case Ensemble::gaussian: {
      Matrix a(n, p);
      for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
      return SensingOperator::dense(std::move(a));
    }
    case Ensemble::bernoulli: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      Matrix a(n, p);
      for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = rng.coin() ? scale : -scale;
      return SensingOperator::dense(std::move(a));
    }
    case Ensemble::partial_dct: {
      IndexList rows = sample_without_replacement(p, n, rng);
      return SensingOperator::partial_dct(p, std::move(rows));
    }
  }
  throw ConfigError("gen_sensing_matrix: unknown ensemble");
}

// y = y_clean + eta with eta_i ~ N(0, sigma^2); returns the realized
// noise norm as the natural discrepancy level. sigma = 0 draws nothing.
inline std::pair<Vector, double> add_noise(const Vector& y_clean, double sigma,
                                           std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("add_noise: sigma must be nonnegative");
  if (sigma == 0.0) return {y_clean, 0.0};
  SplitMix64 rng(seed);
  Vector eta(y_clean.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = sigma * rng.normal();
  return {y_clean + eta, eta.norm()};
}

// Error/support/PSNR metrics against the known truth. PSNR is
// 20 log10(max|x_true| / RMSE) with RMSE = ||x_hat - x_true||_2 / sqrt(p),
// capped at the sentinel 999 (which also stands in for an exact match).
inline MetricsRow compute_metrics(const Vector& x_hat, const Vector& x_debiased,
                                  const Vector& x_true, double lambda_hat, double elapsed) {
  if (x_hat.size() != x_true.size() || x_debiased.size() != x_true.size())
    throw DimensionError("compute_metrics: dimension mismatch");
  const double true_norm = x_true.norm();
  if (!(true_norm > 0.0))
    throw Error("compute_metrics: relative errors are undefined for a zero true signal");

  MetricsRow row;
  row.time_seconds = elapsed;
  row.lambda_hat = lambda_hat;
  const Vector diff = x_hat - x_true;
  row.l2_re = diff.norm() / true_norm;
  row.linf_ae = diff.lpNorm<Eigen::Infinity>();
  const Vector ddiff = x_debiased - x_true;
  row.l2_dre = ddiff.norm() / true_norm;
  row.linf_dae = ddiff.lpNorm<Eigen::Infinity>();

  int extra = 0, missed = 0;
  for (Eigen::Index i = 0; i < x_true.size(); ++i) {
    const bool in_hat = x_hat[i] != 0.0;
    const bool in_true = x_true[i] != 0.0;
    if (in_hat && !in_true) ++extra;
    if (in_true && !in_hat) ++missed;
  }
  row.set_extra = extra;
  row.set_missed = missed;

  const double rmse = diff.norm() / std::sqrt(static_cast<double>(x_true.size()));
  const double peak = x_true.lpNorm<Eigen::Infinity>();
  row.psnr = rmse == 0.0 ? 999.0 : std::min(999.0, 20.0 * std::log10(peak / rmse));
  return row;
}

// One full experiment: per replication, derive sub-seeds, generate signal
// / operator / noise, run the continuation solver, select, and score.
// Solve time excludes data generation and the dense Gram precomputation
// (both happen before the clock starts). A replication whose rule never
// fires contributes a failed row and is excluded from the aggregate.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (!(spec.T < spec.n && spec.n < spec.p))
    throw DimensionError("run_experiment: need T < n < p");
  if (spec.T < 1) throw DimensionError("run_experiment: need T >= 1");
  if (spec.replications < 1) throw ConfigError("run_experiment: need replications >= 1");

  ExperimentResult result;
  result.rows.reserve(static_cast<std::size_t>(spec.replications));

  for (int r = 0; r < spec.replications; ++r) {
    const std::uint64_t rep_seed = spec.seed ^ static_cast<std::uint64_t>(r);
    const Vector x_true =
        gen_sparse_signal(spec.p, spec.T, spec.dyna, SplitMix64::derive(rep_seed, 1));
    const SensingOperator op =
        gen_sensing_matrix(spec.ensemble, spec.n, spec.p, SplitMix64::derive(rep_seed, 2));
    const Vector y_clean = op.apply(x_true);
    const auto [y, realized_eps] = add_noise(y_clean, spec.sigma, SplitMix64::derive(rep_seed, 3));

    ContinuationConfig config = spec.solver;
    config.rule = spec.rule;
    config.epsilon =
        spec.epsilon_override.value_or(spec.sigma > 0.0 ? realized_eps : 1e-10);

    const auto t0 = std::chrono::steady_clock::now();
    const SolutionPath path = pdasc_solve(op, y, config);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!path.selected) {
      MetricsRow row;
      row.time_seconds = elapsed;
      row.failed = true;
      result.rows.push_back(row);
      result.failed_count += 1;
      continue;
    }

    const PathStep& step = path.steps[static_cast<std::size_t>(*path.selected)];
    Vector x_debiased;
    if (spec.rule == SelectionRule::mdp) {
      x_debiased = path.selected_x;
    } else {
      try {
        x_debiased = debias(op, step.x, step.d, step.active());
      } catch (const RankDeficientError&) {
        x_debiased = step.x;  // no exact fit available; score the raw estimate twice
      }
    }
    // The rule's published estimate: the debiased vector for the debiased
    // discrepancy rule, the raw path solution for every other rule.
    const Vector& x_hat = spec.rule == SelectionRule::mdp ? path.selected_x : step.x;
    result.rows.push_back(compute_metrics(x_hat, x_debiased, x_true, step.lambda, elapsed));
  }

  MetricsRow& agg = result.aggregate;
  const int ok = spec.replications - result.failed_count;
  if (ok == 0) {
    agg.failed = true;
  } else {
    for (const MetricsRow& row : result.rows) {
      if (row.failed) continue;
      agg.time_seconds += row.time_seconds;
      agg.l2_re += row.l2_re;
      agg.linf_ae += row.linf_ae;
      agg.l2_dre += row.l2_dre;
      agg.linf_dae += row.linf_dae;
      agg.set_extra += row.set_extra;
      agg.set_missed += row.set_missed;
      agg.lambda_hat += row.lambda_hat;
      agg.psnr += row.psnr;
    }
    const double inv = 1.0 / ok;
    agg.time_seconds *= inv;
    agg.l2_re *= inv;
    agg.linf_ae *= inv;
    agg.l2_dre *= inv;
    agg.linf_dae *= inv;
    agg.set_extra *= inv;
    agg.set_missed *= inv;
    agg.lambda_hat *= inv;
    agg.psnr *= inv;
  }
  return result;
}

}  // namespace pdasc
