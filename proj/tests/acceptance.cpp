// Acceptance gate: one self-contained check per published criterion, each
// printing a single [PASS]/[FAIL] line with the measured quantities and the
// pinned tolerance. Run with no arguments for the full gate or with one of
// c1 c2 c3 c4a c4b c5 c6 c7 c8 c9 to run a single check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pdasc/baselines.hpp"
#include "pdasc/bench.hpp"
#include "pdasc/cli.hpp"
#include "pdasc/continuation.hpp"
#include "pdasc/csv.hpp"
#include "pdasc/kkt.hpp"
#include "pdasc/pdas.hpp"
#include "pdasc/rip.hpp"

using namespace pdasc;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool pass = false;
  std::string detail;
};

struct Instance {
  SensingOperator op;
  Vector y;
  Vector x_true;
};

Instance make_instance(Ensemble ens, int n, int p, int T, double dyna, double sigma,
                       std::uint64_t seed) {
  Vector x = gen_sparse_signal(p, T, dyna, SplitMix64::derive(seed, 1));
  SensingOperator op = gen_sensing_matrix(ens, n, p, SplitMix64::derive(seed, 2));
  Vector y_clean = op.apply(x);
  auto [y, realized] = add_noise(y_clean, sigma, SplitMix64::derive(seed, 3));
  (void)realized;
  return {std::move(op), std::move(y), std::move(x)};
}

std::vector<int> support_of(const Vector& x) {
  std::vector<int> s;
  for (int i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) s.push_back(i);
  return s;
}

// --- criterion 1: KKT certification of every selected solution ------------

Check crit1() {
  const auto t0 = Clock::now();
  int selected_count = 0;
  double worst_r1 = 0.0, worst_r2 = 0.0;
  for (int s = 0; s < 100; ++s) {
    const std::uint64_t seed = 5000 + s;
    const int T = 4 + (s % 13);  // sweeps 4..16
    const double sigma = (s % 2) ? 1e-3 : 0.0;
    Instance inst = make_instance(Ensemble::gaussian, 64, 256, T, 10.0, sigma, seed);

    ContinuationConfig cfg;
    cfg.rule = SelectionRule::bic;
    cfg.max_inner_iterations = 15;  // run each grid value to set stability
    SolutionPath path = pdasc_solve(inst.op, inst.y, cfg);
    if (!path.selected.has_value()) continue;
    ++selected_count;
    const PathStep& step = path.steps[static_cast<std::size_t>(*path.selected)];
    KktResiduals res = kkt_residual(inst.op, inst.y, step.x, step.d, step.lambda);
    worst_r1 = std::max(worst_r1, res.stationarity);
    worst_r2 = std::max(worst_r2, res.fixed_point);
  }
  const double el = seconds_since(t0);
  std::ostringstream d;
  d << "selected " << selected_count << "/100 instances, worst r1 = " << worst_r1
    << ", worst r2 = " << worst_r2 << " (tol 1e-8), " << el << " s (budget 30 s)";
  return {selected_count == 100 && worst_r1 <= 1e-8 && worst_r2 <= 1e-8 && el < 30.0,
          d.str()};
}

// --- criterion 2: fixed-lambda minimizer agrees with the proximal baseline -

Check crit2() {
  const auto t0 = Clock::now();
  int agree = 0;
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const std::uint64_t seed = 6000 + s;
    const double sigma = (s % 2) ? 1e-3 : 0.0;
    Instance inst = make_instance(Ensemble::gaussian, 32, 64, 4, 10.0, sigma, seed);
    const double lambda_max = inst.op.apply_adjoint(inst.y).lpNorm<Eigen::Infinity>();
    const double lambda = 0.1 * lambda_max;

    // A cold start at this depth loses rank; warm in from a short
    // continuation whose grid lands exactly on the target value.
    ContinuationConfig warm;
    warm.lambda_max = lambda_max;
    warm.lambda_min = lambda;
    warm.grid_size = 20;
    warm.rule = SelectionRule::bic;
    SolutionPath path = pdasc_solve(inst.op, inst.y, warm);
    if (path.steps.size() < 2) continue;
    const PathStep& prev = path.steps[path.steps.size() - 2];
    PdasStatus st = pdas_solve(prev.x, prev.d, lambda, 30, inst.op, inst.y);
    if (st.outcome != PdasOutcome::converged_sets_stable) continue;

    IstaConfig icfg;
    icfg.tol = 1e-10;
    IstaResult ista = ista_solve(inst.op, inst.y, lambda, icfg);
    if (!ista.converged) continue;
    const double diff = (st.final_state.x - ista.x).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, diff);
    if (diff <= 1e-6) ++agree;
  }
  const double el = seconds_since(t0);
  std::ostringstream d;
  d << agree << "/50 instances agree, worst gap = " << worst << " (tol 1e-6), " << el
    << " s (budget 60 s)";
  return {agree == 50 && el < 60.0, d.str()};
}

// --- criterion 3: one corrective step absorbs sub-threshold noise ----------

Check crit3() {
  const auto t0 = Clock::now();
  int recovered = 0, attempted = 0;
  double worst = 0.0;
  for (int s = 0; s < 200 && attempted < 50; ++s) {
    const std::uint64_t seed = 7000 + s;
    const int T = 4 + (s % 9);
    const double sigma = (s % 2) ? 1e-3 : 0.0;
    Instance inst = make_instance(Ensemble::gaussian, 64, 256, T, 10.0, sigma, seed);

    ContinuationConfig cfg;
    cfg.rule = SelectionRule::bic;
    cfg.max_inner_iterations = 15;
    SolutionPath path = pdasc_solve(inst.op, inst.y, cfg);
    if (!path.selected.has_value()) continue;
    const PathStep& step = path.steps[static_cast<std::size_t>(*path.selected)];
    if (step.outcome != PdasOutcome::converged_sets_stable) continue;
    const double lambda = step.lambda;

    // Canonicalize: one clean step replaces the path's incrementally
    // updated solve with the step map's own arithmetic, after which the
    // state must reproduce itself exactly (the restricted system depends
    // only on the active set, not on the incoming values).
    PrimalDualState star;
    star.x = step.x;
    star.d = step.d;
    star.lambda = lambda;
    star = pdas_step(star, inst.op, inst.y, lambda);
    {
      PrimalDualState again = pdas_step(star, inst.op, inst.y, lambda);
      if ((again.x - star.x).lpNorm<Eigen::Infinity>() != 0.0 ||
          (again.d - star.d).lpNorm<Eigen::Infinity>() != 0.0)
        continue;
    }
    ++attempted;

    // Stability radius: distance from the nearest strict-inequality
    // margin, excluding only entries sitting exactly on the boundary.
    double theta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < star.x.size(); ++i) {
      const double gap = std::abs(std::abs(star.x[i] + star.d[i]) - lambda);
      if (gap != 0.0) theta = std::min(theta, gap);
    }
    if (!std::isfinite(theta)) continue;

    SplitMix64 rng(SplitMix64::derive(seed, 9));
    PrimalDualState noisy = star;
    for (int i = 0; i < noisy.x.size(); ++i) {
      noisy.x[i] += (2.0 * rng.uniform01() - 1.0) * (theta / 4.0);
      noisy.d[i] += (2.0 * rng.uniform01() - 1.0) * (theta / 4.0);
    }
    PrimalDualState corrected = pdas_step(noisy, inst.op, inst.y, lambda);
    const double ex = (corrected.x - star.x).lpNorm<Eigen::Infinity>();
    const double ed = (corrected.d - star.d).lpNorm<Eigen::Infinity>();
    const double err = std::max(ex, ed);
    worst = std::max(worst, err);
    if (err <= 1e-12) ++recovered;
  }
  const double el = seconds_since(t0);
  std::ostringstream d;
  d << recovered << "/" << attempted << " perturbed states recovered in one step, worst "
    << "residual = " << worst << " (tol 1e-12), " << el << " s";
  return {attempted == 50 && recovered == 50, d.str()};
}

// --- criterion 4a: support recovery along the full continuation path -------

Check crit4a() {
  const auto t0 = Clock::now();
  int good = 0;
  double worst_ratio = 0.0;  // error / bound, want <= 1
  for (int s = 0; s < 100; ++s) {
    const std::uint64_t seed = 8000 + s;
    Instance inst = make_instance(Ensemble::gaussian, 128, 512, 8, 10.0, 0.0, seed);

    ContinuationConfig cfg;
    cfg.rho = 2.0 / 3.0;
    cfg.max_inner_iterations = 8;  // matches the planted sparsity level
    cfg.rule = SelectionRule::active_set_cap;
    SolutionPath path = pdasc_solve(inst.op, inst.y, cfg);
    if (path.steps.empty()) continue;
    const PathStep& last = path.steps.back();

    const std::vector<int> sup_hat = support_of(last.x);
    const std::vector<int> sup_true = support_of(inst.x_true);
    if (sup_hat != sup_true) continue;

    // Error bound at the final grid value: twice lambda times the spectral
    // norm of the inverted restricted Gram (1 / its smallest eigenvalue).
    IndexList active(sup_true.begin(), sup_true.end());
    const Matrix g = inst.op.gram_restricted(active);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    const double inv_norm = 1.0 / eig.eigenvalues().minCoeff();
    const double bound = 2.0 * last.lambda * inv_norm;
    const double err = (last.x - inst.x_true).lpNorm<Eigen::Infinity>();
    worst_ratio = std::max(worst_ratio, err / bound);
    if (err <= bound) ++good;
  }
  const double el = seconds_since(t0);
  std::ostringstream d;
  d << good << "/100 seeds recover the exact support within the final-value error bound "
    << "(need >= 95), worst error/bound ratio = " << worst_ratio << ", " << el << " s";
  return {good >= 95, d.str()};
}

// --- criterion 4b: certified-isometry tiny instances ------------------------

Check crit4b() {
  const auto t0 = Clock::now();
  // The check as published asks for 20 instances of shape 6 x 12 carrying a
  // brute-force certificate delta_2 <= 1/5. No such matrix exists at that
  // shape: for unit columns the worst pair of columns already forces
  // delta_2 >= max coherence >= sqrt((p - n) / (n (p - 1))) = sqrt(6/66)
  // ~= 0.3015 > 0.2, so the certificate scan below comes back empty. The
  // check is left red on purpose; the companion sweep at a shape where the
  // floor sits below the threshold (6 x 7, floor 1/6) shows the certified
  // pipeline itself recovering 20/20.
  double best_delta2 = std::numeric_limits<double>::infinity();
  int certified_6x12 = 0;
  for (int s = 0; s < 2000; ++s) {
    SensingOperator op = gen_sensing_matrix(Ensemble::gaussian, 6, 12, 42000 + s);
    const double d2 = rip_constant_bruteforce(op, 2);
    best_delta2 = std::min(best_delta2, d2);
    if (d2 <= 0.2) ++certified_6x12;
  }
  const double welch_floor = std::sqrt(6.0 / 66.0);

  // Companion at a shape where the floor sits below the threshold: the
  // simplex frame packs 7 unit vectors in R^6 at pairwise cosine -1/6, the
  // best possible, so delta_2 = 1/6 < 1/5. Each instance gets a random
  // rotation (isometry-invariant, so the certificate carries over) and the
  // certificate is still taken from the brute-force scan, not assumed.
  int companion_certified = 0, companion_recovered = 0;
  double companion_delta2 = 0.0;
  {
    Matrix centered = Matrix::Identity(7, 7) - Matrix::Constant(7, 7, 1.0 / 7.0);
    Eigen::HouseholderQR<Matrix> basis_qr(Vector::Ones(7));
    Matrix q7 = basis_qr.householderQ();
    Matrix frame = q7.rightCols(6).transpose() * centered;  // 6 x 7, cos = -1/6
    for (int s = 0; s < 20; ++s) {
      SplitMix64 rng(SplitMix64::derive(43000 + s, 5));
      Matrix g(6, 6);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) g(i, j) = rng.normal();
      Matrix rot = Eigen::HouseholderQR<Matrix>(g).householderQ();
      SensingOperator op = SensingOperator::dense(rot * frame);
      const double d2 = rip_constant_bruteforce(op, 2);
      companion_delta2 = std::max(companion_delta2, d2);
      if (d2 > 0.2) continue;
      ++companion_certified;
      Vector x = gen_sparse_signal(7, 1, 1.0, 43000 + s);
      Vector y = op.apply(x);
      ContinuationConfig cfg;
      cfg.rho = 2.0 / 3.0;
      cfg.max_inner_iterations = 1;
      cfg.rule = SelectionRule::active_set_cap;
      SolutionPath path = pdasc_solve(op, y, cfg);
      if (path.steps.empty()) continue;
      if (support_of(path.steps.back().x) == support_of(x)) ++companion_recovered;
    }
  }

  const double el = seconds_since(t0);
  std::ostringstream d;
  d << "no 6x12 certificate exists: best delta_2 over 2000 seeds = " << best_delta2
    << ", coherence floor at this shape = " << welch_floor << " > 0.2 threshold; "
    << "companion rotated-simplex 6x7 sweep (delta_2 <= " << companion_delta2 << "): "
    << companion_recovered << "/" << companion_certified
    << " certified instances recovered, " << el << " s";
  return {certified_6x12 >= 20, d.str()};
}

// --- criterion 5: selection-rule behavior across the benchmark grid --------

Check crit5() {
  const auto t0 = Clock::now();
  const std::vector<detail::BenchSetting> settings = detail::standard_settings();
  // Rows 0,1 / 3,4 / 6,7 are the low- and medium-noise rows per ensemble;
  // rows 2, 5, 8 carry the highest noise.
  const std::set<int> high_rows = {2, 5, 8};

  std::vector<ExperimentResult> mdp(9), bic(9), dp(9);
  for (int i = 0; i < 9; ++i) {
    ExperimentSpec spec;
    spec.ensemble = settings[static_cast<std::size_t>(i)].ensemble;
    spec.n = settings[static_cast<std::size_t>(i)].n;
    spec.p = settings[static_cast<std::size_t>(i)].p;
    spec.T = settings[static_cast<std::size_t>(i)].T;
    spec.sigma = settings[static_cast<std::size_t>(i)].sigma;
    spec.dyna = 1e2;
    spec.seed = 4242;
    spec.replications = 10;
    spec.rule = SelectionRule::mdp;
    mdp[static_cast<std::size_t>(i)] = run_experiment(spec);
    spec.rule = SelectionRule::bic;
    bic[static_cast<std::size_t>(i)] = run_experiment(spec);
    spec.rule = SelectionRule::dp;
    dp[static_cast<std::size_t>(i)] = run_experiment(spec);
  }

  // (a) both support-faithful rules miss nothing at low/medium noise
  bool a_ok = true;
  for (int i = 0; i < 9; ++i) {
    if (high_rows.count(i)) continue;
    if (mdp[static_cast<std::size_t>(i)].aggregate.set_missed != 0.0) a_ok = false;
    if (bic[static_cast<std::size_t>(i)].aggregate.set_missed != 0.0) a_ok = false;
  }
  // (b) the raw discrepancy rule overselects whenever it succeeds at all
  bool b_ok = true;
  for (int i = 0; i < 9; ++i) {
    const auto& dres = dp[static_cast<std::size_t>(i)];
    const auto& mres = mdp[static_cast<std::size_t>(i)];
    if (dres.failed_count == 10 || mres.failed_count == 10) continue;
    if (!(dres.aggregate.set_extra > mres.aggregate.set_extra)) b_ok = false;
  }
  // (c) it fails outright on exactly the three highest-noise rows
  bool c_ok = true;
  for (int i = 0; i < 9; ++i) {
    const bool all_failed = dp[static_cast<std::size_t>(i)].failed_count == 10;
    if (high_rows.count(i) ? !all_failed : all_failed) c_ok = false;
  }

  const double el = seconds_since(t0);
  std::ostringstream d;
  d << "(a) low/medium-noise set_missed all zero: " << (a_ok ? "yes" : "NO") << "; (b) dp "
    << "set_extra > mdp set_extra wherever dp succeeds: " << (b_ok ? "yes" : "NO")
    << "; (c) dp fails on exactly the three highest-noise rows: " << (c_ok ? "yes" : "NO")
    << "; " << el << " s (budget 300 s)";
  return {a_ok && b_ok && c_ok && el < 300.0, d.str()};
}

// --- criterion 6: the debias map is the restricted least-squares fit -------

Check crit6() {
  const auto t0 = Clock::now();
  int ok = 0;
  double worst = 0.0;
  const Ensemble kinds[3] = {Ensemble::gaussian, Ensemble::bernoulli, Ensemble::partial_dct};
  for (int s = 0; s < 100; ++s) {
    const std::uint64_t seed = 9000 + s;
    SensingOperator op = gen_sensing_matrix(kinds[s % 3], 32, 96, seed);
    SplitMix64 rng(SplitMix64::derive(seed, 4));
    Vector y(32);
    for (int i = 0; i < 32; ++i) y[i] = rng.normal();
    const int k = 1 + static_cast<int>(rng.below(8));
    std::vector<int> a = sample_without_replacement(96, k, rng);
    std::sort(a.begin(), a.end());
    IndexList active(a.begin(), a.end());

    // Any primal supported on the set, paired with its exact dual image,
    // must debias to the restricted least-squares fit.
    Vector x = Vector::Zero(96);
    for (int idx : a) x[idx] = rng.normal();
    Vector d_vec = op.apply_adjoint(y - op.apply(x));
    Vector via_debias = debias(op, x, d_vec, active);
    Vector via_ls = oracle_ls_on_support(op, y, active);
    const double diff = (via_debias - via_ls).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, diff);
    if (diff <= 1e-10) ++ok;
  }
  const double el = seconds_since(t0);
  std::ostringstream d;
  d << ok << "/100 triples agree, worst gap = " << worst << " (tol 1e-10), " << el << " s";
  return {ok == 100, d.str()};
}

// --- criterion 7: error magnitude at the scaled-down benchmark shape -------

Check crit7() {
  const auto t0 = Clock::now();
  ExperimentSpec spec;
  spec.ensemble = Ensemble::gaussian;
  spec.n = 512;
  spec.p = 2048;
  spec.T = 32;
  spec.dyna = 1e3;
  spec.sigma = 1e-3;
  spec.seed = 777;
  spec.rule = SelectionRule::mdp;
  spec.replications = 10;
  ExperimentResult res = run_experiment(spec);
  const double el = seconds_since(t0);
  std::ostringstream d;
  d << "mean debiased relative l2 error = " << res.aggregate.l2_dre
    << " over 10 seeds (tol 1e-4), " << res.failed_count << " failures, " << el
    << " s (budget 120 s)";
  return {res.failed_count == 0 && res.aggregate.l2_dre <= 1e-4 && el < 120.0, d.str()};
}

// --- criterion 8: structural invariants at scale ----------------------------

Check crit8() {
  const auto t0 = Clock::now();
  SplitMix64 rng(31337);
  int bad_shrink = 0, bad_sets = 0, bad_adjoint = 0, bad_chol = 0, bad_cg = 0, bad_bic = 0;

  // soft-threshold nonexpansiveness (and shrinkage) on random pairs
  for (int c = 0; c < 1000; ++c) {
    const double lambda = 0.01 + 3.0 * rng.uniform01();
    const double v = 10.0 * (2.0 * rng.uniform01() - 1.0);
    const double w = 10.0 * (2.0 * rng.uniform01() - 1.0);
    if (std::abs(soft_threshold(v, lambda) - soft_threshold(w, lambda)) >
        std::abs(v - w) + 1e-15)
      ++bad_shrink;
    if (std::abs(soft_threshold(v, lambda)) > std::abs(v) + 1e-15) ++bad_shrink;
  }

  // active-set partition: strict thresholds, disjoint, exhaustive
  for (int c = 0; c < 1000; ++c) {
    const int p = 16;
    const double lambda = 0.5 + rng.uniform01();
    Vector x(p), dv(p);
    for (int i = 0; i < p; ++i) {
      x[i] = 2.0 * (2.0 * rng.uniform01() - 1.0);
      dv[i] = 2.0 * (2.0 * rng.uniform01() - 1.0);
    }
    if (c % 7 == 0) dv[0] = lambda - x[0];  // park one entry on the boundary
    ActiveSets sets = active_sets_from(x, dv, lambda);
    std::set<int> seen;
    for (int i : sets.a_plus) {
      if (!(x[i] + dv[i] > lambda)) ++bad_sets;
      seen.insert(i);
    }
    for (int i : sets.a_minus) {
      if (!(x[i] + dv[i] < -lambda)) ++bad_sets;
      seen.insert(i);
    }
    for (int i : sets.inactive) {
      if (std::abs(x[i] + dv[i]) > lambda) ++bad_sets;
      seen.insert(i);
    }
    if (static_cast<int>(seen.size()) != p) ++bad_sets;
  }

  // adjoint identity <Psi u, v> = <u, Psi^t v> across all three ensembles
  const Ensemble kinds[3] = {Ensemble::gaussian, Ensemble::bernoulli, Ensemble::partial_dct};
  for (int c = 0; c < 1000; ++c) {
    SensingOperator op = gen_sensing_matrix(kinds[c % 3], 12, 40, 50000 + c);
    Vector u(40), v(12);
    for (int i = 0; i < 40; ++i) u[i] = rng.normal();
    for (int i = 0; i < 12; ++i) v[i] = rng.normal();
    const double lhs = op.apply(u).dot(v);
    const double rhs = u.dot(op.apply_adjoint(v));
    if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs))) ++bad_adjoint;
  }

  // Cholesky update/downdate tracks a fresh factorization, 1000 edits
  {
    SensingOperator op = gen_sensing_matrix(Ensemble::gaussian, 48, 160, 60001);
    Vector rhs(48);
    for (int i = 0; i < 48; ++i) rhs[i] = rng.normal();
    const Vector pty = op.apply_adjoint(rhs);
    CholeskyFactor factor;
    std::vector<int> members;
    int edits = 0;
    while (edits < 1000) {
      const bool grow = members.size() < 2 || (members.size() < 40 && rng.coin());
      if (grow) {
        int cand = static_cast<int>(rng.below(160));
        while (std::find(members.begin(), members.end(), cand) != members.end())
          cand = static_cast<int>(rng.below(160));
        try {
          factor.add_column(cand, op);
          members.push_back(cand);
        } catch (const RankDeficientError&) {
          continue;  // dependent draw, try another column
        }
      } else {
        const std::size_t at = rng.below(members.size());
        factor.remove_column(members[at]);
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(at));
      }
      ++edits;
      if (members.size() < 2) continue;
      const IndexList& active = factor.indices();  // factor's own column order
      Vector mine = factor.solve(gather(pty, active));
      Matrix g = op.gram_restricted(active);
      Vector fresh = Eigen::LLT<Matrix>(g).solve(gather(pty, active));
      if ((mine - fresh).lpNorm<Eigen::Infinity>() > 1e-8) ++bad_chol;
    }
  }

  // CG on the restricted normal equations terminates at the direct answer
  {
    SensingOperator op = gen_sensing_matrix(Ensemble::partial_dct, 64, 256, 60002);
    const Vector pty_dummy = Vector::Zero(256);
    (void)pty_dummy;
    for (int c = 0; c < 1000; ++c) {
      const int k = 2 + static_cast<int>(rng.below(5));
      std::vector<int> a = sample_without_replacement(256, k, rng);
      std::sort(a.begin(), a.end());
      IndexList active(a.begin(), a.end());
      Vector b(k);
      for (int i = 0; i < k; ++i) b[i] = rng.normal();
      Vector via_cg = solve_restricted_cg(op, active, b, Vector::Zero(k), 2 * k + 4);
      Matrix g = op.gram_restricted(active);
      Vector direct = Eigen::LLT<Matrix>(g).solve(b);
      if ((via_cg - direct).lpNorm<Eigen::Infinity>() > 1e-8) ++bad_cg;
    }
  }

  // information-criterion score recomputed from first principles
  {
    SensingOperator op = gen_sensing_matrix(Ensemble::gaussian, 20, 50, 60003);
    const Matrix dense = op.materialize();
    for (int c = 0; c < 1000; ++c) {
      Vector y(20), x = Vector::Zero(50);
      for (int i = 0; i < 20; ++i) y[i] = rng.normal();
      const int k = static_cast<int>(rng.below(6));
      std::vector<int> a = sample_without_replacement(50, k, rng);
      for (int idx : a) x[idx] = rng.normal();
      const double expect =
          0.5 * (dense * x - y).squaredNorm() + (std::log(20.0) / 20.0) * count_nonzeros(x);
      const double got = bic_score(op, y, x);
      if (std::abs(got - expect) > 1e-12 * (1.0 + std::abs(expect))) ++bad_bic;
    }
  }

  const double el = seconds_since(t0);
  std::ostringstream d;
  d << "violations out of 1000 cases each: shrink = " << bad_shrink << ", sets = "
    << bad_sets << ", adjoint = " << bad_adjoint << ", cholesky = " << bad_chol
    << ", cg = " << bad_cg << ", bic = " << bad_bic << "; " << el << " s";
  return {bad_shrink + bad_sets + bad_adjoint + bad_chol + bad_cg + bad_bic == 0, d.str()};
}

// --- criterion 9: benchmark output is byte-stable ---------------------------

Check crit9() {
  const std::vector<std::string> args = {"bench", "--ensemble", "gaussian", "--n", "64",
                                         "--p",   "256",        "--T", "6",  "--sigma",
                                         "1e-3",  "--seed",     "4242", "--replications",
                                         "3"};
  std::ostringstream out1, err1, out2, err2;
  const int c1 = run_cli(args, out1, err1);
  const int c2 = run_cli(args, out2, err2);
  const bool same = out1.str() == out2.str();
  std::ostringstream d;
  d << "two runs, exit codes " << c1 << "/" << c2 << ", " << out1.str().size()
    << " bytes each, byte-identical: " << (same ? "yes" : "NO");
  return {c1 == 0 && c2 == 0 && same && !out1.str().empty(), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, Check (*)()>> checks = {
      {"c1", crit1}, {"c2", crit2}, {"c3", crit3},   {"c4a", crit4a}, {"c4b", crit4b},
      {"c5", crit5}, {"c6", crit6}, {"c7", crit7},   {"c8", crit8},   {"c9", crit9}};
  const std::map<std::string, std::string> labels = {
      {"c1", "criterion 1 (kkt certification)"},
      {"c2", "criterion 2 (fixed-lambda oracle equivalence)"},
      {"c3", "criterion 3 (one-step local convergence)"},
      {"c4a", "criterion 4a (support recovery at scale)"},
      {"c4b", "criterion 4b (certified tiny instances)"},
      {"c5", "criterion 5 (selection-rule pattern)"},
      {"c6", "criterion 6 (debias identity)"},
      {"c7", "criterion 7 (error magnitude)"},
      {"c8", "criterion 8 (structural invariants)"},
      {"c9", "criterion 9 (determinism)"}};

  std::string only;
  if (argc > 1) only = argv[1];
  bool ran_any = false, all_pass = true;
  for (const auto& [name, fn] : checks) {
    if (!only.empty() && only != name) continue;
    ran_any = true;
    Check res = fn();
    std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << labels.at(name) << ": " << res.detail
              << "\n";
    if (!res.pass) all_pass = false;
  }
  if (!ran_any) {
    std::cerr << "unknown check name: " << only << "\n";
    return 1;
  }
  return all_pass ? 0 : 1;
}
