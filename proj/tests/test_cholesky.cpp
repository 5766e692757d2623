#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>

#include "pdasc/bench.hpp"
#include "pdasc/cholesky.hpp"
#include "pdasc/restricted_solve.hpp"
#include "pdasc/rip.hpp"
#include "pdasc/rng.hpp"

using namespace pdasc;

namespace {

Matrix random_matrix(int n, int p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix a(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
  return a;
}

// fresh-factorization oracle: rebuild L from scratch on the factor's set
Matrix fresh_lower(const SensingOperator& op, const IndexList& set) {
  Matrix g = op.gram_restricted(set);
  return Eigen::LLT<Matrix>(g).matrixL();
}

}  // namespace

TEST_CASE("incremental add_column matches a fresh factorization") {
  auto op = SensingOperator::dense(random_matrix(24, 60, 1));
  SplitMix64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    IndexList set = sample_without_replacement(60, 8, rng);
    CholeskyFactor f;
    for (int j : set) f.add_column(j, op);
    Matrix ref = fresh_lower(op, f.indices());
    REQUIRE((f.matrix() - ref).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("remove_column keeps the factor exact") {
  auto op = SensingOperator::dense(random_matrix(24, 60, 3));
  SplitMix64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    IndexList set = sample_without_replacement(60, 10, rng);
    CholeskyFactor f;
    for (int j : set) f.add_column(j, op);
    // drop three columns at scattered positions
    f.remove_column(set[7]);
    f.remove_column(set[0]);
    f.remove_column(set[4]);
    Matrix ref = fresh_lower(op, f.indices());
    REQUIRE(f.size() == 7);
    REQUIRE((f.matrix() - ref).lpNorm<Eigen::Infinity>() < 1e-10);
    // solve on the updated factor matches a direct dense solve
    Matrix g = op.gram_restricted(f.indices());
    Vector rhs(7);
    for (int i = 0; i < 7; ++i) rhs[i] = rng.normal();
    Vector z = f.solve(rhs);
    REQUIRE((g * z - rhs).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("interleaved update/downdate tracks the active set") {
  auto op = SensingOperator::dense(random_matrix(16, 40, 5));
  SplitMix64 rng(6);
  CholeskyFactor f;
  IndexList current;
  for (int round = 0; round < 30; ++round) {
    IndexList target = sample_without_replacement(40, 2 + static_cast<int>(rng.below(9)), rng);
    IndexList sorted_cur = current;
    std::sort(sorted_cur.begin(), sorted_cur.end());
    IndexList add, remove;
    std::set_difference(target.begin(), target.end(), sorted_cur.begin(), sorted_cur.end(),
                        std::back_inserter(add));
    std::set_difference(sorted_cur.begin(), sorted_cur.end(), target.begin(), target.end(),
                        std::back_inserter(remove));
    chol_update_downdate(f, add, remove, op);
    current = target;
    Matrix ref = fresh_lower(op, f.indices());
    REQUIRE((f.matrix() - ref).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("adding a dependent column reports rank deficiency") {
  Matrix a = random_matrix(8, 20, 7);
  a.col(5) = 2.0 * a.col(3);  // same direction after normalization
  auto op = SensingOperator::dense(a);
  CholeskyFactor f;
  f.add_column(3, op);
  REQUIRE_THROWS_AS(f.add_column(5, op), RankDeficientError);
  // more columns than rows must also fail before indexing past n
  auto op2 = SensingOperator::dense(random_matrix(4, 12, 8));
  CholeskyFactor g;
  bool threw = false;
  SplitMix64 rng(9);
  try {
    for (int j = 0; j < 12; ++j) g.add_column(j, op2);
  } catch (const RankDeficientError& e) {
    threw = true;
    REQUIRE(e.column() >= 4);
  }
  REQUIRE(threw);
}

TEST_CASE("restricted CG solve terminates finitely on small sets") {
  auto op = gen_sensing_matrix(Ensemble::partial_dct, 24, 96, 11);
  SplitMix64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    IndexList set = sample_without_replacement(96, 5, rng);
    Matrix g = op.gram_restricted(set);
    Vector rhs(5);
    for (int i = 0; i < 5; ++i) rhs[i] = rng.normal();
    Vector exact = g.ldlt().solve(rhs);
    // |A| iterations suffice in exact arithmetic; allow a couple extra
    Vector z = solve_restricted_cg(op, set, rhs, Vector::Zero(5), 8);
    REQUIRE((z - exact).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("rip constant on orthonormal columns is zero") {
  // full DCT: square orthonormal operator
  IndexList all_rows;
  for (int i = 0; i < 8; ++i) all_rows.push_back(i);
  auto op = SensingOperator::partial_dct(8, all_rows);
  for (int k = 1; k <= 3; ++k) REQUIRE(rip_constant_bruteforce(op, k) < 1e-12);
}

TEST_CASE("rip constant matches direct eigen-enumeration") {
  auto op = gen_sensing_matrix(Ensemble::gaussian, 6, 12, 31);
  Matrix m = op.materialize();
  for (int k = 1; k <= 3; ++k) {
    double got = rip_constant_bruteforce(op, k);
    // oracle: enumerate all C(12, k) supports directly
    double want = 0.0;
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    while (true) {
      Matrix sub(6, k);
      for (int i = 0; i < k; ++i) sub.col(i) = m.col(comb[i]);
      Eigen::SelfAdjointEigenSolver<Matrix> es(sub.transpose() * sub, Eigen::EigenvaluesOnly);
      want = std::max({want, es.eigenvalues().maxCoeff() - 1.0, 1.0 - es.eigenvalues().minCoeff()});
      int i = k - 1;
      while (i >= 0 && comb[i] == 12 - k + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
    REQUIRE(got == Catch::Approx(want).margin(1e-12));
  }
  REQUIRE(rip_constant_bruteforce(op, 1) < 1e-12);  // normalized columns
}

TEST_CASE("rip budget and domain guards") {
  auto op = gen_sensing_matrix(Ensemble::gaussian, 20, 40, 33);
  REQUIRE_THROWS_AS(rip_constant_bruteforce(op, 8), UnsupportedError);  // C(40,8) too big
  REQUIRE_THROWS_AS(rip_constant_bruteforce(op, 0), UnsupportedError);
  REQUIRE_THROWS_AS(rip_constant_bruteforce(op, 21), UnsupportedError);
}

TEST_CASE("spectral norm of scaled partial DCT is p/n exactly") {
  auto op = gen_sensing_matrix(Ensemble::partial_dct, 16, 64, 35);
  REQUIRE(spectral_norm_sq(op) == Catch::Approx(64.0 / 16.0).margin(1e-8));
  auto dense = SensingOperator::dense(random_matrix(10, 30, 36));
  Matrix m = dense.materialize();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m * m.transpose(), Eigen::EigenvaluesOnly);
  REQUIRE(spectral_norm_sq(dense) == Catch::Approx(es.eigenvalues().maxCoeff()).margin(1e-10));
}
