// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "rgbw/error.hpp"
#include "rgbw/ridge.hpp"

namespace rgbw {
namespace {

NormalEquations random_problem(int dim, int rows, std::uint64_t seed, Eigen::MatrixXd* x_out,
                               Eigen::VectorXd* y_out) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd x(rows, dim);
  Eigen::VectorXd y(rows);
  NormalEquations eq(dim);
  std::vector<double> row(static_cast<std::size_t>(dim));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) row[static_cast<std::size_t>(c)] = x(r, c) = dist(rng);
    y(r) = dist(rng);
    eq.add_row(row, y(r));
  }
  eq.finalize();
  if (x_out) *x_out = x;
  if (y_out) *y_out = y;
  return eq;
}

TEST(Ridge, CholeskyMatchesEigenOracle) {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  const double lambda = 0.3;
  const auto eq = random_problem(9, 200, 1, &x, &y);
  const auto sol = solve_ridge(eq, lambda);
  EXPECT_EQ(sol.method, SolveMethod::kCholesky);
  const Eigen::MatrixXd a = x.transpose() * x + lambda * Eigen::MatrixXd::Identity(9, 9);
  const Eigen::VectorXd w = a.ldlt().solve(x.transpose() * y);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(sol.weights[static_cast<std::size_t>(i)], w(i), 1e-12);
  EXPECT_LE(sol.relative_residual, kRidgeResidualBound);
}

TEST(Ridge, ConjugateGradientAgreesWithCholesky) {
  for (std::uint64_t seed = 2; seed < 8; ++seed) {
    auto eq = random_problem(25, 400, seed, nullptr, nullptr);
    SymMatrix a = eq.gram;
    for (int i = 0; i < 25; ++i) a(i, i) += 1e-3;
    const auto direct = cholesky_solve(a, eq.rhs);
    ASSERT_TRUE(direct);
    const auto cg = conjugate_gradient(a, eq.rhs, kCgTolerance, 250);
    EXPECT_TRUE(cg.converged);
    for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(cg.x[i], (*direct)[i], 1e-7);
  }
}

TEST(Ridge, CholeskyRejectsIndefinite) {
  SymMatrix a(2);
  a(0, 0) = 1;
  a(0, 1) = a(1, 0) = 2;
  a(1, 1) = 1;
  const std::vector<double> b{1, 1};
  EXPECT_FALSE(cholesky_solve(a, b));
}

TEST(Ridge, NumericalRank) {
  SymMatrix ones(4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) ones(r, c) = 3.0;
  EXPECT_EQ(numerical_rank(ones), 1);
  SymMatrix eye(4);
  for (int i = 0; i < 4; ++i) eye(i, i) = 1.0 + i;
  EXPECT_EQ(numerical_rank(eye), 4);
}

TEST(Ridge, InsufficientData) {
  auto few = random_problem(9, 9, 3, nullptr, nullptr);
  try {
    (void)solve_ridge(few, 1e-4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
  // Constant design rows: rank one.
  NormalEquations flat(9);
  const std::vector<double> row(9, 0.5);
  for (int i = 0; i < 100; ++i) flat.add_row(row, 0.5);
  flat.finalize();
  try {
    (void)solve_ridge(flat, 1e-4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
}

TEST(Ridge, ShrinksWithLambda) {
  auto eq = random_problem(9, 100, 4, nullptr, nullptr);
  const double n6 = norm2(solve_ridge(eq, 1e6).weights);
  const double n8 = norm2(solve_ridge(eq, 1e8).weights);
  EXPECT_LT(n8, n6);
  EXPECT_LT(n8, 1e-5);
}

TEST(Ridge, ConjugateGradientFlagsStagnation) {
  // Singular system with an inconsistent right-hand side never converges.
  SymMatrix a(3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  const std::vector<double> b{1.0, 1.0, 1.0};
  const auto cg = conjugate_gradient(a, b, kCgTolerance, 30);
  EXPECT_FALSE(cg.converged);
}

}  // namespace
}  // namespace rgbw
