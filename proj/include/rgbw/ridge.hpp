// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rgbw {

/// Dense symmetric matrix, full row-major storage.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }
  double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }

  std::vector<double> multiply(std::span<const double> x) const;
  /// Copies the upper triangle onto the lower one.
  void symmetrize_from_upper();

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// Accumulated normal equations XᵀX w = Xᵀy of one least-squares problem.
struct NormalEquations {
  SymMatrix gram;           // XᵀX
  std::vector<double> rhs;  // Xᵀy
  std::uint64_t rows = 0;

  explicit NormalEquations(int dim = 0) : gram(dim), rhs(static_cast<std::size_t>(dim), 0.0) {}
  int dim() const { return gram.size(); }
  /// gram += x xᵀ (upper triangle only until finalize()), rhs += y x.
  void add_row(std::span<const double> x, double y);
  void finalize() { gram.symmetrize_from_upper(); }
};

/// Solves A x = b for symmetric positive-definite A. nullopt when a pivot is
/// not positive.
std::optional<std::vector<double>> cholesky_solve(const SymMatrix& a, std::span<const double> b);

/// Number of pivots of a diagonally pivoted Cholesky that exceed
/// rel_tol * max diagonal.
int numerical_rank(const SymMatrix& a, double rel_tol = 1e-12);

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool stagnated = false;
};

CgResult conjugate_gradient(const SymMatrix& a, std::span<const double> b, double rel_tol,
                            int max_iterations, std::vector<double> x0 = {});

double residual_norm(const SymMatrix& a, std::span<const double> x, std::span<const double> b);
double norm2(std::span<const double> v);

enum class SolveMethod { kCholesky, kConjugateGradient };

struct RidgeSolution {
  std::vector<double> weights;
  SolveMethod method = SolveMethod::kCholesky;
  double residual = 0.0;           // ‖(XᵀX+λI)w − Xᵀy‖
  double relative_residual = 0.0;  // residual / ‖Xᵀy‖
};

inline constexpr double kRidgeResidualBound = 1e-8;
inline constexpr double kCgTolerance = 1e-10;

/// min ‖Xw − y‖² + λ‖w‖² through its normal equations.
///
/// Throws Error(kInsufficientData) when there are no more rows than unknowns
/// or XᵀX is numerically rank deficient, and Error(kNonConvergence) when
/// neither the factorization nor CG meets the residual bound.
RidgeSolution solve_ridge(const NormalEquations& eq, double lambda);

}  // namespace rgbw
