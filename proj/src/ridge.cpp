// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgbw/error.hpp"

namespace rgbw {

std::vector<double> SymMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
  for (int r = 0; r < n_; ++r) {
    const double* row = &a_[static_cast<std::size_t>(r) * n_];
    double acc = 0.0;
    for (int c = 0; c < n_; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = acc;
  }
  return y;
}

void SymMatrix::symmetrize_from_upper() {
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < r; ++c) (*this)(r, c) = (*this)(c, r);
  }
}

void NormalEquations::add_row(std::span<const double> x, double y) {
  const int n = dim();
  for (int r = 0; r < n; ++r) {
    const double xr = x[static_cast<std::size_t>(r)];
    double* row = &gram(r, 0);
    for (int c = r; c < n; ++c) row[c] += xr * x[static_cast<std::size_t>(c)];
    rhs[static_cast<std::size_t>(r)] += xr * y;
  }
  ++rows;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double residual_norm(const SymMatrix& a, std::span<const double> x, std::span<const double> b) {
  const auto ax = a.multiply(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = ax[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::optional<std::vector<double>> cholesky_solve(const SymMatrix& a, std::span<const double> b) {
  const int n = a.size();
  SymMatrix l(n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  std::vector<double> x(b.begin(), b.end());
  for (int i = 0; i < n; ++i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= l(i, k) * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / l(i, i);
  }
  return x;
}

int numerical_rank(const SymMatrix& a, double rel_tol) {
  const int n = a.size();
  SymMatrix work = a;
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, work(i, i));
  if (!(max_diag > 0.0)) return 0;
  std::vector<int> remaining(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) remaining[static_cast<std::size_t>(i)] = i;
  int rank = 0;
  while (!remaining.empty()) {
    auto best = std::max_element(remaining.begin(), remaining.end(),
                                 [&](int p, int q) { return work(p, p) < work(q, q); });
    const int p = *best;
    const double pivot = work(p, p);
    if (!(pivot > rel_tol * max_diag)) break;
    ++rank;
    remaining.erase(best);
    // Schur complement update on the remaining block.
    for (int i : remaining) {
      for (int j : remaining) work(i, j) -= work(i, p) * work(p, j) / pivot;
    }
  }
  return rank;
}

CgResult conjugate_gradient(const SymMatrix& a, std::span<const double> b, double rel_tol,
                            int max_iterations, std::vector<double> x0) {
  const std::size_t n = b.size();
  CgResult out;
  out.x = x0.empty() ? std::vector<double>(n, 0.0) : std::move(x0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    out.converged = true;
    return out;
  }
  std::vector<double> r(n);
  const auto ax = a.multiply(out.x);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
  std::vector<double> p = r;
  double rr = 0.0;
  for (double v : r) rr += v * v;
  double best = std::sqrt(rr);
  int since_improvement = 0;
  const int patience = std::max<int>(static_cast<int>(n), 10);

  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    if (std::sqrt(rr) <= rel_tol * bnorm) break;
    const auto ap = a.multiply(p);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0)) {
      out.stagnated = true;
      break;
    }
    const double alpha = rr / pap;
    double rr_next = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rr_next += r[i] * r[i];
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];

    if (std::sqrt(rr) < 0.999 * best) {
      best = std::sqrt(rr);
      since_improvement = 0;
    } else if (++since_improvement >= patience) {
      out.stagnated = true;
      break;
    }
  }
  // Recurrence residuals drift; report the true one.
  out.relative_residual = residual_norm(a, out.x, b) / bnorm;
  out.converged = out.relative_residual <= rel_tol;
  return out;
}

RidgeSolution solve_ridge(const NormalEquations& eq, double lambda) {
  const int n = eq.dim();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "ridge coefficient must be finite and >= 0");
  }
  if (eq.rows <= static_cast<std::uint64_t>(n)) {
    throw Error(ErrorCode::kInsufficientData,
                std::to_string(eq.rows) + " samples for " + std::to_string(n) + " unknowns");
  }
  if (const int rank = numerical_rank(eq.gram); rank < n) {
    throw Error(ErrorCode::kInsufficientData, "design matrix has numerical rank " +
                                                  std::to_string(rank) + " of " +
                                                  std::to_string(n));
  }
  SymMatrix system = eq.gram;
  for (int i = 0; i < n; ++i) system(i, i) += lambda;
  const double bnorm = norm2(eq.rhs);

  RidgeSolution sol;
  if (bnorm == 0.0) {
    sol.weights.assign(static_cast<std::size_t>(n), 0.0);
    return sol;
  }
  const double bound = kRidgeResidualBound * bnorm;

  if (auto direct = cholesky_solve(system, eq.rhs)) {
    sol.weights = std::move(*direct);
    sol.method = SolveMethod::kCholesky;
    sol.residual = residual_norm(system, sol.weights, eq.rhs);
    // Iterative refinement.
    for (int sweep = 0; sweep < 3 && sol.residual > 1e-3 * bound; ++sweep) {
      auto r = system.multiply(sol.weights);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = eq.rhs[i] - r[i];
      const auto delta = cholesky_solve(system, r);
      if (!delta) break;
      auto refined = sol.weights;
      for (std::size_t i = 0; i < refined.size(); ++i) refined[i] += (*delta)[i];
      const double res = residual_norm(system, refined, eq.rhs);
      if (res >= sol.residual) break;
      sol.weights = std::move(refined);
      sol.residual = res;
    }
  }
  if (sol.weights.empty() || sol.residual > bound) {
    auto cg = conjugate_gradient(system, eq.rhs, kCgTolerance, 10 * n, sol.weights);
    const double res = cg.relative_residual * bnorm;
    if (sol.weights.empty() || res < sol.residual) {
      sol.weights = std::move(cg.x);
      sol.residual = res;
      sol.method = SolveMethod::kConjugateGradient;
    }
  }
  sol.relative_residual = sol.residual / bnorm;
  if (!(sol.residual <= bound)) {
    std::ostringstream msg;
    msg << "ridge solve did not converge: relative residual " << sol.relative_residual;
    throw Error(ErrorCode::kNonConvergence, msg.str());
  }
  return sol;
}

}  // namespace rgbw
