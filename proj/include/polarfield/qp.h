#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "common.h"

namespace polarfield {

namespace detail {

// Diagonal shift applied to the quadratic block of every saddle solve. The
// flap quadrature metrics are only semidefinite, so the objective can be
// flat along feasible directions; the shift keeps the factorization well
// posed and selects the minimum norm minimizer among the flat family. It
// sits far below every verification tolerance used downstream.
inline double kkt_shift(const SparseD& P) {
  double mean = P.rows() ? P.diagonal().cwiseAbs().mean() : 0.0;
  return 1e-10 * std::max(1.0, mean);
}

}  // namespace detail

// Minimizer of 1/2 x'Px + c'x subject to Ax = b, via the saddle system
//   [P A'; A 0] [x; y] = [-c; b]
// factored with sparse LU. P must be positive semidefinite; flat feasible
// directions are resolved toward `center` (the origin when null). The
// factored system carries a matching -shift block on the multipliers so
// degenerate constraint sets stay factorable; two rounds of iterative
// refinement against the unrelaxed system remove the perturbation again
// wherever the constraints are consistent.
struct EqualityQpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;
  double constraint_residual = 0.0;  // max |Ax - b|
  double kkt_residual = 0.0;         // relative residual of the saddle system
};

inline EqualityQpResult solve_equality_qp(const SparseD& P,
                                          const Eigen::VectorXd& c,
                                          const SparseD& A,
                                          const Eigen::VectorXd& b,
                                          const Eigen::VectorXd* center =
                                              nullptr) {
  const int n = int(P.rows());
  const int mrows = int(A.rows());
  const double shift = detail::kkt_shift(P);
  std::vector<Triplet> base;
  base.reserve(size_t(P.nonZeros() + 2 * A.nonZeros() + n));
  for (int k = 0; k < P.outerSize(); ++k)
    for (SparseD::InnerIterator it(P, k); it; ++it)
      base.emplace_back(int(it.row()), int(it.col()), it.value());
  for (int i = 0; i < n; ++i) base.emplace_back(i, i, shift);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseD::InnerIterator it(A, k); it; ++it) {
      base.emplace_back(n + int(it.row()), int(it.col()), it.value());
      base.emplace_back(int(it.col()), n + int(it.row()), it.value());
    }
  SparseD K(n + mrows, n + mrows);
  K.setFromTriplets(base.begin(), base.end());

  Eigen::VectorXd rhs(n + mrows);
  rhs.head(n) = -c;
  if (center) rhs.head(n) += shift * (*center);
  rhs.tail(mrows) = b;
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());

  auto residual = [&](const Eigen::VectorXd& s) {
    return Eigen::VectorXd(rhs - K * s);
  };

  // Factor the exact saddle matrix, then polish away the shift and rounding
  // with refinement steps as long as they keep paying off. When the active
  // constraint rows are dependent the exact matrix is singular; retry with a
  // small negative multiplier block, which is factorable for any A, and keep
  // refining against the exact system.
  Eigen::VectorXd sol;
  double best = std::numeric_limits<double>::infinity();
  for (int relaxed = 0; relaxed < 2 && best > 1e-8 * scale; ++relaxed) {
    SparseD Kf = K;
    if (relaxed) {
      std::vector<Triplet> t = base;
      for (int i = 0; i < mrows; ++i) t.emplace_back(n + i, n + i, -shift);
      Kf.setFromTriplets(t.begin(), t.end());
    }
    Eigen::SparseLU<SparseD> lu;
    lu.compute(Kf);
    if (lu.info() != Eigen::Success) continue;
    Eigen::VectorXd cand = lu.solve(rhs);
    if (lu.info() != Eigen::Success) continue;
    double res = residual(cand).cwiseAbs().maxCoeff();
    for (int round = 0; round < 4 && res > 1e-14 * scale; ++round) {
      Eigen::VectorXd next = cand + lu.solve(residual(cand));
      double rn = residual(next).cwiseAbs().maxCoeff();
      if (!(rn < 0.5 * res)) break;
      cand.swap(next);
      res = rn;
    }
    if (res < best) {
      best = res;
      sol.swap(cand);
    }
  }
  if (!std::isfinite(best) || sol.size() == 0)
    throw SolverError("RankDeficientConstraints: saddle system is singular");

  EqualityQpResult out;
  out.x = sol.head(n);
  out.multipliers = sol.tail(mrows);
  out.constraint_residual =
      mrows ? (A * out.x - b).cwiseAbs().maxCoeff() : 0.0;
  out.kkt_residual = best / scale;
  return out;
}

// Minimizer of 1/2 x'Px + c'x subject to Ax = b and x >= lower, found by a
// primal-dual active-set iteration: bounds violated by the unconstrained
// solve are clamped, clamped bounds with a push-away multiplier stay, the
// rest are released, until the active set repeats itself.
struct BoundQpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double constraint_residual = 0.0;
  double kkt_residual = 0.0;
  double complementarity = 0.0;
  std::vector<int> active;
};

inline BoundQpResult solve_bound_qp(const SparseD& P, const Eigen::VectorXd& c,
                                    const SparseD& A, const Eigen::VectorXd& b,
                                    double lower,
                                    const Eigen::VectorXd* center = nullptr,
                                    int iteration_cap = 500) {
  const int n = int(P.rows());
  const int meq = int(A.rows());
  std::set<int> active;
  BoundQpResult out;
  for (int it = 1; it <= iteration_cap; ++it) {
    out.iterations = it;
    std::vector<Triplet> rows;
    for (int k = 0; k < A.outerSize(); ++k)
      for (SparseD::InnerIterator a(A, k); a; ++a)
        rows.emplace_back(int(a.row()), int(a.col()), a.value());
    Eigen::VectorXd rhs(meq + int(active.size()));
    rhs.head(meq) = b;
    int r = meq;
    for (int i : active) {
      rows.emplace_back(r, i, 1.0);
      rhs[r++] = lower;
    }
    SparseD Aact(r, n);
    Aact.setFromTriplets(rows.begin(), rows.end());

    EqualityQpResult eq;
    try {
      eq = solve_equality_qp(P, c, Aact, rhs, center);
    } catch (const SolverError& err) {
      throw SolverError("Infeasible: bound-constrained solve hit a singular "
                        "active set (" +
                        std::string(err.what()) + ")");
    }

    // Multiplier of an active lower bound in the stationarity equation is
    // -mu with mu >= 0 at optimum; release bounds whose mu is nonpositive.
    std::set<int> next;
    {
      int k = meq;
      for (int i : active) {
        double mu = -eq.multipliers[k++];
        if (mu > 0.0) next.insert(i);
      }
    }
    for (int i = 0; i < n; ++i)
      if (eq.x[i] < lower - 1e-12 * std::max(1.0, std::abs(lower)))
        next.insert(i);

    if (next == active) {
      // A repeating active set whose equality system cannot actually be met
      // means the bounds contradict the constraints.
      double feas_scale = 1.0 + (rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0);
      if (eq.constraint_residual > 1e-8 * feas_scale)
        throw SolverError(
            "Infeasible: bounds contradict the equality constraints "
            "(violation " +
            std::to_string(eq.constraint_residual) + ")");
      out.x = eq.x.cwiseMax(lower);
      out.constraint_residual = eq.constraint_residual;
      out.kkt_residual = eq.kkt_residual;
      out.complementarity = 0.0;
      {
        int k = meq;
        for (int i : active) {
          double mu = -eq.multipliers[k++];
          double gap = std::abs(eq.x[i] - lower) * std::abs(mu) /
                       (1.0 + std::abs(mu));
          out.complementarity = std::max(out.complementarity, gap);
        }
      }
      out.active.assign(active.begin(), active.end());
      return out;
    }
    active.swap(next);
  }
  throw SolverError("NonConvergence: active set still changing after " +
                    std::to_string(iteration_cap) + " iterations");
}

}  // namespace polarfield
