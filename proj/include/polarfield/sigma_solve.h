#pragma once

#include <string>
#include <vector>

#include "bevel.h"
#include "operators.h"
#include "qp.h"
#include "scale.h"
#include "surface_mesh.h"

namespace polarfield {

// Corner scale solve: the smoothest positive scale field satisfying the
// proportionality constraints. One corner per connected component is pinned
// to 1 so the bound sigma >= eps does not collapse everything onto eps.
struct SigmaReport {
  Eigen::VectorXd sigma;
  int iterations = 0;
  double constraint_residual = 0.0;
  double kkt_residual = 0.0;
  double complementarity = 0.0;
  double objective = 0.0;
  std::vector<int> pinned_corners;
  std::vector<int> active_bounds;
};

inline SigmaReport solve_sigma(const SurfaceMesh& m, const BeveledMesh& b,
                               const DiscreteOperators& disc,
                               const ScaleConstraints& constraints,
                               double eps) {
  const int n = b.n_corners;
  std::vector<int> pin(m.n_components, -1);
  for (int f = m.n_faces() - 1; f >= 0; --f) pin[m.face_component[f]] = 3 * f;

  std::vector<Triplet> trips;
  for (int k = 0; k < constraints.C.outerSize(); ++k)
    for (SparseD::InnerIterator it(constraints.C, k); it; ++it)
      trips.emplace_back(int(it.row()), int(it.col()), it.value());
  int rows = int(constraints.C.rows());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + int(pin.size()));
  for (int c : pin) {
    trips.emplace_back(rows, c, 1.0);
    rhs[rows++] = 1.0;
  }
  SparseD A(rows, n);
  A.setFromTriplets(trips.begin(), trips.end());

  // The smoothness metric can be flat along some corner patterns; resolve
  // those toward unit scale rather than toward zero.
  SparseD P = 2.0 * disc.L;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  BoundQpResult sol = solve_bound_qp(P, zero, A, rhs, eps, &ones);

  SigmaReport out;
  out.sigma = sol.x;
  out.iterations = sol.iterations;
  out.kkt_residual = sol.kkt_residual;
  out.complementarity = sol.complementarity;
  out.pinned_corners = pin;
  out.active_bounds = sol.active;
  out.objective = sol.x.dot(disc.L * sol.x);
  out.constraint_residual =
      constraints.C.rows()
          ? (constraints.C * sol.x).cwiseAbs().maxCoeff()
          : 0.0;
  if (out.constraint_residual > 1e-8)
    throw SolverError("Infeasible: scale constraints violated by " +
                      std::to_string(out.constraint_residual));
  if (out.kkt_residual > 1e-7)
    throw SolverError("SolveFailure: relative KKT residual " +
                      std::to_string(out.kkt_residual) + " exceeds 1e-7");
  return out;
}

}  // namespace polarfield
