#pragma once

#include <string>
#include <vector>

#include "bevel.h"
#include "isotropy.h"
#include "operators.h"
#include "prescription.h"
#include "qp.h"
#include "surface_mesh.h"

namespace polarfield {

// Differential phase solve: the smoothest 1-form on beveled edges whose
// cycle sums produce the prescribed winding numbers, pulled toward the
// isotropy targets around singular elements.
struct ThetaReport {
  Eigen::VectorXd theta;
  double constraint_residual = 0.0;  // full cycle system, dropped rows included
  double kkt_residual = 0.0;
  double smoothness = 0.0;           // theta' Q theta
  double fidelity = 0.0;             // weighted mismatch against the targets
  double objective = 0.0;
  std::vector<int> dropped_rows;     // one dependent face cycle per component
  std::vector<std::string> warnings;
};

namespace detail {

// Per-element isotropy moments: each block of rows of D_S is evaluated on
// its own element's targets only, so overlapping flaps stay exact.
inline Eigen::VectorXd singular_moments(const SingularOperators& sing,
                                        const IsotropyTargets& targets,
                                        int n_bev_edges) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(sing.D_S.rows());
  for (size_t gi = 0; gi < targets.groups.size(); ++gi) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n_bev_edges);
    for (auto [be, val] : targets.groups[gi].values) t[be] = val;
    Eigen::VectorXd v = sing.D_S * t;
    int lo = sing.group_rows[gi], hi = sing.group_rows[gi + 1];
    y.segment(lo, hi - lo) = v.segment(lo, hi - lo);
  }
  return y;
}

}  // namespace detail

// Right-hand side of the cycle constraints: per beveled face 2 pi I minus N
// times the concentrated curvature, with I nonzero only on singular rows.
inline Eigen::VectorXd cycle_rhs(const BeveledMesh& b,
                                 const CycleOperators& ops,
                                 const Prescription& p) {
  Eigen::VectorXd index = Eigen::VectorXd::Zero(b.n_bev_faces);
  for (const Singularity& s : p.singularities) {
    if (s.kind == Singularity::Kind::Face) index[s.element] = s.index;
    if (s.kind == Singularity::Kind::Edge) index[b.edge_face_id(s.element)] = s.index;
    if (s.kind == Singularity::Kind::Vertex)
      index[b.vertex_face_id(s.element)] = s.index;
  }
  return TWO_PI * index - double(p.N) * ops.kappa_bar;
}

inline ThetaReport solve_theta(const SurfaceMesh& m, const BeveledMesh& b,
                               const CycleOperators& ops,
                               const DiscreteOperators& disc,
                               const SingularOperators& sing,
                               const IsotropyTargets& targets,
                               const Prescription& p, double lambda_s) {
  const int n = b.n_bev_edges;
  Eigen::VectorXd rhs_d1 = cycle_rhs(b, ops, p);

  // One face cycle per component is a combination of the other cycle rows;
  // keep the system full rank by dropping the highest face id of each.
  std::vector<int> drop(m.n_components, -1);
  for (int f = 0; f < m.n_faces(); ++f) drop[m.face_component[f]] = f;
  std::vector<char> dropped(size_t(b.n_bev_faces), 0);
  ThetaReport report;
  for (int f : drop) {
    dropped[f] = 1;
    report.dropped_rows.push_back(f);
    report.warnings.push_back("dropped dependent cycle row of face " +
                              std::to_string(f));
  }

  const int ng = int(ops.H.rows()), nb = int(ops.B.rows());
  using SparseR = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  SparseR d1r = ops.d1, Hr = ops.H, Br = ops.B;
  std::vector<Triplet> trips;
  Eigen::VectorXd rhs(b.n_bev_faces - int(drop.size()) + ng + nb);
  int r = 0;
  for (int row = 0; row < b.n_bev_faces; ++row) {
    if (dropped[row]) continue;
    for (SparseR::InnerIterator it(d1r, row); it; ++it)
      trips.emplace_back(r, int(it.col()), it.value());
    rhs[r++] = rhs_d1[row];
  }
  for (int i = 0; i < ng; ++i) {
    for (SparseR::InnerIterator it(Hr, i); it; ++it)
      trips.emplace_back(r, int(it.col()), it.value());
    rhs[r++] = TWO_PI * p.homology[i] - p.N * ops.kappa_H[i];
  }
  for (int i = 0; i < nb; ++i) {
    for (SparseR::InnerIterator it(Br, i); it; ++it)
      trips.emplace_back(r, int(it.col()), it.value());
    rhs[r++] = TWO_PI * p.boundary[i] - p.N * ops.kappa_B[i];
  }
  SparseD A(r, n);
  A.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd y = detail::singular_moments(sing, targets, n);
  SparseD fit = SparseD(sing.D_S.transpose()) *
                SparseD(sing.mass.asDiagonal() * sing.D_S);
  SparseD P = 2.0 * (disc.Q + lambda_s * fit);
  Eigen::VectorXd c =
      -2.0 * lambda_s * (sing.D_S.transpose() * (sing.mass.asDiagonal() * y));

  EqualityQpResult sol = solve_equality_qp(P, c, A, rhs);
  report.theta = sol.x;
  report.kkt_residual = sol.kkt_residual;

  // Verify the full cycle system, the dropped rows included: a wrongly
  // dropped independent row would show up here.
  double resid = (ops.d1 * sol.x - rhs_d1).cwiseAbs().maxCoeff();
  Eigen::VectorXd hcyc = ops.H * sol.x, bcyc = ops.B * sol.x;
  for (int i = 0; i < ng; ++i)
    resid = std::max(resid, std::abs(hcyc[i] - (TWO_PI * p.homology[i] -
                                                p.N * ops.kappa_H[i])));
  for (int i = 0; i < nb; ++i)
    resid = std::max(resid, std::abs(bcyc[i] - (TWO_PI * p.boundary[i] -
                                                p.N * ops.kappa_B[i])));
  report.constraint_residual = resid;

  report.smoothness = sol.x.dot(disc.Q * sol.x);
  Eigen::VectorXd mismatch = sing.D_S * sol.x - y;
  report.fidelity = lambda_s * mismatch.dot(sing.mass.asDiagonal() * mismatch);
  report.objective = report.smoothness + report.fidelity;

  if (report.constraint_residual > 1e-8)
    throw SolverError("SolveFailure: cycle residual " +
                      std::to_string(report.constraint_residual) +
                      " exceeds 1e-8");
  if (report.kkt_residual > 1e-7)
    throw SolverError("SolveFailure: relative KKT residual " +
                      std::to_string(report.kkt_residual) + " exceeds 1e-7");
  return report;
}

}  // namespace polarfield
