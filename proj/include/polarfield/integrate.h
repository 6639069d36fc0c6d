#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "bevel.h"
#include "surface_mesh.h"

namespace polarfield {

// Corner values of the power field recovered from the solved phase and scale
// data: one complex number per beveled corner, expressed in the local basis
// of the corner's face.
struct IntegratedField {
  std::vector<cplx> corner;
  std::vector<int> pinned;  // one gauge corner per component
  double residual = 0.0;    // worst relative edge mismatch
};

// Solves sigma_i u_j - sigma_j e^{i phi} u_i = 0 in least squares over every
// beveled edge, where phi is the solved phase difference plus N times the
// Levi-Civita rotation on jump edges. The gauge pins one corner per
// component to its scale with zero phase.
inline IntegratedField integrate_field(const SurfaceMesh& m,
                                       const BeveledMesh& b,
                                       const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& sigma,
                                       int N) {
  using SparseC = Eigen::SparseMatrix<cplx>;
  int n = b.n_corners;
  if (theta.size() != b.n_bev_edges || sigma.size() != n)
    throw SolverError("SolveFailure: phase or scale vector size mismatch");

  std::vector<int> pin(m.n_components, -1);
  for (int f = m.n_faces() - 1; f >= 0; --f) pin[m.face_component[f]] = 3 * f;
  for (int c = 0; c < m.n_components; ++c)
    if (pin[c] < 0)
      throw SolverError("GaugeAmbiguity: component " + std::to_string(c) +
                        " has no corner to pin");

  int rows = b.n_bev_edges + m.n_components;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(2 * b.n_bev_edges + m.n_components);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows);
  for (int be = 0; be < b.n_bev_edges; ++be) {
    auto [i, j] = b.corners(be);
    double phi = theta[be];
    if (b.is_jump(be)) phi += N * m.connection(b.jump_edge(be));
    trips.emplace_back(be, j, cplx(sigma[i], 0.0));
    trips.emplace_back(be, i, -sigma[j] * std::polar(1.0, phi));
  }
  for (int c = 0; c < m.n_components; ++c) {
    trips.emplace_back(b.n_bev_edges + c, pin[c], cplx(1.0, 0.0));
    rhs[b.n_bev_edges + c] = cplx(sigma[pin[c]], 0.0);
  }
  SparseC A(rows, n);
  A.setFromTriplets(trips.begin(), trips.end());

  SparseC G = (A.adjoint() * A).pruned();
  Eigen::SimplicialLDLT<SparseC> chol(G);
  if (chol.info() != Eigen::Success)
    throw SolverError("SolveFailure: field integration system is singular");
  Eigen::VectorXcd x = chol.solve(A.adjoint() * rhs);

  IntegratedField out;
  out.pinned = pin;
  out.corner.assign(x.data(), x.data() + n);
  for (int be = 0; be < b.n_bev_edges; ++be) {
    auto [i, j] = b.corners(be);
    double phi = theta[be];
    if (b.is_jump(be)) phi += N * m.connection(b.jump_edge(be));
    double num = std::abs(sigma[i] * out.corner[j] -
                          sigma[j] * std::polar(1.0, phi) * out.corner[i]);
    double den = sigma[i] * std::abs(out.corner[j]) +
                 sigma[j] * std::abs(out.corner[i]);
    out.residual = std::max(out.residual, num / std::max(den, 1e-300));
  }
  return out;
}

// Phase differences read back from corner values: the inverse check of
// integrate_field, returning for every beveled edge the angle the field
// actually turns by (connection removed on jumps), wrapped to the branch
// nearest the reference phases.
inline Eigen::VectorXd extract_theta(const SurfaceMesh& m,
                                     const BeveledMesh& b,
                                     const std::vector<cplx>& corner,
                                     const Eigen::VectorXd& reference,
                                     int N) {
  Eigen::VectorXd out(b.n_bev_edges);
  for (int be = 0; be < b.n_bev_edges; ++be) {
    auto [i, j] = b.corners(be);
    double conn = b.is_jump(be) ? N * m.connection(b.jump_edge(be)) : 0.0;
    double raw = std::arg(corner[j] * std::conj(corner[i])) - conn;
    double k = std::round((reference[be] - raw) / TWO_PI);
    out[be] = raw + TWO_PI * k;
  }
  return out;
}

}  // namespace polarfield
