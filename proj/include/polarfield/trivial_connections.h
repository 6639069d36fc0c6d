#pragma once

#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "bevel.h"
#include "surface_mesh.h"

namespace polarfield {

// Piecewise-constant baseline: one rotation angle per interior edge, chosen
// with minimum norm so that transport around every vertex ring and homology
// generator realizes the prescribed integer indices.
struct TrivialConnections {
  Eigen::VectorXd theta;       // per interior edge, representative direction
  Eigen::VectorXd face_angle;  // transported unit direction per face
  std::vector<int> roots;      // BFS root face per component
  double holonomy_residual = 0.0;
};

inline TrivialConnections trivial_connections(
    const SurfaceMesh& m, const BeveledMesh& b, const CycleOperators& ops,
    const std::vector<int>& vertex_index,
    const std::vector<int>& homology_index) {
  if (int(vertex_index.size()) != m.n_vertices())
    throw PrescriptionError("OutOfRangeParameter: one index per vertex "
                            "expected");
  if (int(homology_index.size()) != ops.H.rows())
    throw PrescriptionError("OutOfRangeParameter: one index per homology "
                            "generator expected");
  for (int v = 0; v < m.n_vertices(); ++v)
    if (vertex_index[v] != 0 && m.vertex_on_boundary[v])
      throw PrescriptionError("NonVertexSingularity: boundary vertex " +
                              std::to_string(v) + " cannot carry an index");

  // Component Euler characteristics decide feasibility on closed pieces.
  std::vector<int> comp_chi(m.n_components, 0), comp_sum(m.n_components, 0);
  {
    std::vector<int> vc(m.n_vertices(), -1);
    std::vector<int> ec(m.n_edges(), -1);
    for (int f = 0; f < m.n_faces(); ++f) {
      comp_chi[m.face_component[f]] += 1;  // faces
      for (int s = 0; s < 3; ++s) {
        vc[m.tail(3 * f + s)] = m.face_component[f];
        ec[m.halfedge_edge[3 * f + s]] = m.face_component[f];
      }
    }
    for (int v = 0; v < m.n_vertices(); ++v)
      if (vc[v] >= 0) {
        comp_chi[vc[v]] += 1;
        comp_sum[vc[v]] += vertex_index[v];
      }
    for (int e = 0; e < m.n_edges(); ++e)
      if (ec[e] >= 0) comp_chi[ec[e]] -= 1;
  }
  for (int c = 0; c < m.n_components; ++c)
    if (m.component_closed[c] && comp_sum[c] != comp_chi[c])
      throw PrescriptionError(
          "IndexSumMismatch: component " + std::to_string(c) + " has chi " +
          std::to_string(comp_chi[c]) + " but indices sum to " +
          std::to_string(comp_sum[c]));

  // One ring row per interior vertex, matching the jump-crossing signs of
  // the beveled vertex-face cycles; one dependent row dropped per closed
  // component.
  Eigen::VectorXd kv = gaussian_curvature(m);
  std::vector<int> last_interior(m.n_components, -1);
  for (int v : b.interior_vertices)
    last_interior[m.face_component[SurfaceMesh::face_of(
        m.vertex_out_halfedge[v])]] = v;

  std::vector<Triplet> trips;
  std::vector<double> rhs;
  for (int v : b.interior_vertices) {
    int c = m.face_component[SurfaceMesh::face_of(m.vertex_out_halfedge[v])];
    if (m.component_closed[c] && last_interior[c] == v) continue;
    int row = int(rhs.size());
    for (int o : m.vertex_star_out_halfedges(v)) {
      int q = SurfaceMesh::prev(o);
      int e = m.halfedge_edge[q];
      trips.emplace_back(row, m.interior_edge_index[e],
                         m.edge_halfedge[e] == q ? 1.0 : -1.0);
    }
    rhs.push_back(TWO_PI * vertex_index[v] - kv[v]);
  }
  {
    Eigen::SparseMatrix<double, Eigen::RowMajor> Hr = ops.H;
    for (int i = 0; i < Hr.rows(); ++i) {
      int row = int(rhs.size());
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Hr, i);
           it; ++it)
        if (b.is_jump(int(it.col())))
          trips.emplace_back(row,
                             m.interior_edge_index[b.jump_edge(int(it.col()))],
                             it.value());
      rhs.push_back(TWO_PI * homology_index[i] - ops.kappa_H[i]);
    }
  }

  TrivialConnections out;
  int n = m.n_interior_edges();
  out.theta = Eigen::VectorXd::Zero(n);
  SparseD A(int(rhs.size()), n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd r = Eigen::Map<Eigen::VectorXd>(rhs.data(), long(rhs.size()));
  if (A.rows() > 0) {
    SparseD G = (A * SparseD(A.transpose())).pruned();
    Eigen::SimplicialLDLT<SparseD> chol(G);
    if (chol.info() != Eigen::Success)
      throw SolverError("SolveFailure: ring system of the baseline is "
                        "rank deficient beyond the dropped rows");
    Eigen::VectorXd y = chol.solve(r);
    out.theta = A.transpose() * y;
    out.holonomy_residual = (A * out.theta - r).cwiseAbs().maxCoeff();
  }

  // Breadth-first transport of a unit direction across the dual graph.
  out.face_angle = Eigen::VectorXd::Zero(m.n_faces());
  out.roots.assign(m.n_components, -1);
  std::vector<char> seen(m.n_faces(), 0);
  for (int f0 = 0; f0 < m.n_faces(); ++f0) {
    if (seen[f0]) continue;
    out.roots[m.face_component[f0]] = f0;
    seen[f0] = 1;
    std::queue<int> q;
    q.push(f0);
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      for (int s = 0; s < 3; ++s) {
        int t = m.twin[3 * f + s];
        if (t < 0) continue;
        int g = SurfaceMesh::face_of(t);
        if (seen[g]) continue;
        int e = m.halfedge_edge[3 * f + s];
        double step = m.connection(e) + out.theta[m.interior_edge_index[e]];
        bool forward = SurfaceMesh::face_of(m.edge_halfedge[e]) == f;
        out.face_angle[g] =
            wrap_angle(out.face_angle[f] + (forward ? step : -step));
        seen[g] = 1;
        q.push(g);
      }
    }
  }
  return out;
}

// Beveled phase form of the baseline for energy comparisons: the dual-edge
// angle goes wholly to the two jump edges of its quad, splits carry zero.
inline Eigen::VectorXd upsample_to_bevel(const SurfaceMesh& m,
                                         const BeveledMesh& b,
                                         const Eigen::VectorXd& theta_tc) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(b.n_bev_edges);
  for (int e : m.interior_edges) {
    out[b.jump_id(e, 0)] = theta_tc[m.interior_edge_index[e]];
    out[b.jump_id(e, 1)] = theta_tc[m.interior_edge_index[e]];
  }
  return out;
}

}  // namespace polarfield
