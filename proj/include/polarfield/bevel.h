#pragma once

// Beveled mesh combinatorics and the discrete cycle operators living on it.
//
// Bevelling replaces each vertex by one corner per incident face, each
// interior edge by a thin quad (edge-face) and each interior vertex by a
// small polygon (vertex-face). Corners are indexed by halfedge id (the
// corner sits at the halfedge tail), split edges by halfedge id, jump edges
// by interior edge and endpoint. The stored jump direction goes from the
// face of the representative halfedge to the face of its twin.

#include <vector>

#include "surface_mesh.h"
#include "topology.h"

namespace polarfield {

struct BeveledMesh {
  const SurfaceMesh* mesh = nullptr;
  int n_corners = 0;
  int n_split = 0;
  int n_jump = 0;
  int n_bev_edges = 0;
  int n_bev_faces = 0;                // originals, then edge-faces, then vertex-faces
  std::vector<int> vertex_face_of;    // per vertex, -1 on boundary vertices
  std::vector<int> interior_vertices; // ordered by vertex id

  int split_id(int h) const { return h; }
  // end 0 sits at the tail of the representative halfedge, end 1 at its head
  int jump_id(int e, int end) const {
    return n_split + 2 * mesh->interior_edge_index[e] + end;
  }
  bool is_jump(int be) const { return be >= n_split; }
  int jump_edge(int be) const { return mesh->interior_edges[(be - n_split) / 2]; }
  int jump_end(int be) const { return (be - n_split) % 2; }

  int edge_face_id(int e) const {
    return mesh->n_faces() + mesh->interior_edge_index[e];
  }
  int vertex_face_id(int v) const { return vertex_face_of[v]; }

  // corner endpoints of a beveled edge, in its stored direction
  std::pair<int, int> corners(int be) const {
    const SurfaceMesh& m = *mesh;
    if (be < n_split) return {be, SurfaceMesh::next(be)};
    int e = jump_edge(be);
    int h0 = m.edge_halfedge[e], h1 = m.twin[h0];
    if (jump_end(be) == 0) return {h0, SurfaceMesh::next(h1)};
    return {SurfaceMesh::next(h0), h1};
  }

  int corner_vertex(int c) const { return mesh->tail(c); }
  static int corner_face(int c) { return SurfaceMesh::face_of(c); }
};

inline BeveledMesh build_bevel(const SurfaceMesh& m) {
  BeveledMesh b;
  b.mesh = &m;
  b.n_corners = m.n_halfedges();
  b.n_split = m.n_halfedges();
  b.n_jump = 2 * static_cast<int>(m.interior_edges.size());
  b.n_bev_edges = b.n_split + b.n_jump;
  b.vertex_face_of.assign(m.n_vertices(), -1);
  int base = m.n_faces() + static_cast<int>(m.interior_edges.size());
  for (int v = 0; v < m.n_vertices(); ++v) {
    if (m.vertex_on_boundary[v]) continue;
    b.vertex_face_of[v] = base + static_cast<int>(b.interior_vertices.size());
    b.interior_vertices.push_back(v);
  }
  b.n_bev_faces = base + static_cast<int>(b.interior_vertices.size());
  return b;
}

// Discrete operators on the beveled mesh. Curvature vectors are geometric
// (independent of the field degree); the solver scales them as needed.
struct CycleOperators {
  SparseD d0;  // n_bev_edges x n_corners, difference head - tail
  SparseD d1;  // n_bev_faces x n_bev_edges, counterclockwise face cycles
  Eigen::VectorXd kappa_bar;  // per d1 row: vertex defect on vertex-face rows
  SparseD H;                  // one row per homology generator
  Eigen::VectorXd kappa_H;
  SparseD B;  // one row per boundary loop, surface on the left
  Eigen::VectorXd kappa_B;
  HomologyGenerators generators;
};

namespace detail {

// Crosses the star of v from the face of h_in (head(h_in) == v) to the face
// of h_out (tail(h_out) == v), preferring the clockwise fan, which is the
// left side of a path arriving along h_in and leaving along h_out. Falls
// back to the counterclockwise fan when the boundary blocks the way.
// Appends jump coefficients to `row` and the turning angle to `kappa`.
inline void lift_across_vertex(const SurfaceMesh& m, const BeveledMesh& b, int h_in,
                               int h_out, std::vector<Triplet>& row, int r,
                               double& kappa) {
  auto ang = [&](int h) { return m.corner_angle(h / 3, h % 3); };
  int start = SurfaceMesh::next(h_in);
  // probe whether the clockwise fan reaches h_out
  bool cw_ok = true;
  {
    int o = start, guard = 0;
    while (o != h_out) {
      if (m.twin[o] < 0 || ++guard > m.n_halfedges()) {
        cw_ok = false;
        break;
      }
      o = m.cw_out(o);
    }
  }
  if (cw_ok) {
    int o = start;
    double sum = ang(o);
    while (o != h_out) {
      int e = m.halfedge_edge[o];
      if (m.edge_halfedge[e] == o)
        row.emplace_back(r, b.jump_id(e, 0), 1.0);
      else
        row.emplace_back(r, b.jump_id(e, 1), -1.0);
      o = m.cw_out(o);
      sum += ang(o);
    }
    kappa += PI - sum;
  } else {
    int o = start, guard = 0;
    double sum = ang(o);
    while (o != h_out) {
      int q = SurfaceMesh::prev(o);
      if (m.twin[q] < 0 || ++guard > m.n_halfedges())
        throw MeshError("InternalError: vertex fan blocked on both sides");
      int e = m.halfedge_edge[q];
      if (m.edge_halfedge[e] == q)
        row.emplace_back(r, b.jump_id(e, 1), 1.0);
      else
        row.emplace_back(r, b.jump_id(e, 0), -1.0);
      o = m.ccw_out(o);
      sum += ang(o);
    }
    kappa += sum - PI;
  }
}

// One row per halfedge loop: +1 on each split edge plus the fan crossings.
inline void lift_loop(const SurfaceMesh& m, const BeveledMesh& b,
                      const std::vector<int>& loop_h, std::vector<Triplet>& trips,
                      int r, double& kappa) {
  const size_t n = loop_h.size();
  for (size_t a = 0; a < n; ++a) {
    int h = loop_h[a];
    int h_next = loop_h[(a + 1) % n];
    trips.emplace_back(r, b.split_id(h), 1.0);
    lift_across_vertex(m, b, h, h_next, trips, r, kappa);
  }
}

}  // namespace detail

inline CycleOperators build_cycle_operators(const SurfaceMesh& m, const BeveledMesh& b) {
  CycleOperators ops;
  const int nf = m.n_faces();

  // d0
  {
    std::vector<Triplet> t;
    t.reserve(2 * b.n_bev_edges);
    for (int be = 0; be < b.n_bev_edges; ++be) {
      auto [ct, ch] = b.corners(be);
      t.emplace_back(be, ct, -1.0);
      t.emplace_back(be, ch, 1.0);
    }
    ops.d0.resize(b.n_bev_edges, b.n_corners);
    ops.d0.setFromTriplets(t.begin(), t.end());
  }

  // d1 and the per-row curvature
  {
    std::vector<Triplet> t;
    ops.kappa_bar = Eigen::VectorXd::Zero(b.n_bev_faces);
    for (int f = 0; f < nf; ++f)
      for (int s = 0; s < 3; ++s) t.emplace_back(f, b.split_id(3 * f + s), 1.0);
    for (int e : m.interior_edges) {
      int r = b.edge_face_id(e);
      int h0 = m.edge_halfedge[e], h1 = m.twin[h0];
      t.emplace_back(r, b.split_id(h0), -1.0);
      t.emplace_back(r, b.split_id(h1), -1.0);
      t.emplace_back(r, b.jump_id(e, 0), 1.0);
      t.emplace_back(r, b.jump_id(e, 1), -1.0);
    }
    Eigen::VectorXd kv = gaussian_curvature(m);
    for (int v : b.interior_vertices) {
      int r = b.vertex_face_of[v];
      ops.kappa_bar[r] = kv[v];
      for (int o : m.vertex_star_out_halfedges(v)) {
        int q = SurfaceMesh::prev(o);
        int e = m.halfedge_edge[q];
        if (m.edge_halfedge[e] == q)
          t.emplace_back(r, b.jump_id(e, 1), 1.0);
        else
          t.emplace_back(r, b.jump_id(e, 0), -1.0);
      }
    }
    ops.d1.resize(b.n_bev_faces, b.n_bev_edges);
    ops.d1.setFromTriplets(t.begin(), t.end());
  }

  // homology generator rows. Unlike face and boundary cycles, which close by
  // Gauss-Bonnet against the turning of the path, a generator is a genuinely
  // independent cycle: fields transported around it only come back single
  // valued when its curvature entry is the connection holonomy itself, so we
  // read kappa_H off the crossed jump edges instead of the fan turning.
  ops.generators = homology_generators(m);
  {
    const int ng = static_cast<int>(ops.generators.loops.size());
    std::vector<Triplet> t;
    ops.kappa_H = Eigen::VectorXd::Zero(ng);
    for (int i = 0; i < ng; ++i) {
      std::vector<Triplet> row;
      double turning = 0.0;
      detail::lift_loop(m, b, ops.generators.loop_halfedges[i], row, i, turning);
      double holonomy = 0.0;
      for (const Triplet& tr : row) {
        if (b.is_jump(tr.col()))
          holonomy += tr.value() * m.connection(b.jump_edge(tr.col()));
        t.push_back(tr);
      }
      ops.kappa_H[i] = holonomy;
    }
    ops.H.resize(ng, b.n_bev_edges);
    ops.H.setFromTriplets(t.begin(), t.end());
  }

  // boundary loop rows. The lift walks the loop with the surface on its
  // left, which makes it the sum of all other cycles of the component; the
  // constraint rows are negated so that B theta = 2 pi I_B - N kappa_B closes
  // the index theorem (sum of all indices = N chi), while kappa_B keeps the
  // forward turning (+2 pi on a flat disk rim).
  {
    const int nb = static_cast<int>(m.boundary_loops.size());
    std::vector<Triplet> t;
    ops.kappa_B = Eigen::VectorXd::Zero(nb);
    for (int i = 0; i < nb; ++i)
      detail::lift_loop(m, b, m.boundary_loops[i], t, i, ops.kappa_B[i]);
    for (Triplet& tr : t) tr = Triplet(tr.row(), tr.col(), -tr.value());
    ops.B.resize(nb, b.n_bev_edges);
    ops.B.setFromTriplets(t.begin(), t.end());
  }

  return ops;
}

}  // namespace polarfield
