#pragma once

#include <utility>
#include <vector>

#include "bevel.h"
#include "surface_mesh.h"

namespace polarfield {

// Finite-volume gradient operators on the beveled mesh. Each interior edge
// owns a flap cell (its two incident triangles unfolded into a common plane)
// and two matrix rows that integrate the gradient of a corner-based scalar
// over the cell, including the penalized jump terms across the edge.

namespace detail {

// Flap-pose position of the tail vertex of halfedge h, which must belong to
// one of the two flap faces.
inline Vec2 flap_position(const SurfaceMesh& m, const FlapGeometry& fl, int h) {
  int v = m.tail(h);
  if (v == fl.vk) return fl.pk;
  if (v == fl.vi) return fl.pi;
  if (v == fl.vj) return fl.pj;
  return fl.pl;
}

inline Vec2 perp(const Vec2& d) { return Vec2(-d.y(), d.x()); }

// Gradient-row coefficient of a split halfedge inside a triangle: the face
// integral of the Whitney interpolant assigns (perp(prev) - perp(next)) / 6
// to each halfedge value, with edge vectors taken in the cell's 2D pose.
inline Vec2 split_coefficient(Vec2 e_prev, Vec2 e_next) {
  return (perp(e_prev) - perp(e_next)) / 6.0;
}

}  // namespace detail

// The two rows (x then y in the flap pose) integrating the gradient over the
// flap of interior edge e, as column/value pairs over beveled edges.
struct FlapRows {
  int edge = -1;
  double area = 0.0;  // A(f) + A(g)
  std::vector<std::pair<int, Vec2>> entries;
};

inline FlapRows flap_gradient_rows(const SurfaceMesh& m, const BeveledMesh& b,
                                   int e, double lambda_j) {
  FlapGeometry fl = flatten_flap(m, e);
  FlapRows rows;
  rows.edge = e;
  rows.area = m.face_area[fl.f] + m.face_area[fl.g];
  for (int face : {fl.f, fl.g}) {
    for (int s = 0; s < 3; ++s) {
      int h = 3 * face + s;
      // tail(h) is the head of prev(h) and head(next(h)) is the tail of
      // prev(h), so both cycle neighbors reduce to tail-position differences.
      Vec2 e_prev = detail::flap_position(m, fl, h) -
                    detail::flap_position(m, fl, SurfaceMesh::prev(h));
      Vec2 e_next = detail::flap_position(m, fl, SurfaceMesh::prev(h)) -
                    detail::flap_position(m, fl, SurfaceMesh::next(h));
      rows.entries.push_back(
          {b.split_id(h), detail::split_coefficient(e_prev, e_next)});
    }
  }
  // Jump rows live on the edge axis. Stored jumps run f -> g while the cell
  // boundary crosses them g -> f, hence the sign flip on lambda_j / 2.
  Vec2 axis_perp = detail::perp(fl.pi - fl.pk);
  rows.entries.push_back({b.jump_id(e, 0), -0.5 * lambda_j * axis_perp});
  rows.entries.push_back({b.jump_id(e, 1), -0.5 * lambda_j * axis_perp});
  return rows;
}

// The two rows integrating the gradient over a single original face, in the
// face's own basis. Used for the isotropy term of singular faces.
struct FaceRows {
  int face = -1;
  double area = 0.0;
  std::vector<std::pair<int, Vec2>> entries;
};

inline FaceRows face_gradient_rows(const SurfaceMesh& m, const BeveledMesh& b,
                                   int f) {
  FaceRows rows;
  rows.face = f;
  rows.area = m.face_area[f];
  for (int s = 0; s < 3; ++s) {
    int h = 3 * f + s;
    cplx ep = m.to_basis(f, m.halfedge_vector(SurfaceMesh::prev(h)));
    cplx en = m.to_basis(f, m.halfedge_vector(SurfaceMesh::next(h)));
    rows.entries.push_back({b.split_id(h),
                            detail::split_coefficient(Vec2(ep.real(), ep.imag()),
                                                      Vec2(en.real(), en.imag()))});
  }
  return rows;
}

// Assembled smoothness operators: D stacks the flap rows of every interior
// edge, mass carries the inverse flap areas, Q = D^T diag(mass) D is the
// phase smoothness metric and L = d0^T Q d0 the corner Dirichlet metric.
struct DiscreteOperators {
  SparseD D;             // 2 * n_interior_edges x n_bev_edges
  Eigen::VectorXd mass;  // inverse flap areas, duplicated per row pair
  SparseD Q;             // n_bev_edges x n_bev_edges
  SparseD L;             // n_corners x n_corners
};

inline DiscreteOperators build_discrete_operators(const SurfaceMesh& m,
                                                  const BeveledMesh& b,
                                                  const CycleOperators& ops,
                                                  double lambda_j) {
  DiscreteOperators out;
  int ne = m.n_interior_edges();
  out.D.resize(2 * ne, b.n_bev_edges);
  out.mass.resize(2 * ne);
  std::vector<Triplet> trip;
  trip.reserve(16 * ne);
  for (int r = 0; r < ne; ++r) {
    FlapRows rows = flap_gradient_rows(m, b, m.interior_edges[r], lambda_j);
    for (const auto& [col, coeff] : rows.entries) {
      trip.emplace_back(2 * r, col, coeff.x());
      trip.emplace_back(2 * r + 1, col, coeff.y());
    }
    out.mass[2 * r] = out.mass[2 * r + 1] = 1.0 / rows.area;
  }
  out.D.setFromTriplets(trip.begin(), trip.end());
  SparseD MD = out.mass.asDiagonal() * out.D;
  out.Q = SparseD(out.D.transpose()) * MD;
  SparseD Qd0 = out.Q * ops.d0;
  out.L = SparseD(ops.d0.transpose()) * Qd0;
  return out;
}

// Isotropy operators for the singular elements of a prescription: flap rows
// for every edge incident to a singular vertex, flap rows for every singular
// edge, and single-face gradient rows for every singular face, with inverse
// cell areas as the mass.
struct SingularOperators {
  SparseD D_S;
  Eigen::VectorXd mass;
  // first row of each element's block, vertices then edges then faces, with
  // one trailing entry holding the total row count
  std::vector<int> group_rows;
};

inline SingularOperators build_singular_operators(
    const SurfaceMesh& m, const BeveledMesh& b, double lambda_j,
    const std::vector<int>& singular_vertices,
    const std::vector<int>& singular_edges,
    const std::vector<int>& singular_faces) {
  std::vector<Triplet> trip;
  std::vector<double> mass;
  std::vector<int> group_rows;
  auto push_flap = [&](int e) {
    FlapRows rows = flap_gradient_rows(m, b, e, lambda_j);
    int r = int(mass.size());
    for (const auto& [col, coeff] : rows.entries) {
      trip.emplace_back(r, col, coeff.x());
      trip.emplace_back(r + 1, col, coeff.y());
    }
    mass.push_back(1.0 / rows.area);
    mass.push_back(1.0 / rows.area);
  };
  for (int v : singular_vertices) {
    group_rows.push_back(int(mass.size()));
    for (int o : m.vertex_star_out_halfedges(v)) push_flap(m.halfedge_edge[o]);
  }
  for (int e : singular_edges) {
    group_rows.push_back(int(mass.size()));
    push_flap(e);
  }
  for (int f : singular_faces) {
    group_rows.push_back(int(mass.size()));
    FaceRows rows = face_gradient_rows(m, b, f);
    int r = int(mass.size());
    for (const auto& [col, coeff] : rows.entries) {
      trip.emplace_back(r, col, coeff.x());
      trip.emplace_back(r + 1, col, coeff.y());
    }
    mass.push_back(1.0 / rows.area);
    mass.push_back(1.0 / rows.area);
  }
  group_rows.push_back(int(mass.size()));
  SingularOperators out;
  out.D_S.resize(int(mass.size()), b.n_bev_edges);
  out.D_S.setFromTriplets(trip.begin(), trip.end());
  out.mass = Eigen::Map<Eigen::VectorXd>(mass.data(), long(mass.size()));
  out.group_rows = std::move(group_rows);
  return out;
}

// Dual edge weights and the face-based Laplacian used to diffuse the
// per-face exponent across the original mesh.
inline Eigen::VectorXd index_mass(const SurfaceMesh& m) {
  Eigen::VectorXd w(m.n_interior_edges());
  for (int r = 0; r < m.n_interior_edges(); ++r) {
    int h = m.edge_halfedge[m.interior_edges[r]];
    double l = m.halfedge_len(SurfaceMesh::face_of(h), SurfaceMesh::slot_of(h));
    double area = m.face_area[SurfaceMesh::face_of(h)] +
                  m.face_area[SurfaceMesh::face_of(m.twin[h])];
    w[r] = 3.0 * l * l / area;
  }
  return w;
}

inline SparseD build_index_laplacian(const SurfaceMesh& m) {
  Eigen::VectorXd w = index_mass(m);
  std::vector<Triplet> trip;
  for (int r = 0; r < m.n_interior_edges(); ++r) {
    int h = m.edge_halfedge[m.interior_edges[r]];
    int f = SurfaceMesh::face_of(h), g = SurfaceMesh::face_of(m.twin[h]);
    trip.emplace_back(f, f, w[r]);
    trip.emplace_back(g, g, w[r]);
    trip.emplace_back(f, g, -w[r]);
    trip.emplace_back(g, f, -w[r]);
  }
  SparseD L2(m.n_faces(), m.n_faces());
  L2.setFromTriplets(trip.begin(), trip.end());
  return L2;
}

}  // namespace polarfield
