#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "bevel.h"
#include "operators.h"
#include "prescription.h"
#include "surface_mesh.h"

namespace polarfield {

// Phase targets a perfectly isotropic field would induce on the beveled
// edges around each singular element. Values are branch-fixed real numbers
// (not wrapped): a high index legitimately produces targets beyond pi.

namespace detail {

// Interior angle at s subtended by the segment a -> b, positive for a
// counterclockwise triangle with s inside the subtending wedge.
inline double subtended_angle(cplx a, cplx b, cplx s) {
  return std::arg((b - s) * std::conj(a - s));
}

}  // namespace detail

// Winding targets of face f around the interior point with barycentric
// coordinates bary: one value per split halfedge of f, each I times the
// positive angle its edge subtends at the point. The three sum to 2 pi I.
inline std::array<double, 3> face_targets(const SurfaceMesh& m, int f,
                                          const std::array<double, 3>& bary,
                                          int index) {
  for (double b : bary)
    if (b < detail::kPlacementSnap)
      throw PrescriptionError(
          "DegeneratePlacement: face point lies on an edge of face " +
          std::to_string(f));
  std::array<cplx, 3> z;
  for (int c = 0; c < 3; ++c)
    z[c] = m.to_basis(f, Vec3(m.V.row(m.F(f, c)) - m.V.row(m.F(f, 0))));
  cplx s = bary[0] * z[0] + bary[1] * z[1] + bary[2] * z[2];
  std::array<double, 3> out;
  for (int c = 0; c < 3; ++c)
    out[c] = index * detail::subtended_angle(z[c], z[(c + 1) % 3], s);
  return out;
}

// One target per beveled edge of the flap of interior edge e, for a
// singularity at parameter t along the representative halfedge. The split
// values across e resolve the pi I jump branch, the four outer splits carry
// winding targets around the point, and the two jumps are zero.
inline std::vector<std::pair<int, double>> edge_targets(const SurfaceMesh& m,
                                                        const BeveledMesh& b,
                                                        int e, double t,
                                                        int index) {
  if (!m.edge_is_interior(e))
    throw PrescriptionError("BoundaryEdge: no isotropy targets on boundary "
                            "edge " +
                            std::to_string(e));
  FlapGeometry fl = flatten_flap(m, e);
  cplx s = (1.0 - t) * cplx(fl.pk.x(), fl.pk.y()) + t * cplx(fl.pi.x(), fl.pi.y());
  std::vector<std::pair<int, double>> out;
  for (int face : {fl.f, fl.g}) {
    for (int sl = 0; sl < 3; ++sl) {
      int h = 3 * face + sl;
      if (h == fl.h0 || h == fl.h1) {
        out.push_back({b.split_id(h), -PI * index});
        continue;
      }
      Vec2 pa = detail::flap_position(m, fl, h);
      Vec2 pb = detail::flap_position(m, fl, SurfaceMesh::next(h));
      out.push_back({b.split_id(h),
                     index * detail::subtended_angle(cplx(pa.x(), pa.y()),
                                                     cplx(pb.x(), pb.y()), s)});
    }
  }
  out.push_back({b.jump_id(e, 0), 0.0});
  out.push_back({b.jump_id(e, 1), 0.0});
  return out;
}

// Targets on the whole star of an interior vertex: winding values on the
// ring splits, half shares on the outgoing splits so every star face cycles
// to zero, zero outer jumps, and corner jumps dividing the total rotation
// 2 pi I - N kappa_v proportionally to the flap angles. Every spoke
// edge-face cycle closes exactly under this assignment.
inline std::vector<std::pair<int, double>> vertex_targets(const SurfaceMesh& m,
                                                          const BeveledMesh& b,
                                                          int v, int index,
                                                          int N) {
  if (m.vertex_on_boundary[v])
    throw PrescriptionError("BoundaryVertex: no isotropy targets on boundary "
                            "vertex " +
                            std::to_string(v));
  std::vector<int> star = m.vertex_star_out_halfedges(v);
  int k = int(star.size());
  std::vector<double> alpha(k);
  double angle_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    int o = star[i];
    alpha[i] = m.corner_angle(SurfaceMesh::face_of(o), SurfaceMesh::slot_of(o));
    angle_sum += alpha[i];
  }
  double kappa = TWO_PI - angle_sum;
  double rotation = TWO_PI * index - N * kappa;
  double scale = rotation / angle_sum;  // angle_sum = 2 pi - kappa

  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < k; ++i) {
    int o = star[i];
    double w = alpha[i] * scale;
    out.push_back({b.split_id(SurfaceMesh::next(o)), w});
    out.push_back({b.split_id(o), -0.5 * w});
    out.push_back({b.split_id(SurfaceMesh::prev(o)), -0.5 * w});

    // The spoke crossed when walking counterclockwise out of face(o) is the
    // edge of prev(o); its jump at v gets the flap-angle share, oriented
    // like the counterclockwise vertex-face cycle, and its outer jump zero.
    int q = SurfaceMesh::prev(o);
    int e = m.halfedge_edge[q];
    double share = 0.5 * (alpha[i] + alpha[(i + 1) % k]) * scale;
    if (m.edge_halfedge[e] == q) {
      out.push_back({b.jump_id(e, 1), share});
      out.push_back({b.jump_id(e, 0), 0.0});
    } else {
      out.push_back({b.jump_id(e, 0), -share});
      out.push_back({b.jump_id(e, 1), 0.0});
    }
  }
  return out;
}

// Targets of one singular element, keyed by beveled edge id.
struct ElementTargets {
  Singularity::Kind kind = Singularity::Kind::Vertex;
  int element = -1;
  std::vector<std::pair<int, double>> values;
};

// All isotropy targets of a prescription, grouped per element in the order
// the singular operators stack their rows: vertices, then edges, then faces.
struct IsotropyTargets {
  std::vector<ElementTargets> groups;
  std::vector<int> singular_vertices;
  std::vector<int> singular_edges;
  std::vector<int> singular_faces;
};

inline IsotropyTargets assemble_targets(const Prescription& p,
                                        const SurfaceMesh& m,
                                        const BeveledMesh& b) {
  IsotropyTargets out;
  auto add = [&](const Singularity& s, std::vector<std::pair<int, double>> v) {
    out.groups.push_back({s.kind, s.element, std::move(v)});
  };
  for (const Singularity& s : p.singularities)
    if (s.kind == Singularity::Kind::Vertex) {
      out.singular_vertices.push_back(s.element);
      add(s, vertex_targets(m, b, s.element, s.index, p.N));
    }
  for (const Singularity& s : p.singularities)
    if (s.kind == Singularity::Kind::Edge) {
      out.singular_edges.push_back(s.element);
      add(s, edge_targets(m, b, s.element, s.t, s.index));
    }
  for (const Singularity& s : p.singularities)
    if (s.kind == Singularity::Kind::Face) {
      out.singular_faces.push_back(s.element);
      std::array<double, 3> tf = face_targets(m, s.element, s.bary, s.index);
      std::vector<std::pair<int, double>> v;
      for (int c = 0; c < 3; ++c)
        v.push_back({b.split_id(3 * s.element + c), tf[c]});
      add(s, v);
    }
  return out;
}

}  // namespace polarfield
