#pragma once

// Halfedge triangle mesh with the intrinsic quantities used throughout:
// corner angles, face areas, per-face orthonormal bases, the discrete
// Levi-Civita connection across edges, and flap flattening.
//
// Halfedge h = 3f+s runs from F(f,s) to F(f,(s+1)%3); every face is CCW.

#include <algorithm>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "common.h"

namespace polarfield {

struct SurfaceMesh {
  Eigen::MatrixXd V;  // positions, |V| x 3
  Eigen::MatrixXi F;  // triangles, |F| x 3, CCW

  std::vector<int> twin;           // per halfedge; -1 on boundary
  std::vector<int> halfedge_edge;  // halfedge -> edge id
  std::vector<int> edge_halfedge;  // edge -> representative halfedge (the lower index)
  std::vector<int> interior_edge_index;  // edge -> compact interior index, -1 if boundary
  std::vector<int> interior_edges;       // compact list of interior edge ids

  std::vector<bool> vertex_on_boundary;
  std::vector<int> vertex_out_halfedge;  // boundary verts: the outgoing boundary halfedge

  Eigen::VectorXd face_area;
  Eigen::MatrixXd corner_angle;  // |F| x 3, angle at corner slot s
  Eigen::MatrixXd halfedge_len;  // |F| x 3, length of halfedge 3f+s

  Eigen::MatrixXd basis_x, basis_y, face_normal;  // |F| x 3 rows

  // Rotation taking coordinates in face(h0)'s basis to coordinates in
  // face(twin(h0))'s basis for the same tangent vector; per edge, 0 on boundary.
  Eigen::VectorXd connection;

  std::vector<std::vector<int>> boundary_loops;  // cyclic halfedge lists, surface on left

  std::vector<int> face_component;
  int n_components = 0;
  std::vector<bool> component_closed;

  int n_vertices() const { return static_cast<int>(V.rows()); }
  int n_faces() const { return static_cast<int>(F.rows()); }
  int n_halfedges() const { return 3 * n_faces(); }
  int n_edges() const { return static_cast<int>(edge_halfedge.size()); }
  int n_interior_edges() const { return static_cast<int>(interior_edges.size()); }

  static int face_of(int h) { return h / 3; }
  static int slot_of(int h) { return h % 3; }
  static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  int tail(int h) const { return F(h / 3, h % 3); }
  int head(int h) const { return F(h / 3, (h % 3 + 1) % 3); }

  bool edge_is_interior(int e) const { return interior_edge_index[e] >= 0; }
  int edge_tail(int e) const { return tail(edge_halfedge[e]); }
  int edge_head(int e) const { return head(edge_halfedge[e]); }

  int slot_of_vertex(int f, int v) const {
    for (int s = 0; s < 3; ++s)
      if (F(f, s) == v) return s;
    throw MeshError("InternalError: vertex not in face");
  }

  // Outgoing halfedge of v inside face f.
  int out_halfedge_in_face(int f, int v) const { return 3 * f + slot_of_vertex(f, v); }

  // CCW / CW steps over outgoing halfedges around tail(h); -1 when leaving the fan.
  int ccw_out(int h) const {
    int p = prev(h);
    return twin[p];
  }
  int cw_out(int h) const {
    int t = twin[h];
    return t < 0 ? -1 : next(t);
  }

  // Complex coordinate of a tangent vector in face f's basis.
  cplx to_basis(int f, const Vec3& d) const {
    return cplx(d.dot(basis_x.row(f)), d.dot(basis_y.row(f)));
  }

  Vec3 halfedge_vector(int h) const { return V.row(head(h)) - V.row(tail(h)); }

  // Faces around an interior vertex in CCW order, starting at vertex_out_halfedge.
  // For boundary vertices the open fan is returned (boundary edge to boundary edge).
  std::vector<int> vertex_star_out_halfedges(int v) const {
    std::vector<int> out;
    int h0 = vertex_out_halfedge[v];
    int h = h0;
    do {
      out.push_back(h);
      h = ccw_out(h);
    } while (h >= 0 && h != h0);
    return out;
  }
};

namespace detail {

inline void check_faces(const Eigen::MatrixXd& V, const Eigen::MatrixXi& F) {
  for (int f = 0; f < F.rows(); ++f) {
    for (int s = 0; s < 3; ++s) {
      if (F(f, s) < 0 || F(f, s) >= V.rows())
        throw MeshError("BadIndex: face " + std::to_string(f) + " references missing vertex");
    }
    if (F(f, 0) == F(f, 1) || F(f, 1) == F(f, 2) || F(f, 2) == F(f, 0))
      throw MeshError("DegenerateFace: repeated vertex in face " + std::to_string(f));
  }
}

}  // namespace detail

inline SurfaceMesh build_mesh(const Eigen::MatrixXd& V, const Eigen::MatrixXi& F) {
  if (F.cols() != 3) throw MeshError("TriangleOnly: mesh must be pure-triangle");
  detail::check_faces(V, F);

  SurfaceMesh m;
  m.V = V;
  m.F = F;
  const int nf = m.n_faces();
  const int nh = 3 * nf;

  // Twin pairing; a directed edge occurring twice means inconsistent orientation
  // or a non-manifold edge.
  std::map<std::pair<int, int>, int> directed;
  for (int h = 0; h < nh; ++h) {
    auto key = std::make_pair(m.tail(h), m.head(h));
    if (!directed.emplace(key, h).second)
      throw MeshError("NonManifold: directed edge appears twice (orientation or fan problem)");
  }
  m.twin.assign(nh, -1);
  for (auto& [key, h] : directed) {
    auto it = directed.find(std::make_pair(key.second, key.first));
    if (it != directed.end()) m.twin[h] = it->second;
  }

  // Edge list; representative halfedge is the lower index.
  m.halfedge_edge.assign(nh, -1);
  for (int h = 0; h < nh; ++h) {
    if (m.halfedge_edge[h] >= 0) continue;
    int e = static_cast<int>(m.edge_halfedge.size());
    m.edge_halfedge.push_back(h);
    m.halfedge_edge[h] = e;
    if (m.twin[h] >= 0) m.halfedge_edge[m.twin[h]] = e;
  }
  m.interior_edge_index.assign(m.n_edges(), -1);
  for (int e = 0; e < m.n_edges(); ++e) {
    if (m.twin[m.edge_halfedge[e]] >= 0) {
      m.interior_edge_index[e] = static_cast<int>(m.interior_edges.size());
      m.interior_edges.push_back(e);
    }
  }

  // Vertex fans. Every vertex must be covered by exactly one fan; boundary
  // fans start at the outgoing boundary halfedge.
  const int nv = m.n_vertices();
  m.vertex_on_boundary.assign(nv, false);
  m.vertex_out_halfedge.assign(nv, -1);
  std::vector<int> incident_faces(nv, 0);
  for (int h = 0; h < nh; ++h) incident_faces[m.tail(h)]++;
  for (int h = 0; h < nh; ++h) {
    int v = m.tail(h);
    if (m.twin[h] < 0) {
      if (m.vertex_on_boundary[v])
        throw MeshError("NonManifoldVertex: vertex " + std::to_string(v) +
                        " has multiple boundary fans");
      m.vertex_on_boundary[v] = true;
      m.vertex_out_halfedge[v] = h;
    } else if (m.vertex_out_halfedge[v] < 0) {
      m.vertex_out_halfedge[v] = h;
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (incident_faces[v] == 0)
      throw MeshError("IsolatedVertex: vertex " + std::to_string(v) + " has no incident face");
    if (static_cast<int>(m.vertex_star_out_halfedges(v).size()) != incident_faces[v])
      throw MeshError("NonManifoldVertex: vertex " + std::to_string(v) +
                      " star is not a single fan");
  }

  // Intrinsic quantities. Angles via the law of cosines on edge lengths, so a
  // later intrinsic-only code path gives bitwise identical results.
  m.face_area.resize(nf);
  m.corner_angle.resize(nf, 3);
  m.halfedge_len.resize(nf, 3);
  m.basis_x.resize(nf, 3);
  m.basis_y.resize(nf, 3);
  m.face_normal.resize(nf, 3);
  for (int f = 0; f < nf; ++f) {
    double l[3];
    for (int s = 0; s < 3; ++s) {
      l[s] = m.halfedge_vector(3 * f + s).norm();
      m.halfedge_len(f, s) = l[s];
      if (l[s] <= 0.0) throw MeshError("DegenerateFace: zero-length edge in face " + std::to_string(f));
    }
    for (int s = 0; s < 3; ++s) {
      // angle at corner s lies between halfedge s and halfedge s-1 (reversed)
      double a = l[s], b = l[(s + 2) % 3], c = l[(s + 1) % 3];
      double cosv = (a * a + b * b - c * c) / (2.0 * a * b);
      if (cosv < -1.0 || cosv > 1.0) {
        if (cosv < -1.0 - 1e-12 || cosv > 1.0 + 1e-12)
          throw MeshError("DegenerateFace: triangle inequality violated in face " + std::to_string(f));
        cosv = std::clamp(cosv, -1.0, 1.0);
      }
      m.corner_angle(f, s) = std::acos(cosv);
      if (!(m.corner_angle(f, s) > 0.0))
        throw MeshError("DegenerateFace: zero angle in face " + std::to_string(f));
    }
    Vec3 e0 = m.halfedge_vector(3 * f + 0);
    Vec3 e2 = m.halfedge_vector(3 * f + 2);
    Vec3 n = e0.cross(-e2);
    double n2 = n.norm();
    if (n2 <= 1e-14 * sqr(std::max({l[0], l[1], l[2]})))
      throw MeshError("DegenerateFace: zero area in face " + std::to_string(f));
    m.face_area(f) = 0.5 * n2;
    n /= n2;
    Vec3 bx = e0 / l[0];
    m.face_normal.row(f) = n;
    m.basis_x.row(f) = bx;
    m.basis_y.row(f) = n.cross(bx);
  }

  // Connection per interior edge: same geometric direction read in both bases.
  m.connection = Eigen::VectorXd::Zero(m.n_edges());
  for (int e : m.interior_edges) {
    int h0 = m.edge_halfedge[e];
    int h1 = m.twin[h0];
    Vec3 d = m.halfedge_vector(h0);
    cplx wf = m.to_basis(SurfaceMesh::face_of(h0), d);
    cplx wg = m.to_basis(SurfaceMesh::face_of(h1), d);
    m.connection(e) = std::arg(wg * std::conj(wf));
  }

  // Boundary loops: chain boundary halfedges head-to-tail. With CCW faces the
  // surface is on the left of each boundary halfedge.
  {
    std::vector<int> next_boundary(nh, -1);
    for (int v = 0; v < nv; ++v) {
      if (!m.vertex_on_boundary[v]) continue;
      // incoming boundary halfedge at v is the last fan face's closing halfedge
      auto star = m.vertex_star_out_halfedges(v);
      int h_in = SurfaceMesh::prev(star.back());  // into v, twin == -1
      if (m.twin[h_in] >= 0) throw MeshError("InternalError: boundary fan end not boundary");
      next_boundary[h_in] = m.vertex_out_halfedge[v];
    }
    std::vector<bool> seen(nh, false);
    for (int h = 0; h < nh; ++h) {
      if (m.twin[h] >= 0 || seen[h]) continue;
      std::vector<int> loop;
      int cur = h;
      do {
        loop.push_back(cur);
        seen[cur] = true;
        cur = next_boundary[cur];
        if (cur < 0) throw MeshError("InternalError: broken boundary chain");
      } while (cur != h);
      m.boundary_loops.push_back(std::move(loop));
    }
  }

  // Connected components over faces.
  m.face_component.assign(nf, -1);
  for (int f = 0; f < nf; ++f) {
    if (m.face_component[f] >= 0) continue;
    int c = m.n_components++;
    std::queue<int> q;
    q.push(f);
    m.face_component[f] = c;
    while (!q.empty()) {
      int cur = q.front();
      q.pop();
      for (int s = 0; s < 3; ++s) {
        int t = m.twin[3 * cur + s];
        if (t >= 0 && m.face_component[t / 3] < 0) {
          m.face_component[t / 3] = c;
          q.push(t / 3);
        }
      }
    }
  }
  m.component_closed.assign(m.n_components, true);
  for (int h = 0; h < nh; ++h)
    if (m.twin[h] < 0) m.component_closed[m.face_component[h / 3]] = false;

  return m;
}

// Angle defect: 2*pi - sum(angles) at interior vertices, pi - sum(angles) on
// boundary vertices. Summing all entries gives 2*pi*chi (Gauss-Bonnet).
inline Eigen::VectorXd gaussian_curvature(const SurfaceMesh& m) {
  Eigen::VectorXd k(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) {
    double sum = 0.0;
    for (int h : m.vertex_star_out_halfedges(v)) sum += m.corner_angle(h / 3, h % 3);
    k(v) = (m.vertex_on_boundary[v] ? PI : TWO_PI) - sum;
  }
  return k;
}

// Two faces of an interior edge unfolded into one plane. Canonical pose puts
// vk at the origin and vi on the positive x axis; vj (apex of f) has y > 0,
// vl (apex of g) has y < 0. rot_f/rot_g rotate face-basis coordinates into
// this common frame.
struct FlapGeometry {
  int edge = -1;
  int f = -1, g = -1;      // f carries the representative halfedge vk->vi
  int h0 = -1, h1 = -1;    // h0 in f, h1 = twin in g
  int vk = -1, vi = -1, vj = -1, vl = -1;
  Vec2 pk, pi, pj, pl;
  double rot_f = 0.0, rot_g = 0.0;

  cplx from_f(cplx u) const { return u * std::polar(1.0, rot_f); }
  cplx from_g(cplx u) const { return u * std::polar(1.0, rot_g); }
};

inline FlapGeometry flatten_flap(const SurfaceMesh& m, int e) {
  if (!m.edge_is_interior(e)) throw MeshError("BoundaryEdge: no flap for boundary edge");
  FlapGeometry fl;
  fl.edge = e;
  fl.h0 = m.edge_halfedge[e];
  fl.h1 = m.twin[fl.h0];
  fl.f = SurfaceMesh::face_of(fl.h0);
  fl.g = SurfaceMesh::face_of(fl.h1);
  fl.vk = m.tail(fl.h0);
  fl.vi = m.head(fl.h0);
  fl.vj = m.head(SurfaceMesh::next(fl.h0));
  fl.vl = m.head(SurfaceMesh::next(fl.h1));

  const double c = m.halfedge_len(fl.f, SurfaceMesh::slot_of(fl.h0));
  fl.pk = Vec2(0.0, 0.0);
  fl.pi = Vec2(c, 0.0);
  {
    // f = (vk, vi, vj) CCW: vj above the axis
    double b = m.halfedge_len(fl.f, SurfaceMesh::slot_of(SurfaceMesh::prev(fl.h0)));  // |vj vk|
    double a = m.halfedge_len(fl.f, SurfaceMesh::slot_of(SurfaceMesh::next(fl.h0)));  // |vi vj|
    double x = (c * c + b * b - a * a) / (2.0 * c);
    double y2 = b * b - x * x;
    fl.pj = Vec2(x, std::sqrt(std::max(0.0, y2)));
  }
  {
    // g = (vi, vk, vl) CCW: vl below the axis
    double kl = m.halfedge_len(fl.g, SurfaceMesh::slot_of(SurfaceMesh::next(fl.h1)));  // |vk vl|
    double li = m.halfedge_len(fl.g, SurfaceMesh::slot_of(SurfaceMesh::prev(fl.h1)));  // |vl vi|
    double x = (c * c + kl * kl - li * li) / (2.0 * c);
    double y2 = kl * kl - x * x;
    fl.pl = Vec2(x, -std::sqrt(std::max(0.0, y2)));
  }

  // h0 lies along +x in the flap; h1 along -x.
  Vec3 d = m.halfedge_vector(fl.h0);
  fl.rot_f = wrap_angle(-std::arg(m.to_basis(fl.f, d)));
  fl.rot_g = wrap_angle(PI - std::arg(m.to_basis(fl.g, -d)));
  return fl;
}

}  // namespace polarfield
