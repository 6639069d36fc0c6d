#pragma once

// Tree-cotree homology generators.
//
// The dual spanning forest is grown first, the primal tree is then built on
// uncrossed edges; leftover edges give fundamental loops, 2g per connected
// component. Boundary loops are capped with a virtual cone apex and one
// virtual triangle per boundary edge before running tree-cotree; the dual
// forest is seeded inside the virtual umbrellas so that every cone ends up a
// leaf of the primal tree. Generator loops therefore never touch virtual
// elements and stay independent of the boundary cycles, which are constrained
// separately.

#include <algorithm>
#include <deque>
#include <string>
#include <vector>

#include "surface_mesh.h"

namespace polarfield {

struct DualStep {
  int face_from = -1, face_to = -1;  // original face ids
  int edge = -1;
  int sign = 0;  // +1 if traversed f(h0) -> f(h1)
};

struct HomologyGenerators {
  // Simple vertex cycles; loops[i][a] -> loops[i][a+1] is a mesh edge.
  std::vector<std::vector<int>> loops;
  // Matching halfedge chains (halfedge v_a -> v_{a+1}).
  std::vector<std::vector<int>> loop_halfedges;
  // Dual fundamental cycles for the same leftover edges; only available when
  // the component is closed (no virtual faces on the path).
  std::vector<std::vector<DualStep>> dual_loops;
};

inline int find_halfedge(const SurfaceMesh& m, int va, int vb) {
  for (int h : m.vertex_star_out_halfedges(va))
    if (m.head(h) == vb) return h;
  throw MeshError("InternalError: no halfedge " + std::to_string(va) + "->" + std::to_string(vb));
}

inline HomologyGenerators homology_generators(const SurfaceMesh& m) {
  const int nv = m.n_vertices();
  const int nf = m.n_faces();
  const int ne = m.n_edges();
  const int nh = m.n_halfedges();

  // Virtual elements per boundary loop: one cone node, one virtual face per
  // boundary halfedge, one cone edge per boundary vertex of the loop.
  const int n_loops = static_cast<int>(m.boundary_loops.size());
  std::vector<int> vface_of_halfedge(nh, -1);
  std::vector<int> cone_edge_of_vertex(nv, -1);
  struct ConeEdge {
    int cone, vertex;        // primal endpoints (cone node, real vertex)
    int vf_a, vf_b;          // dual endpoints (virtual faces sharing it)
  };
  std::vector<ConeEdge> cone_edges;
  int n_vfaces = 0;
  for (int li = 0; li < n_loops; ++li)
    for (int h : m.boundary_loops[li]) vface_of_halfedge[h] = nf + n_vfaces++;
  for (int li = 0; li < n_loops; ++li) {
    const auto& loop = m.boundary_loops[li];
    for (size_t a = 0; a < loop.size(); ++a) {
      int h_in = loop[a];
      int h_out = loop[(a + 1) % loop.size()];
      int v = m.head(h_in);
      cone_edge_of_vertex[v] = ne + static_cast<int>(cone_edges.size());
      cone_edges.push_back({nv + li, v, vface_of_halfedge[h_in], vface_of_halfedge[h_out]});
    }
  }
  const int n_pnodes = nv + n_loops;
  const int n_dnodes = nf + n_vfaces;
  const int n_all_edges = ne + static_cast<int>(cone_edges.size());

  // Dual endpoints of every edge id.
  auto dual_ends = [&](int e) -> std::pair<int, int> {
    if (e >= ne) {
      const auto& ce = cone_edges[e - ne];
      return {ce.vf_a, ce.vf_b};
    }
    int h0 = m.edge_halfedge[e];
    if (m.twin[h0] >= 0) return {SurfaceMesh::face_of(h0), SurfaceMesh::face_of(m.twin[h0])};
    return {SurfaceMesh::face_of(h0), vface_of_halfedge[h0]};
  };
  auto primal_ends = [&](int e) -> std::pair<int, int> {
    if (e >= ne) {
      const auto& ce = cone_edges[e - ne];
      return {ce.vertex, ce.cone};
    }
    return {m.edge_tail(e), m.edge_head(e)};
  };

  // Dual adjacency lists.
  std::vector<std::vector<std::pair<int, int>>> dadj(n_dnodes);  // (edge, other node)
  for (int e = 0; e < n_all_edges; ++e) {
    auto [a, b] = dual_ends(e);
    dadj[a].emplace_back(e, b);
    dadj[b].emplace_back(e, a);
  }

  // Dual spanning forest, virtual faces expanded before real ones.
  std::vector<bool> crossed(n_all_edges, false);
  std::vector<bool> dvisited(n_dnodes, false);
  std::vector<int> dparent_edge(n_dnodes, -1), dparent(n_dnodes, -1);
  {
    // one seed per boundary loop so the umbrella rings are spanned by
    // crossing their cone edges; real-face seeds pick up closed components
    std::vector<int> seeds;
    for (int li = 0; li < n_loops; ++li)
      seeds.push_back(vface_of_halfedge[m.boundary_loops[li][0]]);
    for (int f = 0; f < nf; ++f) seeds.push_back(f);
    for (int s : seeds) {
      if (dvisited[s]) continue;
      dvisited[s] = true;
      std::deque<int> q{s};
      // virtual nodes go to the front so each umbrella is fully spanned
      // before the walk descends into real faces
      while (!q.empty()) {
        int n = q.front();
        q.pop_front();
        for (auto [e, other] : dadj[n]) {
          if (dvisited[other]) continue;
          dvisited[other] = true;
          crossed[e] = true;
          dparent[other] = n;
          dparent_edge[other] = e;
          if (other >= nf)
            q.push_front(other);
          else
            q.push_back(other);
        }
      }
    }
  }

  // Primal tree on uncrossed edges.
  std::vector<std::vector<std::pair<int, int>>> padj(n_pnodes);
  for (int e = 0; e < n_all_edges; ++e) {
    if (crossed[e]) continue;
    auto [a, b] = primal_ends(e);
    padj[a].emplace_back(e, b);
    padj[b].emplace_back(e, a);
  }
  std::vector<bool> in_tree(n_all_edges, false);
  std::vector<int> pparent(n_pnodes, -1), pdepth(n_pnodes, -1);
  for (int root = 0; root < nv; ++root) {
    if (pdepth[root] >= 0) continue;
    pdepth[root] = 0;
    std::deque<int> q{root};
    while (!q.empty()) {
      int n = q.front();
      q.pop_front();
      for (auto [e, other] : padj[n]) {
        if (pdepth[other] >= 0) continue;
        pdepth[other] = pdepth[n] + 1;
        pparent[other] = n;
        in_tree[e] = true;
        q.push_back(other);
      }
    }
  }

  HomologyGenerators gen;
  for (int e = 0; e < n_all_edges; ++e) {
    if (crossed[e] || in_tree[e]) continue;
    if (e >= ne) throw MeshError("InternalError: leftover cone edge in tree-cotree");
    // fundamental vertex loop: e (tail->head) followed by the tree path back
    int a = m.edge_tail(e), b = m.edge_head(e);
    std::vector<int> up_a{a}, up_b{b};
    int x = a, y = b;
    while (pdepth[x] > pdepth[y]) up_a.push_back(x = pparent[x]);
    while (pdepth[y] > pdepth[x]) up_b.push_back(y = pparent[y]);
    while (x != y) {
      up_a.push_back(x = pparent[x]);
      up_b.push_back(y = pparent[y]);
    }
    // cycle: a --e--> b, then tree path b -> lca -> a (lca and a not repeated)
    std::vector<int> cyc;
    cyc.push_back(a);
    cyc.push_back(b);
    for (size_t i = 1; i < up_b.size(); ++i) cyc.push_back(up_b[i]);
    for (int i = static_cast<int>(up_a.size()) - 2; i >= 1; --i) cyc.push_back(up_a[i]);
    for (int vtx : cyc)
      if (vtx >= nv) throw MeshError("InternalError: generator loop touches virtual cone");
    gen.loops.push_back(cyc);

    std::vector<int> hes;
    for (size_t i = 0; i < cyc.size(); ++i)
      hes.push_back(find_halfedge(m, cyc[i], cyc[(i + 1) % cyc.size()]));
    gen.loop_halfedges.push_back(hes);

    // dual fundamental cycle (closed components only)
    int h0 = m.edge_halfedge[e];
    bool closed = m.component_closed[m.face_component[SurfaceMesh::face_of(h0)]];
    std::vector<DualStep> dloop;
    if (closed) {
      int fa = SurfaceMesh::face_of(h0), fb = SurfaceMesh::face_of(m.twin[h0]);
      auto rel_sign = [&](int eid, int from) {
        return SurfaceMesh::face_of(m.edge_halfedge[eid]) == from ? 1 : -1;
      };
      dloop.push_back({fa, fb, e, rel_sign(e, fa)});
      // cotree path fb -> fa: climb both to common ancestor
      std::vector<DualStep> up_fb, up_fa;
      std::vector<int> anc_a{fa};
      for (int n = fa; dparent[n] >= 0; n = dparent[n]) anc_a.push_back(dparent[n]);
      std::vector<bool> is_anc(n_dnodes, false);
      for (int n : anc_a) is_anc[n] = true;
      int meet = fb;
      while (!is_anc[meet]) {
        int pe = dparent_edge[meet], pn = dparent[meet];
        up_fb.push_back({meet, pn, pe, rel_sign(pe, meet)});
        meet = pn;
      }
      for (int n = fa; n != meet; n = dparent[n]) {
        int pe = dparent_edge[n];
        up_fa.push_back({dparent[n], n, pe, rel_sign(pe, dparent[n])});
      }
      std::reverse(up_fa.begin(), up_fa.end());
      for (auto& s : up_fb) dloop.push_back(s);
      for (auto& s : up_fa) dloop.push_back(s);
      for (auto& s : dloop)
        if (s.face_from >= nf || s.face_to >= nf)
          throw MeshError("InternalError: dual loop touches virtual face");
    }
    gen.dual_loops.push_back(std::move(dloop));
  }
  return gen;
}

}  // namespace polarfield
