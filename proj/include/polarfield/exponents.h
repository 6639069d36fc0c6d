#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "bevel.h"
#include "operators.h"
#include "prescription.h"

namespace polarfield {

// Per-face power numerators: each face carries the prescribed value of the
// singular element it touches, faces whose phase jumps are too large for
// their power get a floor, and everything else is diffused from those pins.
struct ExponentField {
  std::vector<int> exponent;      // final signed numerator per face
  Eigen::VectorXd smooth;         // diffused values before rounding
  std::map<int, int> fixed;       // pinned faces and their numerators
  std::vector<std::string> log;   // floors, conflicts, sign fallbacks
};

namespace detail {

// Keeps the claim with the larger magnitude when two singular elements pin
// the same face; ties go to the positive value.
inline void pin_face(std::map<int, int>& fixed, std::vector<std::string>& log,
                     int f, int value) {
  auto it = fixed.find(f);
  if (it == fixed.end()) {
    fixed.emplace(f, value);
    return;
  }
  if (it->second == value) return;
  int a = it->second;
  int keep = std::abs(a) != std::abs(value) ?
      (std::abs(a) > std::abs(value) ? a : value) : std::max(a, value);
  log.push_back("face " + std::to_string(f) + " pinned to both " +
                std::to_string(a) + " and " + std::to_string(value) +
                "; keeping " + std::to_string(keep));
  it->second = keep;
}

}  // namespace detail

// Assigns a numerator to every face. Faces holding a singularity, faces next
// to an edge or vertex singularity, and faces whose split-edge phase exceeds
// what their power admits are pinned; the remaining faces minimize the
// dual-edge-weighted Dirichlet energy of the numerator and are rounded half
// away from zero. Rounded zeros snap to +-1 only when every pinned neighbor
// agrees on the sign.
inline ExponentField interpolate_indices(const SurfaceMesh& m,
                                         const BeveledMesh& b,
                                         const Prescription& p,
                                         const Eigen::VectorXd& theta) {
  ExponentField out;
  int nf = m.n_faces();
  out.exponent.assign(nf, 1);
  out.smooth = Eigen::VectorXd::Ones(nf);

  for (const Singularity& s : p.singularities) {
    switch (s.kind) {
      case Singularity::Kind::Face:
        detail::pin_face(out.fixed, out.log, s.element, s.index);
        break;
      case Singularity::Kind::Edge: {
        int h = m.edge_halfedge[s.element];
        detail::pin_face(out.fixed, out.log, SurfaceMesh::face_of(h), s.index);
        if (m.twin[h] >= 0)
          detail::pin_face(out.fixed, out.log,
                           SurfaceMesh::face_of(m.twin[h]), s.index);
        break;
      }
      case Singularity::Kind::Vertex:
        for (int o : m.vertex_star_out_halfedges(s.element))
          detail::pin_face(out.fixed, out.log, SurfaceMesh::face_of(o),
                           s.index);
        break;
    }
  }

  // A split-edge phase of magnitude beyond pi per unit of power means the
  // face cannot represent the turning with its current numerator; pin the
  // smallest power that can.
  if (theta.size() >= 3 * nf) {
    for (int f = 0; f < nf; ++f) {
      double peak = 0.0;
      for (int c = 0; c < 3; ++c)
        peak = std::max(peak, std::abs(theta[b.split_id(3 * f + c)]));
      int floor_power = std::max(1, int(std::ceil(peak / PI - 1e-12)));
      auto it = out.fixed.find(f);
      if (it != out.fixed.end()) {
        if (std::abs(it->second) < floor_power)
          out.log.push_back("face " + std::to_string(f) +
                            " has phase jumps beyond its pinned power " +
                            std::to_string(it->second));
        continue;
      }
      if (floor_power > 1) {
        detail::pin_face(out.fixed, out.log, f, floor_power);
        out.log.push_back("face " + std::to_string(f) +
                          " floored to power " + std::to_string(floor_power) +
                          " by its phase jumps");
      }
    }
  }

  if (out.fixed.empty()) return out;  // all-regular default

  // Connected components over the dual graph; components without a pin keep
  // the default of one.
  std::vector<int> comp(nf, -1);
  int n_comp = 0;
  for (int seed = 0; seed < nf; ++seed) {
    if (comp[seed] >= 0) continue;
    std::vector<int> stack{seed};
    comp[seed] = n_comp;
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      for (int c = 0; c < 3; ++c) {
        int t = m.twin[3 * f + c];
        if (t < 0) continue;
        int g = SurfaceMesh::face_of(t);
        if (comp[g] < 0) {
          comp[g] = n_comp;
          stack.push_back(g);
        }
      }
    }
    ++n_comp;
  }
  std::vector<char> comp_pinned(n_comp, 0);
  for (const auto& [f, v] : out.fixed) comp_pinned[comp[f]] = 1;

  std::vector<int> unknown;
  std::vector<int> column(nf, -1);
  for (int f = 0; f < nf; ++f)
    if (!out.fixed.count(f) && comp_pinned[comp[f]]) {
      column[f] = int(unknown.size());
      unknown.push_back(f);
    }

  for (const auto& [f, v] : out.fixed) out.smooth[f] = double(v);

  if (!unknown.empty()) {
    Eigen::VectorXd w = index_mass(m);
    std::vector<Triplet> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(long(unknown.size()));
    for (int r = 0; r < m.n_interior_edges(); ++r) {
      int h = m.edge_halfedge[m.interior_edges[r]];
      int f = SurfaceMesh::face_of(h), g = SurfaceMesh::face_of(m.twin[h]);
      int cf = column[f], cg = column[g];
      if (cf >= 0) trip.emplace_back(cf, cf, w[r]);
      if (cg >= 0) trip.emplace_back(cg, cg, w[r]);
      if (cf >= 0 && cg >= 0) {
        trip.emplace_back(cf, cg, -w[r]);
        trip.emplace_back(cg, cf, -w[r]);
      } else if (cf >= 0) {
        rhs[cf] += w[r] * out.smooth[g];
      } else if (cg >= 0) {
        rhs[cg] += w[r] * out.smooth[f];
      }
    }
    SparseD L(long(unknown.size()), long(unknown.size()));
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SparseD> chol(L);
    if (chol.info() != Eigen::Success)
      throw SolverError("SolveFailure: exponent diffusion system is singular");
    Eigen::VectorXd x = chol.solve(rhs);
    for (size_t i = 0; i < unknown.size(); ++i) out.smooth[unknown[i]] = x[long(i)];
  }

  for (int f = 0; f < nf; ++f) {
    if (auto it = out.fixed.find(f); it != out.fixed.end()) {
      out.exponent[f] = it->second;
      continue;
    }
    if (!comp_pinned[comp[f]]) {
      out.exponent[f] = 1;
      continue;
    }
    int r = int(std::round(out.smooth[f]));
    if (r == 0) {
      int pos = 0, neg = 0;
      for (int c = 0; c < 3; ++c) {
        int t = m.twin[3 * f + c];
        if (t < 0) continue;
        auto it = out.fixed.find(SurfaceMesh::face_of(t));
        if (it == out.fixed.end()) continue;
        (it->second > 0 ? pos : neg) += 1;
      }
      if (pos > 0 && neg == 0) {
        r = 1;
      } else if (neg > 0 && pos == 0) {
        r = -1;
      } else {
        out.log.push_back("face " + std::to_string(f) +
                          " rounded to power zero without a sign to adopt");
      }
    }
    out.exponent[f] = r;
  }
  return out;
}

}  // namespace polarfield
