#pragma once

#include <array>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "surface_mesh.h"

namespace polarfield {

// A singularity placement on a mesh element. The index is the numerator of
// the actual index I/N, so integer vertex indices of a plain field use N = 1.
struct Singularity {
  enum class Kind { Vertex, Edge, Face };
  Kind kind = Kind::Vertex;
  int element = -1;
  double t = 0.5;                        // edge parameter, tail -> head
  std::array<double, 3> bary{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  int index = 0;                         // numerator, nonzero
};

struct Prescription {
  int N = 1;
  std::vector<Singularity> singularities;
  std::vector<int> homology;  // one numerator per homology generator
  std::vector<int> boundary;  // one numerator per boundary loop
};

namespace detail {

constexpr double kPlacementSnap = 1e-9;

inline const char* kind_name(Singularity::Kind k) {
  switch (k) {
    case Singularity::Kind::Vertex: return "vertex";
    case Singularity::Kind::Edge: return "edge";
    default: return "face";
  }
}

}  // namespace detail

// Moves placements that sit within the snap threshold of a sub-element onto
// that element: a face point next to an edge becomes an edge singularity and
// an edge point next to an endpoint becomes a vertex singularity. Returns
// one warning line per adjusted singularity.
inline std::vector<std::string> normalize_placements(Prescription& p,
                                                     const SurfaceMesh& m) {
  std::vector<std::string> warnings;
  for (Singularity& s : p.singularities) {
    if (s.kind == Singularity::Kind::Face) {
      double sum = s.bary[0] + s.bary[1] + s.bary[2];
      if (std::abs(sum - 1.0) > 1e-6)
        throw PrescriptionError(
            "OutOfRangeParameter: barycentric coordinates of face " +
            std::to_string(s.element) + " sum to " + std::to_string(sum));
      for (double& b : s.bary) b /= sum;
      int f = s.element;
      if (f < 0 || f >= m.n_faces())
        throw PrescriptionError("OutOfRangeParameter: face " +
                                std::to_string(f) + " out of range");
      for (int c = 0; c < 3 && s.kind == Singularity::Kind::Face; ++c) {
        if (s.bary[c] >= detail::kPlacementSnap) continue;
        // Zero weight on corner c puts the point on the opposite edge, the
        // one carried by the next halfedge around the face.
        int h = 3 * f + (c + 1) % 3;
        double wt = s.bary[(c + 1) % 3], wh = s.bary[(c + 2) % 3];
        int e = m.halfedge_edge[h];
        double t = wh / (wt + wh);
        if (m.edge_halfedge[e] != h) t = 1.0 - t;
        warnings.push_back("face singularity " + std::to_string(f) +
                           " snapped to edge " + std::to_string(e));
        s.kind = Singularity::Kind::Edge;
        s.element = e;
        s.t = t;
      }
    }
    if (s.kind == Singularity::Kind::Edge) {
      int e = s.element;
      if (e < 0 || e >= m.n_edges())
        throw PrescriptionError("OutOfRangeParameter: edge " +
                                std::to_string(e) + " out of range");
      if (s.t < -detail::kPlacementSnap || s.t > 1.0 + detail::kPlacementSnap)
        throw PrescriptionError("OutOfRangeParameter: edge parameter " +
                                std::to_string(s.t) + " outside (0, 1)");
      if (s.t < detail::kPlacementSnap || s.t > 1.0 - detail::kPlacementSnap) {
        int v = s.t < 0.5 ? m.edge_tail(e) : m.edge_head(e);
        warnings.push_back("edge singularity " + std::to_string(e) +
                           " snapped to vertex " + std::to_string(v));
        s.kind = Singularity::Kind::Vertex;
        s.element = v;
      }
    }
  }
  return warnings;
}

// Checks a normalized prescription against mesh topology: element ranges,
// interiority, one singularity per element, and the index theorem
// sum(I/N) + sum(I_b/N) = chi. Homology indices are free.
inline void validate(const Prescription& p, const SurfaceMesh& m,
                     int n_generators) {
  if (p.N < 1)
    throw PrescriptionError("OutOfRangeParameter: N must be >= 1, got " +
                            std::to_string(p.N));
  std::set<std::pair<int, int>> seen;
  long numerator_sum = 0;
  for (const Singularity& s : p.singularities) {
    if (s.index == 0)
      throw PrescriptionError("OutOfRangeParameter: zero index on " +
                              std::string(detail::kind_name(s.kind)) + " " +
                              std::to_string(s.element));
    switch (s.kind) {
      case Singularity::Kind::Vertex:
        if (s.element < 0 || s.element >= m.n_vertices())
          throw PrescriptionError("OutOfRangeParameter: vertex " +
                                  std::to_string(s.element) + " out of range");
        if (m.vertex_on_boundary[s.element])
          throw PrescriptionError(
              "BoundaryVertex: singularities on boundary vertex " +
              std::to_string(s.element) + " are not supported");
        break;
      case Singularity::Kind::Edge:
        if (s.element < 0 || s.element >= m.n_edges())
          throw PrescriptionError("OutOfRangeParameter: edge " +
                                  std::to_string(s.element) + " out of range");
        if (!m.edge_is_interior(s.element))
          throw PrescriptionError(
              "BoundaryEdge: singularities on boundary edge " +
              std::to_string(s.element) + " are not supported");
        if (s.t <= 0.0 || s.t >= 1.0)
          throw PrescriptionError("OutOfRangeParameter: edge parameter " +
                                  std::to_string(s.t) + " outside (0, 1)");
        break;
      case Singularity::Kind::Face:
        if (s.element < 0 || s.element >= m.n_faces())
          throw PrescriptionError("OutOfRangeParameter: face " +
                                  std::to_string(s.element) + " out of range");
        for (double b : s.bary)
          if (b <= 0.0)
            throw PrescriptionError(
                "OutOfRangeParameter: nonpositive barycentric coordinate on "
                "face " +
                std::to_string(s.element));
        break;
    }
    if (!seen.insert({int(s.kind), s.element}).second)
      throw PrescriptionError("DuplicateElement: more than one singularity on " +
                              std::string(detail::kind_name(s.kind)) + " " +
                              std::to_string(s.element));
    numerator_sum += s.index;
  }
  if (n_generators >= 0 && int(p.homology.size()) != n_generators)
    throw PrescriptionError(
        "OutOfRangeParameter: expected " + std::to_string(n_generators) +
        " homology indices, got " + std::to_string(p.homology.size()));
  if (p.boundary.size() != m.boundary_loops.size())
    throw PrescriptionError(
        "OutOfRangeParameter: expected " +
        std::to_string(m.boundary_loops.size()) + " boundary indices, got " +
        std::to_string(p.boundary.size()));
  for (int ib : p.boundary) numerator_sum += ib;

  // chi = V - E + F, an integer; the numerators must sum to N * chi.
  long chi = long(m.n_vertices()) - m.n_edges() + m.n_faces();
  if (numerator_sum != long(p.N) * chi)
    throw PrescriptionError(
        "IndexSumMismatch: indices sum to " + std::to_string(numerator_sum) +
        "/" + std::to_string(p.N) + " but the Euler characteristic is " +
        std::to_string(chi));
}

}  // namespace polarfield
