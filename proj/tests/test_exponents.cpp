#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include <polarfield/bevel.h>
#include <polarfield/exponents.h>
#include <polarfield/isotropy.h>
#include <polarfield/operators.h>
#include <polarfield/prescription.h>
#include <polarfield/prescription_io.h>
#include <polarfield/theta_solve.h>

#include "testutil.h"

using namespace polarfield;
using testutil::make;

namespace {

Eigen::VectorXd zero_theta(const BeveledMesh& b) {
  return Eigen::VectorXd::Zero(b.n_bev_edges);
}

Singularity face_sing(int f, int index) {
  Singularity s;
  s.kind = Singularity::Kind::Face;
  s.element = f;
  s.index = index;
  return s;
}

Singularity vertex_sing(int v, int index) {
  Singularity s;
  s.kind = Singularity::Kind::Vertex;
  s.element = v;
  s.index = index;
  return s;
}

}  // namespace

TEST_CASE("no singularities default every face to one") {
  SurfaceMesh m = make(testutil::icosphere(0));
  BeveledMesh b = build_bevel(m);
  Prescription p;
  ExponentField ex = interpolate_indices(m, b, p, zero_theta(b));
  REQUIRE(ex.fixed.empty());
  for (int v : ex.exponent) REQUIRE(v == 1);
}

TEST_CASE("all pins equal to one keep every face at one") {
  SurfaceMesh m = make(testutil::icosphere(0));
  BeveledMesh b = build_bevel(m);
  Prescription p;
  p.singularities = {vertex_sing(0, 1), vertex_sing(11, 1)};
  ExponentField ex = interpolate_indices(m, b, p, zero_theta(b));
  std::set<int> star_union;
  for (int v : {0, 11})
    for (int o : m.vertex_star_out_halfedges(v))
      star_union.insert(SurfaceMesh::face_of(o));
  REQUIRE(ex.fixed.size() == star_union.size());
  for (int v : ex.exponent) REQUIRE(v == 1);
  for (int f = 0; f < m.n_faces(); ++f)
    REQUIRE(ex.smooth[f] == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("vertex pins land on the whole star and faces pins on the face") {
  SurfaceMesh m = make(testutil::icosphere(0));
  BeveledMesh b = build_bevel(m);
  Prescription p;
  p.singularities = {vertex_sing(3, 2), face_sing(7, -1)};
  ExponentField ex = interpolate_indices(m, b, p, zero_theta(b));
  for (int o : m.vertex_star_out_halfedges(3)) {
    int f = SurfaceMesh::face_of(o);
    if (f == 7) continue;  // possible overlap handled by the conflict rule
    REQUIRE(ex.fixed.at(f) == 2);
    REQUIRE(ex.exponent[f] == 2);
  }
  REQUIRE(ex.exponent[7] == (ex.fixed.at(7) == 2 ? 2 : -1));
}

TEST_CASE("diffused values obey the pinned range on a strip") {
  SurfaceMesh m = make(testutil::grid(8, 2));
  BeveledMesh b = build_bevel(m);
  Prescription p;
  p.singularities = {face_sing(0, 1), face_sing(m.n_faces() - 1, 3)};
  ExponentField ex = interpolate_indices(m, b, p, zero_theta(b));
  REQUIRE(ex.smooth.minCoeff() >= 1.0 - 1e-9);
  REQUIRE(ex.smooth.maxCoeff() <= 3.0 + 1e-9);
  REQUIRE(ex.exponent[0] == 1);
  REQUIRE(ex.exponent[m.n_faces() - 1] == 3);
  for (int v : ex.exponent) {
    REQUIRE(v >= 1);
    REQUIRE(v <= 3);
  }
}

TEST_CASE("phase jumps beyond pi floor the face power") {
  SurfaceMesh m = make(testutil::single_triangle());
  BeveledMesh b = build_bevel(m);
  Prescription p;
  Eigen::VectorXd theta = zero_theta(b);
  theta[0] = 4.0;  // > pi, <= 2 pi
  ExponentField ex = interpolate_indices(m, b, p, theta);
  REQUIRE(ex.exponent[0] == 2);
  REQUIRE(ex.fixed.at(0) == 2);
  bool logged = false;
  for (const auto& line : ex.log) logged |= line.find("floored") != std::string::npos;
  REQUIRE(logged);
}

TEST_CASE("conflicting pins keep the larger magnitude and log it") {
  SurfaceMesh m = make(testutil::icosphere(0));
  BeveledMesh b = build_bevel(m);
  int h = m.edge_halfedge[0];
  int va = m.tail(h), vb = m.head(h);
  Prescription p;
  p.singularities = {vertex_sing(va, 3), vertex_sing(vb, -1)};
  ExponentField ex = interpolate_indices(m, b, p, zero_theta(b));
  // The two faces of edge 0 touch both stars.
  int f = SurfaceMesh::face_of(h), g = SurfaceMesh::face_of(m.twin[h]);
  REQUIRE(ex.fixed.at(f) == 3);
  REQUIRE(ex.fixed.at(g) == 3);
  REQUIRE_FALSE(ex.log.empty());
}

TEST_CASE("opposed pins leave a zero rounding with a warning") {
  SurfaceMesh m = make(testutil::disk_fan(4));
  BeveledMesh b = build_bevel(m);
  // Faces 0..3 fan around the center; pin the two outer ones to opposite
  // signs so the middle pair averages toward zero.
  Prescription p;
  p.singularities = {face_sing(0, 1), face_sing(2, -1)};
  ExponentField ex = interpolate_indices(m, b, p, zero_theta(b));
  bool warned = false;
  for (const auto& line : ex.log)
    warned |= line.find("without a sign") != std::string::npos;
  int zeros = int(std::count(ex.exponent.begin(), ex.exponent.end(), 0));
  if (zeros > 0) {
    REQUIRE(warned);
  } else {
    // The symmetric fan may round away from zero; the range must still hold.
    REQUIRE(ex.smooth.minCoeff() >= -1.0 - 1e-9);
    REQUIRE(ex.smooth.maxCoeff() <= 1.0 + 1e-9);
  }
}

TEST_CASE("solved sphere phases keep regular faces at power one") {
  testutil::MeshData d = testutil::icosphere(1);
  SurfaceMesh m = make(d);
  BeveledMesh b = build_bevel(m);
  CycleOperators ops = build_cycle_operators(m, b);
  DiscreteOperators disc = build_discrete_operators(m, b, ops, 50.0);
  Prescription p;
  p.singularities = {vertex_sing(0, 1), vertex_sing(11, 1)};
  fill_default_indices(p, int(ops.H.rows()), int(m.boundary_loops.size()));
  validate(p, m, int(ops.H.rows()));
  IsotropyTargets targets = assemble_targets(p, m, b);
  SingularOperators sing =
      build_singular_operators(m, b, 50.0, targets.singular_vertices,
                               targets.singular_edges, targets.singular_faces);
  ThetaReport rep = solve_theta(m, b, ops, disc, sing, targets, p, 50.0);
  ExponentField ex = interpolate_indices(m, b, p, rep.theta);
  for (int v : ex.exponent) REQUIRE(v == 1);
}
