#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <polarfield/bevel.h>
#include <polarfield/integrate.h>
#include <polarfield/isotropy.h>
#include <polarfield/operators.h>
#include <polarfield/prescription.h>
#include <polarfield/prescription_io.h>
#include <polarfield/theta_solve.h>

#include "testutil.h"

using namespace polarfield;
using testutil::make;

namespace {

struct Solved {
  SurfaceMesh m;
  BeveledMesh b;
  CycleOperators ops;
  DiscreteOperators disc;
  Prescription p;
  ThetaReport rep;
};

Solved solve_theta_on(const testutil::MeshData& d, Prescription p) {
  Solved s;
  s.m = make(d);
  s.b = build_bevel(s.m);
  s.ops = build_cycle_operators(s.m, s.b);
  s.disc = build_discrete_operators(s.m, s.b, s.ops, 50.0);
  normalize_placements(p, s.m);
  fill_default_indices(p, int(s.ops.H.rows()), int(s.m.boundary_loops.size()));
  validate(p, s.m, int(s.ops.H.rows()));
  s.p = p;
  IsotropyTargets targets = assemble_targets(p, s.m, s.b);
  SingularOperators sing = build_singular_operators(
      s.m, s.b, 50.0, targets.singular_vertices, targets.singular_edges,
      targets.singular_faces);
  s.rep = solve_theta(s.m, s.b, s.ops, s.disc, sing, targets, s.p, 50.0);
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

TEST_CASE("single triangle with thirds of a turn lands on the unit circle") {
  SurfaceMesh m = make(testutil::single_triangle());
  BeveledMesh b = build_bevel(m);
  Eigen::VectorXd theta(b.n_bev_edges);
  theta << TWO_PI / 3, TWO_PI / 3, TWO_PI / 3;
  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(b.n_corners);
  IntegratedField u = integrate_field(m, b, theta, sigma, 1);
  REQUIRE(u.residual < 1e-12);
  REQUIRE(u.pinned == std::vector<int>{0});
  REQUIRE(std::abs(u.corner[0] - cplx(1.0, 0.0)) < 1e-10);
  REQUIRE(std::abs(u.corner[1] - std::polar(1.0, TWO_PI / 3)) < 1e-10);
  REQUIRE(std::abs(u.corner[2] - std::polar(1.0, -TWO_PI / 3)) < 1e-10);
}

TEST_CASE("zero phase and unit scale integrate to a constant field") {
  SurfaceMesh m = make(testutil::grid(3, 3));
  BeveledMesh b = build_bevel(m);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(b.n_bev_edges);
  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(b.n_corners);
  IntegratedField u = integrate_field(m, b, theta, sigma, 1);
  REQUIRE(u.residual < 1e-10);
  // All corners describe one geometric vector: map into world coordinates.
  Vec3 w0 = m.basis_x.row(0).transpose() * u.corner[0].real() +
            m.basis_y.row(0).transpose() * u.corner[0].imag();
  for (int c = 0; c < b.n_corners; ++c) {
    int f = BeveledMesh::corner_face(c);
    Vec3 w = m.basis_x.row(f).transpose() * u.corner[c].real() +
             m.basis_y.row(f).transpose() * u.corner[c].imag();
    REQUIRE((w - w0).norm() < 1e-10);
    REQUIRE(std::abs(std::abs(u.corner[c]) - 1.0) < 1e-10);
  }
}

TEST_CASE("solved sphere field integrates with small residual") {
  Prescription want;
  want.singularities = {vertex_sing(0, 1), vertex_sing(11, 1)};
  Solved s = solve_theta_on(testutil::icosphere(1), want);
  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(s.b.n_corners);
  IntegratedField u = integrate_field(s.m, s.b, s.rep.theta, sigma, 1);
  REQUIRE(u.residual < 1e-6);
  // Least squares keeps the magnitudes at the requested scales.
  for (int c = 0; c < s.b.n_corners; ++c)
    REQUIRE(std::abs(std::abs(u.corner[c]) - 1.0) < 1e-5);
}

TEST_CASE("phase differences read back from the corners match the solve") {
  Prescription want;
  want.singularities = {vertex_sing(0, 2)};
  Solved s = solve_theta_on(testutil::icosphere(0), want);
  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(s.b.n_corners);
  IntegratedField u = integrate_field(s.m, s.b, s.rep.theta, sigma, 1);
  Eigen::VectorXd back = extract_theta(s.m, s.b, u.corner, s.rep.theta, 1);
  REQUIRE((back - s.rep.theta).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("four fold field on a torus respects the scaled connection") {
  Prescription want;
  want.N = 4;
  Solved s = solve_theta_on(testutil::torus(8, 6), want);
  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(s.b.n_corners);
  IntegratedField u = integrate_field(s.m, s.b, s.rep.theta, sigma, 4);
  REQUIRE(u.residual < 1e-6);
  Eigen::VectorXd back = extract_theta(s.m, s.b, u.corner, s.rep.theta, 4);
  REQUIRE((back - s.rep.theta).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("scale and phase vector size mismatches are rejected") {
  SurfaceMesh m = make(testutil::single_triangle());
  BeveledMesh b = build_bevel(m);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(b.n_corners);
  REQUIRE_THROWS_AS(integrate_field(m, b, theta, sigma, 1), SolverError);
}
