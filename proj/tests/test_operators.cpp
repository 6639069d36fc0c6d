#include <catch2/catch_amalgamated.hpp>
#include <Eigen/Eigenvalues>
#include <random>

#include "polarfield/bevel.h"
#include "polarfield/operators.h"
#include "testutil.h"

using namespace polarfield;
using Catch::Approx;

namespace {

struct Built {
  SurfaceMesh m;
  BeveledMesh b;
  CycleOperators ops;
  DiscreteOperators disc;
};

Built build(const testutil::MeshData& d, double lambda_j) {
  Built out;
  out.m = testutil::make(d);
  out.b = build_bevel(out.m);
  out.ops = build_cycle_operators(out.m, out.b);
  out.disc = build_discrete_operators(out.m, out.b, out.ops, lambda_j);
  return out;
}

// Gradient of the linear interpolant of (a0, a1, a2) over a 2D triangle.
Vec2 triangle_gradient(Vec2 p0, Vec2 p1, Vec2 p2, double a0, double a1,
                       double a2) {
  Eigen::Matrix2d E;
  E.row(0) = (p1 - p0).transpose();
  E.row(1) = (p2 - p0).transpose();
  return E.partialPivLu().solve(Vec2(a1 - a0, a2 - a0));
}

// Corner values of a global 3D linear function, indexed by beveled corner.
Eigen::VectorXd linear_corner_values(const SurfaceMesh& m, const Vec3& grad,
                                     double offset) {
  Eigen::VectorXd alpha(m.n_halfedges());
  for (int c = 0; c < m.n_halfedges(); ++c)
    alpha[c] = grad.dot(m.V.row(m.tail(c))) + offset;
  return alpha;
}

}  // namespace

TEST_CASE("flap rows integrate the gradient of continuous linear functions") {
  std::mt19937 rng(7101);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Built t = build(testutil::random_flap(rng), 1.0);
    int e = t.m.interior_edges[0];
    FlapGeometry fl = flatten_flap(t.m, e);

    Vec3 grad(coef(rng), coef(rng), coef(rng));
    Eigen::VectorXd alpha = linear_corner_values(t.m, grad, coef(rng));
    Eigen::VectorXd beta = t.ops.d0 * alpha;
    Eigen::VectorXd got = t.disc.D * beta;

    Vec2 expected = Vec2::Zero();
    for (int face : {fl.f, fl.g}) {
      int h = 3 * face;
      Vec2 p0 = detail::flap_position(t.m, fl, h);
      Vec2 p1 = detail::flap_position(t.m, fl, h + 1);
      Vec2 p2 = detail::flap_position(t.m, fl, h + 2);
      expected += t.m.face_area[face] *
                  triangle_gradient(p0, p1, p2, alpha[h], alpha[h + 1],
                                    alpha[h + 2]);
    }
    REQUIRE(got.size() == 2);
    REQUIRE(std::abs(got[0] - expected.x()) < 1e-10);
    REQUIRE(std::abs(got[1] - expected.y()) < 1e-10);
  }
}

TEST_CASE("constant corner values have zero flap integrals") {
  std::mt19937 rng(7102);
  Built t = build(testutil::random_flap(rng), 50.0);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(t.m.n_halfedges(), 3.25);
  Eigen::VectorXd got = t.disc.D * (t.ops.d0 * alpha);
  REQUIRE(got.norm() == Approx(0.0).margin(1e-12));
}

TEST_CASE("a pure jump integrates to the penalized edge normal") {
  double lambda_j = 50.0, c = 0.75;
  Built t = build(testutil::flap(2.0, 0.6, 1.1, 1.2, -0.9), lambda_j);
  int e = t.m.interior_edges[0];
  FlapGeometry fl = flatten_flap(t.m, e);

  // Face f holds value c, face g holds zero: both stored f->g jumps carry -c.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(t.m.n_halfedges());
  for (int s = 0; s < 3; ++s) alpha[3 * fl.f + s] = c;
  Eigen::VectorXd beta = t.ops.d0 * alpha;
  for (int h = 0; h < t.b.n_split; ++h) REQUIRE(beta[h] == Approx(0.0).margin(0));

  Eigen::VectorXd got = t.disc.D * beta;
  double len = (fl.pi - fl.pk).norm();
  REQUIRE(got[0] == Approx(0.0).margin(1e-12));
  REQUIRE(got[1] == Approx(lambda_j * c * len).epsilon(1e-12));
}

TEST_CASE("every flap row touches its six splits and two jumps") {
  Built t = build(testutil::disk_fan(6, 0.3), 50.0);
  Eigen::MatrixXd D = Eigen::MatrixXd(t.disc.D);
  for (int r = 0; r < t.m.n_interior_edges(); ++r) {
    int e = t.m.interior_edges[r];
    FlapGeometry fl = flatten_flap(t.m, e);
    for (int row : {2 * r, 2 * r + 1}) {
      for (int col = 0; col < t.b.n_bev_edges; ++col) {
        bool in_flap = false;
        if (col < t.b.n_split) {
          int face = SurfaceMesh::face_of(col);
          in_flap = face == fl.f || face == fl.g;
        } else {
          in_flap = t.b.jump_edge(col) == e;
        }
        if (!in_flap) REQUIRE(D(row, col) == 0.0);
      }
    }
  }
}

TEST_CASE("corner Dirichlet energy of a planar linear function is exact") {
  Built t = build(testutil::grid(6, 5, 2.0, 1.6), 50.0);
  Vec3 grad(0.7, -1.3, 0.0);
  Eigen::VectorXd sigma = linear_corner_values(t.m, grad, 2.0);

  double flap_area = 0.0;
  for (int e : t.m.interior_edges) {
    int h = t.m.edge_halfedge[e];
    flap_area += t.m.face_area[SurfaceMesh::face_of(h)] +
                 t.m.face_area[SurfaceMesh::face_of(t.m.twin[h])];
  }
  double expected = grad.squaredNorm() * flap_area;
  double got = sigma.dot(t.disc.L * sigma);
  REQUIRE(got == Approx(expected).epsilon(1e-8));
}

TEST_CASE("smoothness metrics are symmetric positive semidefinite") {
  Built t = build(testutil::disk_fan(5, 0.2), 50.0);

  Eigen::MatrixXd Q = Eigen::MatrixXd(t.disc.Q);
  REQUIRE((Q - Q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(Q);
  REQUIRE(eq.eigenvalues().minCoeff() > -1e-10);

  Eigen::MatrixXd L = Eigen::MatrixXd(t.disc.L);
  REQUIRE((L - L.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(L);
  REQUIRE(el.eigenvalues().minCoeff() > -1e-10);

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(t.b.n_corners);
  REQUIRE((t.disc.L * ones).norm() == Approx(0.0).margin(1e-12));
}

TEST_CASE("the smoothness metric is invariant to rigid motion") {
  std::mt19937 rng(7103);
  testutil::MeshData flat = testutil::flap(1.7, 0.4, 1.2, 0.9, -1.0);
  testutil::MeshData moved = flat;
  Eigen::Matrix3d R =
      Eigen::AngleAxisd(1.1, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (auto& p : moved.V) p = R * p + Vec3(4.0, -1.0, 2.5);

  Built a = build(flat, 50.0);
  Built b = build(moved, 50.0);
  Eigen::MatrixXd diff = Eigen::MatrixXd(a.disc.Q) - Eigen::MatrixXd(b.disc.Q);
  REQUIRE(diff.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dual edge weights match the equilateral closed form") {
  // Two unit equilateral triangles: l = 1, A(f) + A(g) = sqrt(3)/2, so the
  // weight is 3 / (sqrt(3)/2) = 2 sqrt(3).
  testutil::MeshData d;
  double h = std::sqrt(3.0) / 2.0;
  d.V = {{0, 0, 0}, {1, 0, 0}, {0.5, h, 0}, {0.5, -h, 0}};
  d.F = {{0, 1, 2}, {1, 0, 3}};
  SurfaceMesh m = testutil::make(d);
  Eigen::VectorXd w = index_mass(m);
  REQUIRE(w.size() == 1);
  REQUIRE(w[0] == Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));

  Eigen::MatrixXd L2 = Eigen::MatrixXd(build_index_laplacian(m));
  REQUIRE(L2(0, 0) == Approx(w[0]));
  REQUIRE(L2(1, 1) == Approx(w[0]));
  REQUIRE(L2(0, 1) == Approx(-w[0]));
  REQUIRE(L2(1, 0) == Approx(-w[0]));
}

TEST_CASE("the face Laplacian is a weighted graph Laplacian on closed meshes") {
  SurfaceMesh m = testutil::make(testutil::icosphere(1));
  Eigen::MatrixXd L2 = Eigen::MatrixXd(build_index_laplacian(m));
  REQUIRE((L2 - L2.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE((L2 * Eigen::VectorXd::Ones(m.n_faces())).norm() <
          1e-10 * L2.diagonal().norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(L2);
  REQUIRE(e.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("singular operators slice flap rows and add face rows") {
  double lambda_j = 50.0;
  Built t = build(testutil::disk_fan(5, 0.25), lambda_j);
  int center = 0;  // disk_fan puts the apex first, its star is interior
  REQUIRE(!t.m.vertex_on_boundary[center]);

  std::vector<int> spokes;
  for (int o : t.m.vertex_star_out_halfedges(center))
    spokes.push_back(t.m.halfedge_edge[o]);
  int face = 2;
  SingularOperators s = build_singular_operators(t.m, t.b, lambda_j, {center},
                                                 {}, {face});
  REQUIRE(s.D_S.rows() == long(2 * spokes.size() + 2));
  REQUIRE(s.mass.size() == s.D_S.rows());

  // Vertex block: exactly the flap rows of the spoke edges.
  Eigen::MatrixXd DS = Eigen::MatrixXd(s.D_S);
  Eigen::MatrixXd D = Eigen::MatrixXd(t.disc.D);
  for (size_t k = 0; k < spokes.size(); ++k) {
    int r = t.m.interior_edge_index[spokes[k]];
    REQUIRE((DS.row(2 * k) - D.row(2 * r)).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE((DS.row(2 * k + 1) - D.row(2 * r + 1)).cwiseAbs().maxCoeff() <
            1e-14);
    int h = t.m.edge_halfedge[spokes[k]];
    double area = t.m.face_area[SurfaceMesh::face_of(h)] +
                  t.m.face_area[SurfaceMesh::face_of(t.m.twin[h])];
    REQUIRE(s.mass[2 * k] == Approx(1.0 / area));
  }

  // Face block: integrates the in-face gradient of a linear function.
  Vec3 grad(0.9, 0.4, 0.0);
  Eigen::VectorXd alpha = linear_corner_values(t.m, grad, -1.0);
  Eigen::VectorXd got = s.D_S * (t.ops.d0 * alpha);
  cplx g2 = t.m.to_basis(face, grad);
  long fr = s.D_S.rows() - 2;
  REQUIRE(got[fr] == Approx(t.m.face_area[face] * g2.real()).margin(1e-12));
  REQUIRE(got[fr + 1] == Approx(t.m.face_area[face] * g2.imag()).margin(1e-12));
  REQUIRE(s.mass[fr] == Approx(1.0 / t.m.face_area[face]));
}
