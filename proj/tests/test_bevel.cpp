#include <catch2/catch_amalgamated.hpp>

#include "polarfield/bevel.h"
#include "testutil.h"

using namespace polarfield;
using Catch::Matchers::WithinAbs;

namespace {

struct Built {
  SurfaceMesh m;
  BeveledMesh b;
  CycleOperators ops;
};

Built build(const testutil::MeshData& d) {
  Built r{testutil::make(d), {}, {}};
  r.b = build_bevel(r.m);
  r.ops = build_cycle_operators(r.m, r.b);
  return r;
}

// 1-form carrying the edge transport angle on jump edges, zero on splits
Eigen::VectorXd transport_form(const Built& r) {
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(r.b.n_bev_edges);
  for (int e : r.m.interior_edges) {
    tau[r.b.jump_id(e, 0)] = r.m.connection[e];
    tau[r.b.jump_id(e, 1)] = r.m.connection[e];
  }
  return tau;
}

double max_abs(const SparseD& A) {
  double mx = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseD::InnerIterator it(A, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

}  // namespace

TEST_CASE("beveled element counts") {
  auto r = build(testutil::icosphere(1));
  int nf = r.m.n_faces(), nei = r.m.n_interior_edges();
  int nvi = static_cast<int>(r.b.interior_vertices.size());
  REQUIRE(r.b.n_corners == 3 * nf);
  REQUIRE(r.b.n_bev_edges == 3 * nf + 2 * nei);
  REQUIRE(r.b.n_bev_faces == nf + nei + nvi);
  REQUIRE(nvi == r.m.n_vertices());  // closed mesh

  auto rb = build(testutil::grid(4, 3));
  REQUIRE(rb.b.n_bev_faces ==
          rb.m.n_faces() + rb.m.n_interior_edges() +
              static_cast<int>(rb.b.interior_vertices.size()));
  for (int v : rb.b.interior_vertices) REQUIRE_FALSE(rb.m.vertex_on_boundary[v]);
}

TEST_CASE("cycle operators compose to zero") {
  std::vector<testutil::MeshData> meshes = {testutil::icosphere(1), testutil::torus(8, 5),
                                            testutil::genus2(),     testutil::grid(5, 4),
                                            testutil::annulus(9),   testutil::flap()};
  for (const auto& d : meshes) {
    auto r = build(d);
    REQUIRE(max_abs(SparseD((r.ops.d1 * r.ops.d0).pruned())) == 0.0);
    if (r.ops.H.rows() > 0)
      REQUIRE(max_abs(SparseD((r.ops.H * r.ops.d0).pruned())) == 0.0);
    if (r.ops.B.rows() > 0)
      REQUIRE(max_abs(SparseD((r.ops.B * r.ops.d0).pruned())) == 0.0);
  }
}

TEST_CASE("face cycles sum to zero on closed meshes") {
  for (auto d : {testutil::icosphere(1), testutil::torus(8, 5), testutil::genus2(),
                 testutil::tetrahedron()}) {
    auto r = build(d);
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Ones(r.ops.d1.rows()) * r.ops.d1;
    REQUIRE(sum.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("face cycles cancel against the boundary cycles on bounded meshes") {
  for (auto d : {testutil::grid(5, 4), testutil::annulus(9), testutil::disk_fan(6),
                 testutil::single_triangle()}) {
    auto r = build(d);
    Eigen::RowVectorXd fsum = Eigen::RowVectorXd::Ones(r.ops.d1.rows()) * r.ops.d1;
    Eigen::RowVectorXd bsum = Eigen::RowVectorXd::Ones(r.ops.B.rows()) * r.ops.B;
    REQUIRE((fsum + bsum).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("flap operators match hand-built tables") {
  auto r = build(testutil::flap());
  REQUIRE(r.b.n_bev_edges == 8);
  REQUIRE(r.b.n_bev_faces == 3);
  REQUIRE(r.b.jump_id(0, 0) == 6);
  REQUIRE(r.b.jump_id(0, 1) == 7);

  Eigen::MatrixXd d1 = Eigen::MatrixXd(r.ops.d1);
  Eigen::MatrixXd want(3, 8);
  want << 1, 1, 1, 0, 0, 0, 0, 0,
          0, 0, 0, 1, 1, 1, 0, 0,
         -1, 0, 0, -1, 0, 0, 1, -1;
  REQUIRE((d1 - want).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd d0 = Eigen::MatrixXd(r.ops.d0);
  Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(8, 6);
  auto row = [&](int be, int ct, int ch) {
    w0(be, ct) = -1;
    w0(be, ch) = 1;
  };
  row(0, 0, 1);
  row(1, 1, 2);
  row(2, 2, 0);
  row(3, 3, 4);
  row(4, 4, 5);
  row(5, 5, 3);
  row(6, 0, 4);  // jump at the tail of halfedge 0
  row(7, 1, 3);  // jump at its head
  REQUIRE((d0 - w0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vertex face rows reproduce the angle defect from edge transports") {
  auto check = [](const testutil::MeshData& d) {
    auto r = build(d);
    Eigen::VectorXd tau = transport_form(r);
    Eigen::VectorXd d1tau = r.ops.d1 * tau;
    auto kv = gaussian_curvature(r.m);
    int nf = r.m.n_faces(), nei = r.m.n_interior_edges();
    for (int i = 0; i < nf + nei; ++i) REQUIRE(r.ops.kappa_bar[i] == 0.0);
    for (int i = 0; i < nf; ++i) REQUIRE_THAT(d1tau[i], WithinAbs(0.0, 1e-14));
    for (int v : r.b.interior_vertices) {
      int row = r.b.vertex_face_of[v];
      REQUIRE_THAT(r.ops.kappa_bar[row], WithinAbs(kv[v], 1e-12));
      REQUIRE_THAT(wrap_angle(d1tau[row] - kv[v]), WithinAbs(0.0, 1e-9));
    }
  };
  check(testutil::icosphere(1));
  check(testutil::disk_fan(6, 0.7));
  auto g = testutil::grid(6, 5);
  testutil::jitter(g, 0.04, 11);
  check(g);
}

TEST_CASE("lifting a vertex ring measures transport and turning consistently") {
  auto d = testutil::icosphere(1);
  testutil::jitter(d, 0.02, 5);
  auto m = testutil::make(d);
  auto b = build_bevel(m);
  auto kv = gaussian_curvature(m);
  for (int v = 0; v < m.n_vertices(); ++v) {
    std::vector<int> ring;
    for (int o : m.vertex_star_out_halfedges(v)) ring.push_back(SurfaceMesh::next(o));
    std::vector<Triplet> trips;
    double kappa = 0.0;
    detail::lift_loop(m, b, ring, trips, 0, kappa);
    // turning of the ring polygon: Gauss-Bonnet on the star disk
    REQUIRE_THAT(kappa, WithinAbs(TWO_PI - kv[v], 1e-9));
    // signed transports across the crossed spokes accumulate the defect
    double rot = 0.0;
    for (const auto& t : trips)
      if (b.is_jump(static_cast<int>(t.col())))
        rot += t.value() * m.connection[b.jump_edge(static_cast<int>(t.col()))];
    REQUIRE_THAT(wrap_angle(rot - kv[v]), WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("boundary cycle turning matches the boundary angle defects") {
  auto check = [](const testutil::MeshData& d) {
    auto r = build(d);
    auto kv = gaussian_curvature(r.m);
    double boundary_defect = 0.0;
    for (int v = 0; v < r.m.n_vertices(); ++v)
      if (r.m.vertex_on_boundary[v]) boundary_defect += kv[v];
    REQUIRE_THAT(r.ops.kappa_B.sum(), WithinAbs(boundary_defect, 1e-9));
  };
  check(testutil::grid(5, 4));
  check(testutil::annulus(10));
  check(testutil::disk_fan(7));

  // flat annulus: the outer rim turns by 2 pi, the inner rim by -2 pi
  auto r = build(testutil::annulus(12));
  REQUIRE(r.ops.kappa_B.size() == 2);
  for (int i = 0; i < 2; ++i) {
    int v = r.m.tail(r.m.boundary_loops[i][0]);
    bool inner = r.m.V.row(v).norm() < 0.75;
    REQUIRE_THAT(r.ops.kappa_B[i], WithinAbs(inner ? -TWO_PI : TWO_PI, 1e-9));
  }
}

TEST_CASE("generator rows are unit coefficients over their lift") {
  auto r = build(testutil::torus(8, 5));
  REQUIRE(r.ops.H.rows() == 2);
  for (int k = 0; k < r.ops.H.outerSize(); ++k)
    for (SparseD::InnerIterator it(r.ops.H, k); it; ++it)
      REQUIRE(std::abs(it.value()) == 1.0);
  // each loop halfedge contributes its split edge with +1
  for (size_t i = 0; i < r.ops.generators.loop_halfedges.size(); ++i)
    for (int h : r.ops.generators.loop_halfedges[i])
      REQUIRE(r.ops.H.coeff(static_cast<int>(i), r.b.split_id(h)) == 1.0);
}

TEST_CASE("a fan blocked by the boundary falls back to the other side") {
  auto m = testutil::make(testutil::grid(4, 3));
  auto b = build_bevel(m);
  // find a boundary vertex with at least two incident faces
  int v = -1;
  for (int i = 0; i < m.n_vertices() && v < 0; ++i)
    if (m.vertex_on_boundary[i] && m.vertex_star_out_halfedges(i).size() >= 3) v = i;
  REQUIRE(v >= 0);
  auto star = m.vertex_star_out_halfedges(v);
  int h_in = SurfaceMesh::prev(star.front());  // arrives in the clockwise-most face
  int h_out = star.back();                     // leaves from the counterclockwise-most
  std::vector<Triplet> trips;
  double kappa = 0.0;
  detail::lift_across_vertex(m, b, h_in, h_out, trips, 0, kappa);

  double want_rot = 0.0, want_ang = 0.0;
  for (size_t a = 0; a + 1 < star.size(); ++a) {
    int q = SurfaceMesh::prev(star[a]);
    int e = m.halfedge_edge[q];
    want_rot += (m.edge_halfedge[e] == q) ? m.connection[e] : -m.connection[e];
  }
  for (int o : star) want_ang += m.corner_angle(o / 3, o % 3);

  double rot = 0.0;
  for (const auto& t : trips)
    rot += t.value() * m.connection[b.jump_edge(static_cast<int>(t.col()))];
  REQUIRE_THAT(rot, WithinAbs(want_rot, 1e-12));
  REQUIRE_THAT(kappa, WithinAbs(want_ang - PI, 1e-12));
}
