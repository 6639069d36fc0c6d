#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bevel.h"
#include "exponents.h"
#include "integrate.h"
#include "surface_mesh.h"

namespace polarfield {

// One face of a piecewise power-linear field: the stored corners are values
// of the root linear field in the face basis, together with its coefficients
// a z + b zbar + c and the power the root is raised to.
struct FaceField {
  std::array<cplx, 3> corner{{cplx(0, 0), cplx(0, 0), cplx(0, 0)}};
  cplx a{0, 0}, b{0, 0}, c{0, 0};
  int exponent = 1;
};

struct PowerLinearField {
  int N = 1;
  std::vector<FaceField> faces;
};

// Corner positions of a face in its own basis, with the first corner at the
// origin. All face-local complex coordinates in this header use this frame.
inline std::array<cplx, 3> face_corner_positions(const SurfaceMesh& m, int f) {
  Vec3 p0 = m.V.row(m.tail(3 * f)).transpose();
  std::array<cplx, 3> z;
  z[0] = cplx(0.0, 0.0);
  for (int c : {1, 2}) {
    Vec3 d = m.V.row(m.tail(3 * f + c)).transpose() - p0;
    z[c] = m.to_basis(f, d);
  }
  return z;
}

inline cplx point_of_bary(const SurfaceMesh& m, int f,
                          const std::array<double, 3>& bary) {
  std::array<cplx, 3> z = face_corner_positions(m, f);
  return bary[0] * z[0] + bary[1] * z[1] + bary[2] * z[2];
}

inline std::array<double, 3> bary_of_point(const SurfaceMesh& m, int f, cplx s) {
  std::array<cplx, 3> z = face_corner_positions(m, f);
  cplx e1 = z[1] - z[0], e2 = z[2] - z[0], d = s - z[0];
  double det = e1.real() * e2.imag() - e1.imag() * e2.real();
  double b1 = (d.real() * e2.imag() - d.imag() * e2.real()) / det;
  double b2 = (e1.real() * d.imag() - e1.imag() * d.real()) / det;
  return {1.0 - b1 - b2, b1, b2};
}

// Unique linear interpolant a z + b zbar + c of three corner values. The
// interpolation problem is complex-linear in (a, b, c), so one 3x3 solve.
inline std::array<cplx, 3> face_coefficients(const std::array<cplx, 3>& u,
                                             const std::array<cplx, 3>& z) {
  Eigen::Matrix3cd M;
  Eigen::Vector3cd rhs;
  double scale = 0.0;
  for (int c = 0; c < 3; ++c) {
    M(c, 0) = z[c];
    M(c, 1) = std::conj(z[c]);
    M(c, 2) = cplx(1.0, 0.0);
    rhs[c] = u[c];
    scale = std::max(scale, std::abs(z[c]));
  }
  Eigen::FullPivLU<Eigen::Matrix3cd> lu(M);
  // The determinant is proportional to the signed area of the triangle.
  if (std::abs(lu.determinant()) <= 1e-12 * std::max(1.0, scale * scale))
    throw SolverError("DegenerateTriangle: collinear corners leave the "
                      "linear interpolant underdetermined");
  Eigen::Vector3cd x = lu.solve(rhs);
  return {x[0], x[1], x[2]};
}

enum class FieldClass { Elliptic, Hyperbolic, Parabolic };

struct Classification {
  FieldClass kind = FieldClass::Parabolic;
  double det = 0.0;  // |a|^2 - |b|^2, the Jacobian determinant of the root
};

inline Classification classify(cplx a, cplx b) {
  Classification out;
  double na = std::abs(a), nb = std::abs(b);
  out.det = na * na - nb * nb;
  if (std::abs(na - nb) <= 1e-9 * (na + nb))
    out.kind = FieldClass::Parabolic;
  else
    out.kind = na > nb ? FieldClass::Elliptic : FieldClass::Hyperbolic;
  return out;
}

// Zero set of a z + b zbar + c: the generic case is one point, a parabolic
// field can vanish on a line, and a nonzero constant never vanishes.
struct ZeroSet {
  enum class Kind { Point, None, Line } kind = Kind::None;
  cplx point{0, 0};     // the zero, or a point on the line
  cplx direction{0, 0}; // unit line direction when kind == Line
};

inline ZeroSet locate_singularity(cplx a, cplx b, cplx c) {
  ZeroSet out;
  double na = std::abs(a), nb = std::abs(b);
  if (na == 0.0 && nb == 0.0) {
    if (std::abs(c) == 0.0) {
      out.kind = ZeroSet::Kind::Line;  // the whole plane; direction left zero
      return out;
    }
    out.kind = ZeroSet::Kind::None;
    return out;
  }
  // Real 2x2 system in z = x + i y: columns (a + b) and i(a - b).
  cplx cx = a + b, cy = cplx(0, 1) * (a - b);
  double det = cx.real() * cy.imag() - cx.imag() * cy.real();
  double scale = sqr(na + nb);
  if (std::abs(det) > 1e-9 * scale) {
    double x = (-c.real() * cy.imag() + c.imag() * cy.real()) / det;
    double y = (-cx.real() * c.imag() + cx.imag() * c.real()) / det;
    out.kind = ZeroSet::Kind::Point;
    out.point = cplx(x, y);
    return out;
  }
  // Rank one: both rows proportional. Solve along the dominant row and test
  // the other for consistency.
  Vec2 r0(cx.real(), cy.real()), r1(cx.imag(), cy.imag());
  Vec2 rhs(-c.real(), -c.imag());
  bool first = r0.norm() >= r1.norm();
  Vec2 rd = first ? r0 : r1;
  double rv = first ? rhs[0] : rhs[1];
  Vec2 ro = first ? r1 : r0;
  double ov = first ? rhs[1] : rhs[0];
  Vec2 part = rd * (rv / rd.squaredNorm());
  if (std::abs(ro.dot(part) - ov) > 1e-9 * (scale + std::abs(c))) {
    out.kind = ZeroSet::Kind::None;  // parallel lines, no intersection
    return out;
  }
  out.kind = ZeroSet::Kind::Line;
  out.point = cplx(part[0], part[1]);
  Vec2 dir(-rd[1], rd[0]);
  dir.normalize();
  out.direction = cplx(dir[0], dir[1]);
  return out;
}

// Value of one branch of the N-directional field at a barycentric point:
// blend the root corners, raise to the face power, then pick the branch-th
// N-th root (branch 0 is the principal root with argument in (-pi/N, pi/N]).
inline cplx evaluate(const PowerLinearField& field, int f,
                     const std::array<double, 3>& bary, int branch = 0) {
  const FaceField& ff = field.faces[f];
  if (branch < 0 || branch >= field.N)
    throw SolverError("OutOfRangeParameter: branch " + std::to_string(branch) +
                      " for symmetry " + std::to_string(field.N));
  cplx root = bary[0] * ff.corner[0] + bary[1] * ff.corner[1] +
              bary[2] * ff.corner[2];
  if (std::abs(root) == 0.0) {
    if (ff.exponent < 0 || ff.exponent % field.N != 0)
      throw SolverError("ZeroAtFractionalPower: face " + std::to_string(f) +
                        " is singular at the evaluation point");
    return cplx(0.0, 0.0);
  }
  cplx power = ipow(root, ff.exponent);
  if (field.N == 1) return power;
  double mag = std::pow(std::abs(power), 1.0 / field.N);
  double ang = std::arg(power) / field.N + TWO_PI * branch / field.N;
  return std::polar(mag, ang);
}

// Gradient of the phase of u(z) = a z + b zbar + c along the two basis axes.
inline Vec2 pointwise_phase_gradient(cplx a, cplx b, cplx c, cplx z) {
  cplx u = a * z + b * std::conj(z) + c;
  double n2 = std::norm(u);
  if (n2 == 0.0)
    throw SolverError("AtSingularity: phase gradient undefined at a zero");
  cplx cu = std::conj(u);
  return Vec2(std::imag((a + b) * cu) / n2, std::real((a - b) * cu) / n2);
}

// A closed walk used by the winding oracle: consecutive samples either share
// a face or sit on the common edge of two adjacent faces.
struct PathSample {
  int face = -1;
  std::array<double, 3> bary{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
};

struct WindingNumber {
  int numerator = 0;
  int denominator = 1;
  double raw = 0.0;  // accumulated branch phase / 2 pi before rounding
};

namespace detail {

// Wraps an angle into (-pi/n, pi/n]: phase continuation picks the nearest of
// the n symmetry branches.
inline double wrap_branch(double ang, int n) {
  double period = TWO_PI / n;
  ang = std::fmod(ang, period);
  if (ang <= -0.5 * period) ang += period;
  if (ang > 0.5 * period) ang -= period;
  return ang;
}

inline double branch_phase(const PowerLinearField& field, const PathSample& s) {
  cplx v = evaluate(field, s.face, s.bary, 0);
  if (std::abs(v) == 0.0)
    throw SolverError("AtSingularity: winding path touches a zero");
  return std::arg(v);
}

// Phase advance between two samples in the same face, bisecting until each
// sub-step moves the branch phase by less than a quarter branch period.
inline double face_step(const PowerLinearField& field, const PathSample& s0,
                        const PathSample& s1, int depth) {
  int n = field.N;
  double d = wrap_branch(branch_phase(field, s1) - branch_phase(field, s0), n);
  if (std::abs(d) < 0.5 * PI / n) return d;
  if (depth >= 48)
    throw SolverError("UnderResolvedPath: phase step stays above a quarter "
                      "period after maximum refinement");
  PathSample mid = s0;
  for (int c = 0; c < 3; ++c) mid.bary[c] = 0.5 * (s0.bary[c] + s1.bary[c]);
  return face_step(field, s0, mid, depth + 1) +
         face_step(field, mid, s1, depth + 1);
}

inline int shared_edge(const SurfaceMesh& m, int f, int g) {
  for (int c = 0; c < 3; ++c) {
    int t = m.twin[3 * f + c];
    if (t >= 0 && SurfaceMesh::face_of(t) == g) return m.halfedge_edge[3 * f + c];
  }
  throw SolverError("UnderResolvedPath: consecutive path samples sit in "
                    "non-adjacent faces " + std::to_string(f) + " and " +
                    std::to_string(g));
}

}  // namespace detail

// Total turning of the directional field along a closed walk, as a multiple
// of 1/N full turns. Within faces the branch phase is accumulated with
// adaptive bisection; where the walk crosses an edge, the nearest branch is
// continued across the frame change, so the accumulated angle is the turning
// relative to parallel transport. A walk that encircles vertices must pass
// their summed angle defect, which closes the total to the index; walks that
// stay clear of vertices (circles inside one face, small circuits around an
// edge point) enclose no curvature and keep the default of zero.
inline WindingNumber winding_number(const SurfaceMesh& m,
                                    const PowerLinearField& field,
                                    const std::vector<PathSample>& path,
                                    double enclosed_defect = 0.0) {
  if (path.size() < 3)
    throw SolverError("UnderResolvedPath: a closed walk needs at least three "
                      "samples");
  int N = field.N;
  double total = enclosed_defect;
  for (size_t k = 0; k < path.size(); ++k) {
    const PathSample& s0 = path[k];
    const PathSample& s1 = path[(k + 1) % path.size()];
    if (s0.face == s1.face) {
      total += detail::face_step(field, s0, s1, 0);
      continue;
    }
    int e = detail::shared_edge(m, s0.face, s1.face);
    int h0 = m.edge_halfedge[e];
    double r = m.connection(e);  // rotates face_of(h0) frames into the twin's
    if (SurfaceMesh::face_of(h0) != s0.face) r = -r;
    double d = detail::branch_phase(field, s1) -
               detail::branch_phase(field, s0) - r;
    total += detail::wrap_branch(d, N);
  }
  WindingNumber out;
  out.denominator = N;
  out.raw = total / TWO_PI;
  double scaled = out.raw * N;
  out.numerator = int(std::lround(scaled));
  if (std::abs(scaled - out.numerator) > 1e-2)
    throw SolverError("UnderResolvedPath: accumulated winding " +
                      std::to_string(out.raw) + " is not a multiple of 1/" +
                      std::to_string(N));
  return out;
}

// Per-face-averaged smoothness of a beveled phase form.
inline double dirichlet_energy(const Eigen::VectorXd& theta, const SparseD& Q,
                               int n_faces) {
  return theta.dot(Q * theta) / double(n_faces);
}

// Builds the per-face root fields out of the integrated corner values: the
// power-field magnitudes and the solved split phases are divided by the face
// power, anchored at the principal argument of the first corner.
inline PowerLinearField reconstruct_field(const SurfaceMesh& m,
                                          const BeveledMesh& b,
                                          const IntegratedField& u,
                                          const Eigen::VectorXd& theta,
                                          const std::vector<int>& exponent,
                                          int N) {
  PowerLinearField field;
  field.N = N;
  field.faces.resize(m.n_faces());
  for (int f = 0; f < m.n_faces(); ++f) {
    FaceField& ff = field.faces[f];
    int p = std::max(1, std::abs(f < int(exponent.size()) ? exponent[f] : 1));
    ff.exponent = p;
    double phase = std::arg(u.corner[3 * f]);
    for (int c = 0; c < 3; ++c) {
      double mag = std::pow(std::abs(u.corner[3 * f + c]), 1.0 / p);
      ff.corner[c] = std::polar(mag, phase / p);
      if (c < 2) phase += theta[b.split_id(3 * f + c)];
    }
    auto abc = face_coefficients(ff.corner, face_corner_positions(m, f));
    ff.a = abc[0];
    ff.b = abc[1];
    ff.c = abc[2];
  }
  return field;
}

}  // namespace polarfield
