#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bevel.h"
#include "prescription.h"
#include "surface_mesh.h"

namespace polarfield {

// Phase differences between a singular point on an edge and the four flap
// corners, split per side. With the flap unfolded, corner phases are
// integrated from solved theta and the singular phase psi_sf is placed at
// the midpoint of its feasible range; the g side carries psi_sf - I_e pi.
// Both half-cycles of the edge-face then sum to exactly pi I_e.
struct PartEdgeTheta {
  int edge = -1;
  double t = 0.5;
  int index = 0;
  double theta_sk_f = 0.0;  // s -> k on the f side
  double theta_is_f = 0.0;  // i -> s on the f side
  double theta_ks_g = 0.0;  // k -> s on the g side
  double theta_si_g = 0.0;  // s -> i on the g side
  double psi_sf = 0.0;      // selected singular phase, f-side gauge
  double feasible_lo = 0.0, feasible_hi = 0.0;
};

inline PartEdgeTheta compute_part_edge_theta(const SurfaceMesh& m,
                                             const BeveledMesh& b,
                                             const Eigen::VectorXd& theta,
                                             int e, double t, int index) {
  FlapGeometry fl = flatten_flap(m, e);
  double th_h0 = theta[b.split_id(fl.h0)];
  double th_h1 = theta[b.split_id(fl.h1)];
  double th_j1 = theta[b.jump_id(e, 1)];

  // Corner phases on the unfolded flap, integrated from the k corner of f
  // through the head jump; the tail jump is implied by the cycle sum.
  double psi_kf = 0.0;
  double psi_if = psi_kf + th_h0;
  double psi_ig = psi_if + th_j1;
  double psi_kg = psi_ig + th_h1;

  double shift = index * PI;
  double lo = std::max(std::min(psi_if, psi_kf),
                       std::min(psi_kg + shift, psi_ig + shift));
  double hi = std::min(std::max(psi_if, psi_kf),
                       std::max(psi_kg + shift, psi_ig + shift));
  if (!(hi - lo > 0.0))
    throw SolverError("EmptyFeasibleRange: no singular phase on edge " +
                      std::to_string(e) + " fits the solved field");

  PartEdgeTheta out;
  out.edge = e;
  out.t = t;
  out.index = index;
  out.feasible_lo = lo;
  out.feasible_hi = hi;
  out.psi_sf = 0.5 * (lo + hi);
  double psi_sg = out.psi_sf - shift;
  out.theta_sk_f = psi_kf - out.psi_sf;
  out.theta_is_f = out.psi_sf - psi_if;
  out.theta_ks_g = psi_sg - psi_kg;
  out.theta_si_g = psi_ig - psi_sg;
  return out;
}

// Relative corner scales that put the zero of a power face field at the
// prescribed barycentric point. The underlying linear field is the |index|-th
// root, so the vanishing condition lives on root phases and root scales; the
// kernel of the 2x3 root system is raised back to the power at the end.
inline std::array<double, 3> face_scale_targets(const SurfaceMesh& m,
                                                const BeveledMesh& b,
                                                const Eigen::VectorXd& theta,
                                                int f,
                                                const std::array<double, 3>& bary,
                                                int index) {
  double power = std::max(1, std::abs(index));
  double psi0 = 0.0;
  double psi1 = psi0 + theta[b.split_id(3 * f)] / power;
  double psi2 = psi1 + theta[b.split_id(3 * f + 1)] / power;
  Vec3 r1(bary[0] * std::cos(psi0), bary[1] * std::cos(psi1),
          bary[2] * std::cos(psi2));
  Vec3 r2(bary[0] * std::sin(psi0), bary[1] * std::sin(psi1),
          bary[2] * std::sin(psi2));
  Vec3 kernel = r1.cross(r2);
  int imax;
  kernel.cwiseAbs().maxCoeff(&imax);
  if (kernel[imax] == 0.0)
    throw SolverError("MixedSignKernel: degenerate scale system on face " +
                      std::to_string(f));
  kernel /= kernel[imax];
  if (kernel.minCoeff() <= 0.0)
    throw SolverError("MixedSignKernel: face " + std::to_string(f) +
                      " scale kernel cannot be made positive; the phase "
                      "does not wind around the prescribed point");
  return {std::pow(kernel[0], power), std::pow(kernel[1], power),
          std::pow(kernel[2], power)};
}

// Pairwise corner-scale proportionality rows sigma_a sigma^b - sigma_b
// sigma^a = 0 over beveled corners, from face kernels and part-edge phases.
struct ScaleConstraints {
  SparseD C;  // rows x n_corners
  std::vector<std::pair<Singularity::Kind, int>> provenance;  // per row
};

namespace detail {

// One proportionality row between two corners with constants (sa, sb).
inline void scale_row(std::vector<Triplet>& trips, int& row, int corner_a,
                      int corner_b, double sa, double sb) {
  trips.emplace_back(row, corner_a, sb);
  trips.emplace_back(row, corner_b, -sa);
  ++row;
}

// Proportionality constants for one side of a split edge: the zero sits at
// parameter t from corner k toward corner i, with phases theta_sk / theta_is
// relative to the singular phase. The sine law holds for the root linear
// field, so callers pass root phases and the constants are raised back to
// the edge power.
inline std::pair<double, double> edge_side_constants(double t, double theta_sk,
                                                     double theta_is,
                                                     int power = 1) {
  double sk = std::pow(t * std::sin(theta_is), power);
  double si = std::pow((1.0 - t) * std::sin(theta_sk), power);
  return {sk, si};
}

}  // namespace detail

inline ScaleConstraints assemble_scale_constraints(
    const SurfaceMesh& m, const BeveledMesh& b,
    const std::vector<PartEdgeTheta>& part_edges,
    const std::vector<std::pair<int, std::array<double, 3>>>& face_kernels) {
  std::vector<Triplet> trips;
  ScaleConstraints out;
  int row = 0;
  for (const auto& [f, s] : face_kernels) {
    detail::scale_row(trips, row, 3 * f, 3 * f + 1, s[0], s[1]);
    detail::scale_row(trips, row, 3 * f + 1, 3 * f + 2, s[1], s[2]);
    out.provenance.emplace_back(Singularity::Kind::Face, f);
    out.provenance.emplace_back(Singularity::Kind::Face, f);
  }
  for (const PartEdgeTheta& pe : part_edges) {
    FlapGeometry fl = flatten_flap(m, pe.edge);
    int power = std::max(1, std::abs(pe.index));
    auto [skf, sif] = detail::edge_side_constants(
        pe.t, pe.theta_sk_f / power, pe.theta_is_f / power, power);
    detail::scale_row(trips, row, fl.h0, SurfaceMesh::next(fl.h0), skf, sif);
    auto [skg, sig] = detail::edge_side_constants(
        pe.t, -pe.theta_ks_g / power, -pe.theta_si_g / power, power);
    detail::scale_row(trips, row, SurfaceMesh::next(fl.h1), fl.h1, skg, sig);
    out.provenance.emplace_back(Singularity::Kind::Edge, pe.edge);
    out.provenance.emplace_back(Singularity::Kind::Edge, pe.edge);
  }
  out.C.resize(row, b.n_corners);
  out.C.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace polarfield
