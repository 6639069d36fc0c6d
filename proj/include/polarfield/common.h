#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Sparse>

namespace polarfield {

using SparseD = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;

constexpr double PI = 3.14159265358979323846;
constexpr double TWO_PI = 2.0 * PI;

// Errors carry a short machine-readable code in what() prefix, e.g. "NonManifold: ...".
struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& m) : std::runtime_error(m) {}
};
struct PrescriptionError : std::runtime_error {
  explicit PrescriptionError(const std::string& m) : std::runtime_error(m) {}
};
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& m) : std::runtime_error(m) {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, TWO_PI);
  if (a <= -PI) a += TWO_PI;
  if (a > PI) a -= TWO_PI;
  return a;
}

inline double sqr(double x) { return x * x; }

// Integer power by repeated multiplication; exact branch behavior for complex bases.
inline cplx ipow(cplx base, int n) {
  if (n < 0) return 1.0 / ipow(base, -n);
  cplx r(1.0, 0.0);
  while (n > 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

}  // namespace polarfield
