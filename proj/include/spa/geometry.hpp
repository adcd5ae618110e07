// Quaternion poses, superquadric primitives, and their hand-derived gradients.
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace spa {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double squared_dist(const Vec3& a, const Vec3& b) {
  return (a - b).squared_norm();
}

using Mat3 = std::array<std::array<double, 3>, 3>;

struct Quat {
  double w = 1, x = 0, y = 0, z = 0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
};

// Fails on the zero quaternion ("degenerate rotation"); otherwise renormalizes
// internally so callers may hand in slightly drifted components.
Mat3 quat_to_rotation(const Quat& q);

struct Pose {
  Quat q;
  Vec3 t;
};

Vec3 pose_apply(const Pose& T, const Vec3& x);          // R(q) x + t
Vec3 pose_inverse_apply(const Pose& T, const Vec3& y);  // R(q)^T (y - t)

struct Superquadric {
  Vec3 alpha{1, 1, 1};       // semi-axis scales, all > 0
  double eps1 = 1, eps2 = 1; // shape exponents, clamped to [0.1, 1.9]
  double taper_x = 0, taper_y = 0; // linear taper along z, in [-0.9, 0.9]

  void clamp();
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<int> labels; // empty, or one part index per point

  int size() const { return static_cast<int>(points.size()); }
  bool has_labels() const { return !labels.empty(); }
};

// Eq-style parametric surface with signed fractional powers, taper applied last.
Vec3 sq_surface_point(const Superquadric& p, double eta, double omega);

// Inside-outside function F: <1 inside, =1 on surface, >1 outside.
// Taper is inverted before evaluating F.
double sq_implicit(const Superquadric& p, const Vec3& x);

// Radially normalized indicator H = F^{eps1}; shares F's level sets.
double sq_indicator(const Superquadric& p, const Vec3& x);

// Radial point-to-surface approximation ||x|| |1 - F^{-eps1/2}|.
// x = 0 returns min(alpha) by convention.
double sq_radial_distance(const Superquadric& p, const Vec3& x);

// Deterministic (eta, omega) grid of n angle pairs covering the full ranges.
std::vector<std::pair<double, double>> sq_surface_grid(int n);

// n surface points on a jittered angle grid; deterministic for a given rng state.
PointCloud sq_sample_surface(const Superquadric& p, int n, std::mt19937_64& rng);

// ---- gradients ------------------------------------------------------------

struct PrimGrad {
  Vec3 d_alpha;
  double d_eps1 = 0, d_eps2 = 0;
  double d_taper_x = 0, d_taper_y = 0;

  PrimGrad& operator+=(const PrimGrad& o) {
    d_alpha += o.d_alpha;
    d_eps1 += o.d_eps1; d_eps2 += o.d_eps2;
    d_taper_x += o.d_taper_x; d_taper_y += o.d_taper_y;
    return *this;
  }
  PrimGrad& scale(double s) {
    d_alpha *= s; d_eps1 *= s; d_eps2 *= s; d_taper_x *= s; d_taper_y *= s;
    return *this;
  }
};

struct PoseGrad {
  std::array<double, 4> d_q{0, 0, 0, 0}; // w, x, y, z order
  Vec3 d_t;
};

// Accumulates d(loss)/d{q,t,x} for y = pose_apply(T, x) given d(loss)/dy.
// Gradients w.r.t. q are projected through the internal normalization.
void pose_apply_backward(const Pose& T, const Vec3& x, const Vec3& dy,
                         PoseGrad& dT, Vec3* dx);

// Same for a = pose_inverse_apply(T, y); dy_in receives d(loss)/dy if non-null.
void pose_inverse_apply_backward(const Pose& T, const Vec3& y, const Vec3& da,
                                 PoseGrad& dT, Vec3* dy_in);

// Accumulates d(loss)/d(primitive params) for r = sq_surface_point(p, eta, omega).
void sq_surface_point_backward(const Superquadric& p, double eta, double omega,
                               const Vec3& dr, PrimGrad& dp);

// F plus accumulation of dF-weighted gradients into dp and dx.
double sq_implicit_grad(const Superquadric& p, const Vec3& x, double dF,
                        PrimGrad& dp, Vec3* dx);

// H = F^{eps1} with gradient accumulation.
double sq_indicator_grad(const Superquadric& p, const Vec3& x, double dH,
                         PrimGrad& dp, Vec3* dx);

// Squared radial distance (the loss-side form) with gradient accumulation.
double sq_radial_sq_grad(const Superquadric& p, const Vec3& x, double dl,
                         PrimGrad& dp, Vec3* dx);

} // namespace spa
