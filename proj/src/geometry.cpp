#include "spa/geometry.hpp"

#include <algorithm>

namespace spa {

namespace {

constexpr double kTiny = 1e-12;

// sign(t) |t|^e, zero (with zero subgradient) near t = 0
double spow(double t, double e) {
  const double a = std::abs(t);
  if (a < kTiny) return 0.0;
  const double v = std::pow(a, e);
  return t < 0 ? -v : v;
}

struct UnitQuat {
  double w, x, y, z; // normalized
  double inv_norm;   // 1/||q_raw||
};

UnitQuat normalize_quat(const Quat& q) {
  const double n = q.norm();
  if (n < 1e-15) throw std::invalid_argument("degenerate rotation");
  const double inv = 1.0 / n;
  return {q.w * inv, q.x * inv, q.y * inv, q.z * inv, inv};
}

Mat3 rotation_from_unit(const UnitQuat& u) {
  const double w = u.w, a = u.x, b = u.y, c = u.z;
  return Mat3{{{1 - 2 * (b * b + c * c), 2 * (a * b - w * c), 2 * (a * c + w * b)},
               {2 * (a * b + w * c), 1 - 2 * (a * a + c * c), 2 * (b * c - w * a)},
               {2 * (a * c - w * b), 2 * (b * c + w * a), 1 - 2 * (a * a + b * b)}}};
}

// dR/d(unit components), contracted against dR.
std::array<double, 4> rotation_backward_unit(const UnitQuat& u, const Mat3& dR) {
  const double w = u.w, a = u.x, b = u.y, c = u.z;
  auto contract = [&](const Mat3& J) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += J[i][j] * dR[i][j];
    return s;
  };
  const Mat3 dw{{{0, -2 * c, 2 * b}, {2 * c, 0, -2 * a}, {-2 * b, 2 * a, 0}}};
  const Mat3 da{{{0, 2 * b, 2 * c}, {2 * b, -4 * a, -2 * w}, {2 * c, 2 * w, -4 * a}}};
  const Mat3 db{{{-4 * b, 2 * a, 2 * w}, {2 * a, 0, 2 * c}, {-2 * w, 2 * c, -4 * b}}};
  const Mat3 dc{{{-4 * c, -2 * w, 2 * a}, {2 * w, -4 * c, 2 * b}, {2 * a, 2 * b, 0}}};
  return {contract(dw), contract(da), contract(db), contract(dc)};
}

// Chain d(unit)/d(raw q) through normalization: (I - u u^T) / ||q||.
void accumulate_quat_grad(const UnitQuat& u, const std::array<double, 4>& du,
                          std::array<double, 4>& dq) {
  const double uv[4] = {u.w, u.x, u.y, u.z};
  double proj = 0;
  for (int i = 0; i < 4; ++i) proj += uv[i] * du[i];
  for (int i = 0; i < 4; ++i) dq[i] += u.inv_norm * (du[i] - uv[i] * proj);
}

Vec3 mat_vec(const Mat3& R, const Vec3& v) {
  return {R[0][0] * v.x + R[0][1] * v.y + R[0][2] * v.z,
          R[1][0] * v.x + R[1][1] * v.y + R[1][2] * v.z,
          R[2][0] * v.x + R[2][1] * v.y + R[2][2] * v.z};
}

Vec3 mat_t_vec(const Mat3& R, const Vec3& v) {
  return {R[0][0] * v.x + R[1][0] * v.y + R[2][0] * v.z,
          R[0][1] * v.x + R[1][1] * v.y + R[2][1] * v.z,
          R[0][2] * v.x + R[1][2] * v.y + R[2][2] * v.z};
}

// Shared inside-outside core. Computes F and optionally accumulates dF-weighted
// gradients w.r.t. primitive parameters and the evaluation point.
double implicit_core(const Superquadric& p, const Vec3& x, double dF,
                     PrimGrad* dp, Vec3* dx) {
  const double ax = p.alpha.x, ay = p.alpha.y, az = p.alpha.z;
  const double e1 = p.eps1, e2 = p.eps2;

  double fx = 1.0 + p.taper_x * x.z / az;
  double fy = 1.0 + p.taper_y * x.z / az;
  // taper inversion is only meaningful away from the pinch plane
  if (std::abs(fx) < 1e-6) fx = fx < 0 ? -1e-6 : 1e-6;
  if (std::abs(fy) < 1e-6) fy = fy < 0 ? -1e-6 : 1e-6;

  const double u1 = x.x / fx, u2 = x.y / fy;
  const double tA = u1 / ax, tB = u2 / ay, tC = x.z / az;

  const double A = std::pow(std::abs(tA), 2.0 / e2);
  const double B = std::pow(std::abs(tB), 2.0 / e2);
  const double C = std::pow(std::abs(tC), 2.0 / e1);
  const double S = A + B;
  const double Se = S > 0 ? std::pow(S, e2 / e1) : 0.0;
  const double F = Se + C;

  if (dp == nullptr && dx == nullptr) return F;

  PrimGrad g;
  Vec3 gx;

  double dS = 0, dC = dF;
  if (S > 0) {
    dS = dF * (e2 / e1) * std::pow(S, e2 / e1 - 1.0);
    g.d_eps2 += dF * Se * std::log(S) / e1;
    g.d_eps1 += dF * Se * std::log(S) * (-e2 / (e1 * e1));
  }

  double dtA = 0, dtB = 0, dtC = 0;
  if (std::abs(tA) > kTiny) {
    dtA = dS * (2.0 / e2) * std::pow(std::abs(tA), 2.0 / e2 - 1.0) * (tA < 0 ? -1 : 1);
    g.d_eps2 += dS * A * std::log(std::abs(tA)) * (-2.0 / (e2 * e2));
  }
  if (std::abs(tB) > kTiny) {
    dtB = dS * (2.0 / e2) * std::pow(std::abs(tB), 2.0 / e2 - 1.0) * (tB < 0 ? -1 : 1);
    g.d_eps2 += dS * B * std::log(std::abs(tB)) * (-2.0 / (e2 * e2));
  }
  if (std::abs(tC) > kTiny) {
    dtC = dC * (2.0 / e1) * std::pow(std::abs(tC), 2.0 / e1 - 1.0) * (tC < 0 ? -1 : 1);
    g.d_eps1 += dC * C * std::log(std::abs(tC)) * (-2.0 / (e1 * e1));
  }

  const double du1 = dtA / ax, du2 = dtB / ay;
  g.d_alpha.x += dtA * (-u1 / (ax * ax));
  g.d_alpha.y += dtB * (-u2 / (ay * ay));
  g.d_alpha.z += dtC * (-x.z / (az * az));

  gx.x += du1 / fx;
  gx.y += du2 / fy;
  gx.z += dtC / az;

  const double dfx = -du1 * u1 / fx;
  const double dfy = -du2 * u2 / fy;
  g.d_taper_x += dfx * x.z / az;
  g.d_taper_y += dfy * x.z / az;
  g.d_alpha.z += dfx * (-p.taper_x * x.z / (az * az)) +
                 dfy * (-p.taper_y * x.z / (az * az));
  gx.z += dfx * p.taper_x / az + dfy * p.taper_y / az;

  if (dp) *dp += g;
  if (dx) *dx += gx;
  return F;
}

} // namespace

Mat3 quat_to_rotation(const Quat& q) {
  return rotation_from_unit(normalize_quat(q));
}

Vec3 pose_apply(const Pose& T, const Vec3& x) {
  return mat_vec(quat_to_rotation(T.q), x) + T.t;
}

Vec3 pose_inverse_apply(const Pose& T, const Vec3& y) {
  return mat_t_vec(quat_to_rotation(T.q), y - T.t);
}

void pose_apply_backward(const Pose& T, const Vec3& x, const Vec3& dy,
                         PoseGrad& dT, Vec3* dx) {
  const UnitQuat u = normalize_quat(T.q);
  const Mat3 R = rotation_from_unit(u);
  dT.d_t += dy;
  if (dx) *dx += mat_t_vec(R, dy);
  Mat3 dR{};
  const double dyv[3] = {dy.x, dy.y, dy.z};
  const double xv[3] = {x.x, x.y, x.z};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dR[i][j] = dyv[i] * xv[j];
  accumulate_quat_grad(u, rotation_backward_unit(u, dR), dT.d_q);
}

void pose_inverse_apply_backward(const Pose& T, const Vec3& y, const Vec3& da,
                                 PoseGrad& dT, Vec3* dy_in) {
  const UnitQuat u = normalize_quat(T.q);
  const Mat3 R = rotation_from_unit(u);
  const Vec3 v = y - T.t;
  const Vec3 dv = mat_vec(R, da); // d(loss)/dv where a = R^T v
  dT.d_t -= dv;
  if (dy_in) *dy_in += dv;
  // a_i = sum_j R_{ji} v_j  =>  dL/dR_{ji} = da_i v_j
  Mat3 dR{};
  const double dav[3] = {da.x, da.y, da.z};
  const double vv[3] = {v.x, v.y, v.z};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) dR[j][i] = vv[j] * dav[i];
  accumulate_quat_grad(u, rotation_backward_unit(u, dR), dT.d_q);
}

void Superquadric::clamp() {
  alpha.x = std::max(alpha.x, 1e-3);
  alpha.y = std::max(alpha.y, 1e-3);
  alpha.z = std::max(alpha.z, 1e-3);
  eps1 = std::clamp(eps1, 0.1, 1.9);
  eps2 = std::clamp(eps2, 0.1, 1.9);
  taper_x = std::clamp(taper_x, -0.9, 0.9);
  taper_y = std::clamp(taper_y, -0.9, 0.9);
}

Vec3 sq_surface_point(const Superquadric& p, double eta, double omega) {
  const double ce = spow(std::cos(eta), p.eps1);
  const double se = spow(std::sin(eta), p.eps1);
  const double cw = spow(std::cos(omega), p.eps2);
  const double sw = spow(std::sin(omega), p.eps2);
  const double x0 = p.alpha.x * ce * cw;
  const double y0 = p.alpha.y * ce * sw;
  const double z0 = p.alpha.z * se;
  const double gx = 1.0 + p.taper_x * z0 / p.alpha.z;
  const double gy = 1.0 + p.taper_y * z0 / p.alpha.z;
  return {x0 * gx, y0 * gy, z0};
}

void sq_surface_point_backward(const Superquadric& p, double eta, double omega,
                               const Vec3& dr, PrimGrad& dp) {
  const double ceta = std::cos(eta), seta = std::sin(eta);
  const double comg = std::cos(omega), somg = std::sin(omega);
  const double ce = spow(ceta, p.eps1);
  const double se = spow(seta, p.eps1);
  const double cw = spow(comg, p.eps2);
  const double sw = spow(somg, p.eps2);
  const double az = p.alpha.z;
  const double x0 = p.alpha.x * ce * cw;
  const double y0 = p.alpha.y * ce * sw;
  const double z0 = az * se;
  const double gx = 1.0 + p.taper_x * z0 / az;
  const double gy = 1.0 + p.taper_y * z0 / az;

  double dx0 = dr.x * gx, dgx = dr.x * x0;
  double dy0 = dr.y * gy, dgy = dr.y * y0;
  double dz0 = dr.z;
  dp.d_taper_x += dgx * z0 / az;
  dp.d_taper_y += dgy * z0 / az;
  dp.d_alpha.z += dgx * (-p.taper_x * z0 / (az * az)) +
                  dgy * (-p.taper_y * z0 / (az * az));
  dz0 += dgx * p.taper_x / az + dgy * p.taper_y / az;

  double dce = 0, dse = 0, dcw = 0, dsw = 0;
  dp.d_alpha.x += dx0 * ce * cw;
  dce += dx0 * p.alpha.x * cw;
  dcw += dx0 * p.alpha.x * ce;
  dp.d_alpha.y += dy0 * ce * sw;
  dce += dy0 * p.alpha.y * sw;
  dsw += dy0 * p.alpha.y * ce;
  dp.d_alpha.z += dz0 * se;
  dse += dz0 * az;

  if (std::abs(ceta) > kTiny) dp.d_eps1 += dce * ce * std::log(std::abs(ceta));
  if (std::abs(seta) > kTiny) dp.d_eps1 += dse * se * std::log(std::abs(seta));
  if (std::abs(comg) > kTiny) dp.d_eps2 += dcw * cw * std::log(std::abs(comg));
  if (std::abs(somg) > kTiny) dp.d_eps2 += dsw * sw * std::log(std::abs(somg));
}

double sq_implicit(const Superquadric& p, const Vec3& x) {
  return implicit_core(p, x, 0.0, nullptr, nullptr);
}

double sq_implicit_grad(const Superquadric& p, const Vec3& x, double dF,
                        PrimGrad& dp, Vec3* dx) {
  return implicit_core(p, x, dF, &dp, dx);
}

double sq_indicator(const Superquadric& p, const Vec3& x) {
  const double F = sq_implicit(p, x);
  return std::pow(F, p.eps1);
}

double sq_indicator_grad(const Superquadric& p, const Vec3& x, double dH,
                         PrimGrad& dp, Vec3* dx) {
  const double F = std::max(sq_implicit(p, x), 1e-30);
  const double H = std::pow(F, p.eps1);
  dp.d_eps1 += dH * H * std::log(F);
  const double dF = dH * p.eps1 * std::pow(F, p.eps1 - 1.0);
  implicit_core(p, x, dF, &dp, dx);
  return H;
}

double sq_radial_distance(const Superquadric& p, const Vec3& x) {
  const double n = x.norm();
  if (n < kTiny)
    return std::min({p.alpha.x, p.alpha.y, p.alpha.z});
  const double F = std::max(sq_implicit(p, x), 1e-30);
  return n * std::abs(1.0 - std::pow(F, -p.eps1 / 2.0));
}

double sq_radial_sq_grad(const Superquadric& p, const Vec3& x, double dl,
                         PrimGrad& dp, Vec3* dx) {
  const double n2 = x.squared_norm();
  if (n2 < kTiny * kTiny) {
    const double m = std::min({p.alpha.x, p.alpha.y, p.alpha.z});
    return m * m; // constant in x; parameter gradient dropped at the center
  }
  const double F = std::max(sq_implicit(p, x), 1e-30);
  const double lnF = std::log(F);
  const double G = std::exp(-0.5 * p.eps1 * lnF); // F^{-eps1/2}
  const double r = 1.0 - G;
  const double val = n2 * r * r;
  if (dx) *dx += x * (dl * 2.0 * r * r);
  const double dG = dl * n2 * (-2.0 * r);
  dp.d_eps1 += dG * G * (-0.5 * lnF);
  const double dF = dG * G * (-0.5 * p.eps1 / F);
  implicit_core(p, x, dF, &dp, dx);
  return val;
}

std::vector<std::pair<double, double>> sq_surface_grid(int n) {
  const int cols = std::max(1, (int)std::ceil(std::sqrt((double)n)));
  const int rows = (n + cols - 1) / cols;
  const double pi = std::acos(-1.0);
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (int i = 0; i < rows && (int)out.size() < n; ++i) {
    const double eta = -pi / 2 + (i + 0.5) * pi / rows;
    for (int j = 0; j < cols && (int)out.size() < n; ++j) {
      const double omega = -pi + (j + 0.5) * 2 * pi / cols;
      out.emplace_back(eta, omega);
    }
  }
  return out;
}

PointCloud sq_sample_surface(const Superquadric& p, int n, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("sq_sample_surface: n must be >= 1");
  const int cols = std::max(1, (int)std::ceil(std::sqrt((double)n)));
  const int rows = (n + cols - 1) / cols;
  const double pi = std::acos(-1.0);
  std::uniform_real_distribution<double> jit(-0.5, 0.5);
  PointCloud out;
  out.points.reserve(n);
  for (int i = 0; i < rows && out.size() < n; ++i) {
    for (int j = 0; j < cols && out.size() < n; ++j) {
      const double eta = -pi / 2 + (i + 0.5 + jit(rng)) * pi / rows;
      const double omega = -pi + (j + 0.5 + jit(rng)) * 2 * pi / cols;
      out.points.push_back(sq_surface_point(p, eta, omega));
    }
  }
  return out;
}

} // namespace spa
