#include "doctest.h"

#include "spa/geometry.hpp"

#include <random>

using namespace spa;

namespace {

double det3(const Mat3& R) {
  return R[0][0] * (R[1][1] * R[2][2] - R[1][2] * R[2][1]) -
         R[0][1] * (R[1][0] * R[2][2] - R[1][2] * R[2][0]) +
         R[0][2] * (R[1][0] * R[2][1] - R[1][1] * R[2][0]);
}

Quat random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Quat q{n(rng), n(rng), n(rng), n(rng)};
  const double s = q.norm();
  return {q.w / s, q.x / s, q.y / s, q.z / s};
}

const Quat kQuarterZ{std::sqrt(0.5), 0, 0, std::sqrt(0.5)};

} // namespace

TEST_CASE("quat_to_rotation basics") {
  const Mat3 I = quat_to_rotation(Quat{1, 0, 0, 0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(I[i][j] == doctest::Approx(i == j ? 1 : 0));

  // quarter turn about z maps x to y
  const Mat3 R = quat_to_rotation(kQuarterZ);
  CHECK(R[0][0] == doctest::Approx(0).epsilon(1e-12));
  CHECK(R[1][0] == doctest::Approx(1));
  CHECK(R[2][0] == doctest::Approx(0).epsilon(1e-12));

  CHECK_THROWS_AS(quat_to_rotation(Quat{0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("rotation orthogonality over random quaternions") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const Mat3 R = quat_to_rotation(random_unit_quat(rng));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double dot = 0;
        for (int k = 0; k < 3; ++k) dot += R[k][i] * R[k][j];
        CHECK(std::abs(dot - (i == j ? 1 : 0)) < 1e-9);
      }
    CHECK(std::abs(det3(R) - 1.0) < 1e-9);
  }
}

TEST_CASE("pose apply examples") {
  Pose T;
  T.t = {1, 2, 3};
  const Vec3 a = pose_apply(T, {0, 0, 0});
  CHECK(a.x == 1);
  CHECK(a.y == 2);
  CHECK(a.z == 3);

  Pose ident;
  const Vec3 b = pose_apply(ident, {0.3, -0.1, 5});
  CHECK(b.x == 0.3);

  Pose Tz{kQuarterZ, {1, 0, 0}};
  const Vec3 c = pose_apply(Tz, {1, 0, 0});
  CHECK(c.x == doctest::Approx(1).epsilon(1e-12));
  CHECK(c.y == doctest::Approx(1));
}

TEST_CASE("pose inverse examples and round trip") {
  Pose T;
  T.t = {1, 2, 3};
  const Vec3 a = pose_inverse_apply(T, {1, 2, 3});
  CHECK(a.norm() == doctest::Approx(0));

  Pose Tz{kQuarterZ, {0, 0, 0}};
  const Vec3 b = pose_inverse_apply(Tz, {0, 1, 0});
  CHECK(b.x == doctest::Approx(1));
  CHECK(std::abs(b.y) < 1e-12);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int i = 0; i < 1000; ++i) {
    const Pose R{random_unit_quat(rng), {n(rng), n(rng), n(rng)}};
    const Vec3 x{n(rng), n(rng), n(rng)};
    const Vec3 back = pose_inverse_apply(R, pose_apply(R, x));
    CHECK((back - x).norm() < 1e-12);
  }
}

TEST_CASE("superquadric surface point examples") {
  Superquadric sphere;
  const Vec3 a = sq_surface_point(sphere, 0, 0);
  CHECK(a.x == doctest::Approx(1));
  CHECK(a.y == doctest::Approx(0));

  Superquadric p;
  p.alpha = {2, 1, 3};
  const Vec3 b = sq_surface_point(p, 0, std::acos(-1.0) / 2);
  CHECK(std::abs(b.x) < 1e-12);
  CHECK(b.y == doctest::Approx(1));

  const Vec3 c = sq_surface_point(sphere, std::acos(-1.0) / 2, 1.234);
  CHECK(std::abs(c.x) < 1e-12);
  CHECK(c.z == doctest::Approx(1));
}

TEST_CASE("surface sampling: norms, implicit consistency, determinism") {
  Superquadric sphere;
  std::mt19937_64 rng(3);
  const PointCloud s = sq_sample_surface(sphere, 100, rng);
  REQUIRE(s.size() == 100);
  for (const Vec3& p : s.points) CHECK(p.norm() == doctest::Approx(1).epsilon(1e-9));

  std::mt19937_64 r1(9), r2(9);
  Superquadric q;
  q.alpha = {0.7, 1.3, 0.4};
  q.eps1 = 0.6;
  q.eps2 = 1.4;
  const PointCloud a = sq_sample_surface(q, 64, r1);
  const PointCloud b = sq_sample_surface(q, 64, r2);
  for (int i = 0; i < 64; ++i) {
    CHECK(a.points[i].x == b.points[i].x); // bitwise determinism
    CHECK(sq_implicit(q, a.points[i]) == doctest::Approx(1).epsilon(1e-7));
  }
}

TEST_CASE("implicit surface consistency over random primitives") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ue(0.1, 1.9), ua(0.2, 2.5);
  const double pi = std::acos(-1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Superquadric p;
    p.alpha = {ua(rng), ua(rng), ua(rng)};
    p.eps1 = ue(rng);
    p.eps2 = ue(rng);
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) {
        const double eta = -pi / 2 + (i + 0.5) * pi / 32;
        const double omega = -pi + (j + 0.5) * 2 * pi / 32;
        const double F = sq_implicit(p, sq_surface_point(p, eta, omega));
        CHECK(std::abs(F - 1.0) < 1e-6);
      }
  }
}

TEST_CASE("implicit spot values") {
  Superquadric sphere;
  CHECK(sq_implicit(sphere, {0.5, 0, 0}) == doctest::Approx(0.25));
  CHECK(sq_implicit(sphere, {2, 0, 0}) == doctest::Approx(4));
  Superquadric p;
  p.alpha = {0.3, 2, 1};
  p.eps1 = 0.4;
  p.eps2 = 1.2;
  CHECK(sq_implicit(p, {0, 0, 0}) == 0);
}

TEST_CASE("indicator values and ray monotonicity") {
  Superquadric sphere;
  CHECK(sq_indicator(sphere, {2, 0, 0}) == doctest::Approx(4));
  Superquadric p;
  p.alpha = {1.2, 0.5, 0.8};
  p.eps1 = 0.5;
  p.eps2 = 1.3;
  const Vec3 surf = sq_surface_point(p, 0.4, 1.1);
  CHECK(sq_indicator(p, surf) == doctest::Approx(1).epsilon(1e-7));
  CHECK(sq_indicator(p, surf * 0.5) < 1.0);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 dir{n(rng), n(rng), n(rng)};
    double prev = 0;
    for (double lam = 0.05; lam < 3.0; lam += 0.05) {
      const double h = sq_indicator(p, dir * lam);
      CHECK(h >= prev - 1e-12);
      prev = h;
    }
  }
}

TEST_CASE("radial distance values; exact on spheres") {
  Superquadric sphere;
  CHECK(sq_radial_distance(sphere, {2, 0, 0}) == doctest::Approx(1));
  CHECK(sq_radial_distance(sphere, {0.5, 0, 0}) == doctest::Approx(0.5));
  const Vec3 surf = sq_surface_point(sphere, 0.3, -0.7);
  CHECK(sq_radial_distance(sphere, surf) == doctest::Approx(0).epsilon(1e-7));

  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> ur(0.3, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double r = ur(rng);
    Superquadric s;
    s.alpha = {r, r, r};
    const Vec3 x{n(rng), n(rng), n(rng)};
    if (x.norm() < 1e-3) continue;
    CHECK(std::abs(sq_radial_distance(s, x) - std::abs(x.norm() - r)) < 1e-9);
  }

  CHECK(sq_radial_distance(sphere, {0, 0, 0}) == doctest::Approx(1));
}

// finite-difference checks of the hand-derived backward passes
TEST_CASE("pose_apply_backward matches finite differences") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    Pose T{random_unit_quat(rng), {n(rng), n(rng), n(rng)}};
    const Vec3 x{n(rng), n(rng), n(rng)};
    const Vec3 dy{n(rng), n(rng), n(rng)};
    PoseGrad g;
    Vec3 dx;
    pose_apply_backward(T, x, dy, g, &dx);

    auto f = [&](const Pose& P, const Vec3& xx) {
      return pose_apply(P, xx).dot(dy);
    };
    double qv[4] = {T.q.w, T.q.x, T.q.y, T.q.z};
    for (int k = 0; k < 4; ++k) {
      Pose Tp = T, Tm = T;
      double* comps_p[4] = {&Tp.q.w, &Tp.q.x, &Tp.q.y, &Tp.q.z};
      double* comps_m[4] = {&Tm.q.w, &Tm.q.x, &Tm.q.y, &Tm.q.z};
      *comps_p[k] = qv[k] + h;
      *comps_m[k] = qv[k] - h;
      const double fd = (f(Tp, x) - f(Tm, x)) / (2 * h);
      CHECK(g.d_q[k] == doctest::Approx(fd).epsilon(1e-5));
    }
    CHECK(g.d_t.x == doctest::Approx(dy.x));
    const double fdx = (f(T, x + Vec3{h, 0, 0}) - f(T, x - Vec3{h, 0, 0})) / (2 * h);
    CHECK(dx.x == doctest::Approx(fdx).epsilon(1e-6));
  }
}

TEST_CASE("pose_inverse_apply_backward matches finite differences") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n;
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    Pose T{random_unit_quat(rng), {n(rng), n(rng), n(rng)}};
    const Vec3 y{n(rng), n(rng), n(rng)};
    const Vec3 da{n(rng), n(rng), n(rng)};
    PoseGrad g;
    Vec3 dy;
    pose_inverse_apply_backward(T, y, da, g, &dy);

    auto f = [&](const Pose& P, const Vec3& yy) {
      return pose_inverse_apply(P, yy).dot(da);
    };
    double qv[4] = {T.q.w, T.q.x, T.q.y, T.q.z};
    for (int k = 0; k < 4; ++k) {
      Pose Tp = T, Tm = T;
      double* comps_p[4] = {&Tp.q.w, &Tp.q.x, &Tp.q.y, &Tp.q.z};
      double* comps_m[4] = {&Tm.q.w, &Tm.q.x, &Tm.q.y, &Tm.q.z};
      *comps_p[k] = qv[k] + h;
      *comps_m[k] = qv[k] - h;
      const double fd = (f(Tp, y) - f(Tm, y)) / (2 * h);
      CHECK(g.d_q[k] == doctest::Approx(fd).epsilon(1e-5));
    }
    const double fdt = (f(Pose{T.q, T.t + Vec3{h, 0, 0}}, y) -
                        f(Pose{T.q, T.t - Vec3{h, 0, 0}}, y)) / (2 * h);
    CHECK(g.d_t.x == doctest::Approx(fdt).epsilon(1e-5));
    const double fdy = (f(T, y + Vec3{0, h, 0}) - f(T, y - Vec3{0, h, 0})) / (2 * h);
    CHECK(dy.y == doctest::Approx(fdy).epsilon(1e-5));
  }
}

namespace {

std::vector<double> prim_params(const Superquadric& p) {
  return {p.alpha.x, p.alpha.y, p.alpha.z, p.eps1, p.eps2, p.taper_x, p.taper_y};
}

Superquadric prim_from(const std::vector<double>& v) {
  Superquadric p;
  p.alpha = {v[0], v[1], v[2]};
  p.eps1 = v[3]; p.eps2 = v[4]; p.taper_x = v[5]; p.taper_y = v[6];
  return p;
}

std::vector<double> prim_grad_vec(const PrimGrad& g) {
  return {g.d_alpha.x, g.d_alpha.y, g.d_alpha.z, g.d_eps1, g.d_eps2,
          g.d_taper_x, g.d_taper_y};
}

} // namespace

TEST_CASE("superquadric gradients match finite differences") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ue(0.3, 1.7), ua(0.4, 1.8), uk(-0.5, 0.5);
  std::normal_distribution<double> n;
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    Superquadric p;
    p.alpha = {ua(rng), ua(rng), ua(rng)};
    p.eps1 = ue(rng); p.eps2 = ue(rng);
    p.taper_x = uk(rng); p.taper_y = uk(rng);
    const Vec3 x{n(rng), n(rng), n(rng)};
    if (std::abs(x.x) < 0.05 || std::abs(x.y) < 0.05 || std::abs(x.z) < 0.05)
      continue; // stay away from the power-law kinks

    { // implicit
      PrimGrad dp;
      Vec3 dx;
      sq_implicit_grad(p, x, 1.0, dp, &dx);
      const auto an = prim_grad_vec(dp);
      auto base = prim_params(p);
      for (int k = 0; k < 7; ++k) {
        auto vp = base, vm = base;
        vp[k] += h; vm[k] -= h;
        const double fd =
            (sq_implicit(prim_from(vp), x) - sq_implicit(prim_from(vm), x)) / (2 * h);
        CHECK(an[k] == doctest::Approx(fd).epsilon(1e-4));
      }
      const double fdx =
          (sq_implicit(p, x + Vec3{h, 0, 0}) - sq_implicit(p, x - Vec3{h, 0, 0})) /
          (2 * h);
      CHECK(dx.x == doctest::Approx(fdx).epsilon(1e-4));
    }

    { // radial squared
      PrimGrad dp;
      Vec3 dx;
      const double val = sq_radial_sq_grad(p, x, 1.0, dp, &dx);
      auto rad2 = [&](const Superquadric& q, const Vec3& xx) {
        const double d = sq_radial_distance(q, xx);
        return d * d;
      };
      CHECK(val == doctest::Approx(rad2(p, x)).epsilon(1e-10));
      const auto an = prim_grad_vec(dp);
      auto base = prim_params(p);
      for (int k = 0; k < 7; ++k) {
        auto vp = base, vm = base;
        vp[k] += h; vm[k] -= h;
        const double fd = (rad2(prim_from(vp), x) - rad2(prim_from(vm), x)) / (2 * h);
        CHECK(an[k] == doctest::Approx(fd).epsilon(2e-4));
      }
      const double fdz =
          (rad2(p, x + Vec3{0, 0, h}) - rad2(p, x - Vec3{0, 0, h})) / (2 * h);
      CHECK(dx.z == doctest::Approx(fdz).epsilon(2e-4));
    }

    { // surface point
      const double eta = 0.4, omega = 1.1;
      const Vec3 dr{n(rng), n(rng), n(rng)};
      PrimGrad dp;
      sq_surface_point_backward(p, eta, omega, dr, dp);
      const auto an = prim_grad_vec(dp);
      auto base = prim_params(p);
      for (int k = 0; k < 7; ++k) {
        auto vp = base, vm = base;
        vp[k] += h; vm[k] -= h;
        const double fd = (sq_surface_point(prim_from(vp), eta, omega).dot(dr) -
                           sq_surface_point(prim_from(vm), eta, omega).dot(dr)) /
                          (2 * h);
        CHECK(an[k] == doctest::Approx(fd).epsilon(1e-4));
      }
    }

    { // indicator
      PrimGrad dp;
      Vec3 dx;
      sq_indicator_grad(p, x, 1.0, dp, &dx);
      const auto an = prim_grad_vec(dp);
      auto base = prim_params(p);
      for (int k = 0; k < 7; ++k) {
        auto vp = base, vm = base;
        vp[k] += h; vm[k] -= h;
        const double fd =
            (sq_indicator(prim_from(vp), x) - sq_indicator(prim_from(vm), x)) /
            (2 * h);
        CHECK(an[k] == doctest::Approx(fd).epsilon(2e-4));
      }
    }
  }
}
