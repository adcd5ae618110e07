#include "doctest.h"

#include "spa/kernels.hpp"

#include <random>

using namespace spa;

namespace {

std::vector<Vec3> random_points(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Vec3> out(n);
  for (auto& p : out) p = {g(rng), g(rng), g(rng)};
  return out;
}

} // namespace

TEST_CASE("nearest indices: brute force, ties, serial/parallel agreement") {
  // tie between B[0] and B[1] resolves to the lowest index
  const std::vector<Vec3> A{{0, 0, 0}};
  const std::vector<Vec3> B{{1, 0, 0}, {-1, 0, 0}};
  CHECK(nearest_indices(A, B)[0] == 0);
  CHECK(nearest_indices_serial(A, B)[0] == 0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto P = random_points(257, rng);
    const auto Q = random_points(63, rng);
    const auto par = nearest_indices(P, Q);
    const auto ser = nearest_indices_serial(P, Q);
    REQUIRE(par.size() == P.size());
    CHECK(par == ser);
    for (size_t i = 0; i < P.size(); ++i) {
      double best = 1e300;
      for (const Vec3& q : Q) best = std::min(best, squared_dist(P[i], q));
      CHECK(squared_dist(P[i], Q[ser[i]]) == best);
    }
  }

  CHECK_THROWS_AS(nearest_indices({}, B), std::invalid_argument);
  CHECK_THROWS_AS(nearest_indices(A, {}), std::invalid_argument);
}

TEST_CASE("chamfer oracle and symmetry") {
  PointCloud X, Y;
  X.points = {{0, 0, 0}, {1, 0, 0}};
  Y.points = {{0, 0, 0}, {1, 0, 0}};
  CHECK(chamfer(X, Y) == 0);

  Y.points = {{0, 0, 1}, {1, 0, 1}}; // uniform unit offset
  CHECK(chamfer(X, Y) == doctest::Approx(2.0)); // 1 + 1 (mean sq each way)

  // asymmetric cardinality against a brute-force oracle
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    PointCloud P, Q;
    P.points = random_points(41, rng);
    Q.points = random_points(17, rng);
    double sx = 0, sy = 0;
    for (const Vec3& p : P.points) {
      double best = 1e300;
      for (const Vec3& q : Q.points) best = std::min(best, squared_dist(p, q));
      sx += best;
    }
    for (const Vec3& q : Q.points) {
      double best = 1e300;
      for (const Vec3& p : P.points) best = std::min(best, squared_dist(p, q));
      sy += best;
    }
    const double oracle = sx / P.size() + sy / Q.size();
    CHECK(chamfer(P, Q) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(chamfer_serial(P, Q) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(chamfer(P, Q) == doctest::Approx(chamfer(Q, P)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(chamfer(PointCloud{}, X), std::invalid_argument);
}

TEST_CASE("nearest primitive partitioning") {
  std::vector<std::pair<Superquadric, Pose>> prims(2);
  prims[0].second.t = {-2, 0, 0};
  prims[1].second.t = {2, 0, 0};

  const std::vector<Vec3> pts{{-2.5, 0, 0}, {2.5, 0, 0}, {0, 0, 0}};
  const auto part = nearest_primitive(pts, prims);
  CHECK(part[0] == 0);
  CHECK(part[1] == 1);
  CHECK(part[2] == 0); // equidistant -> lowest part index

  std::mt19937_64 rng(11);
  std::vector<std::pair<Superquadric, Pose>> many(4);
  for (int m = 0; m < 4; ++m) {
    many[m].first.alpha = {0.2 + 0.1 * m, 0.3, 0.4};
    many[m].first.eps1 = 0.5;
    many[m].first.eps2 = 1.2;
    many[m].second.t = random_points(1, rng)[0];
    many[m].second.q = Quat{1.0, 0.1 * m, 0, 0.2};
  }
  const auto P = random_points(301, rng);
  CHECK(nearest_primitive(P, many) == nearest_primitive_serial(P, many));

  CHECK_THROWS_AS(nearest_primitive(P, {}), std::invalid_argument);
}
