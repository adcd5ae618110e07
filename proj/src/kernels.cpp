#include "spa/kernels.hpp"

#include <stdexcept>

namespace spa {

namespace {

inline int nearest_one(const Vec3& a, const std::vector<Vec3>& B) {
  int best = 0;
  double bd = squared_dist(a, B[0]);
  for (int j = 1; j < (int)B.size(); ++j) {
    const double d = squared_dist(a, B[j]);
    if (d < bd) { bd = d; best = j; }
  }
  return best;
}

inline int nearest_prim_one(const Vec3& x,
                            const std::vector<std::pair<Superquadric, Pose>>& prims) {
  int best = 0;
  double bd = sq_radial_distance(prims[0].first,
                                 pose_inverse_apply(prims[0].second, x));
  for (int m = 1; m < (int)prims.size(); ++m) {
    const double d = sq_radial_distance(prims[m].first,
                                        pose_inverse_apply(prims[m].second, x));
    if (d < bd) { bd = d; best = m; }
  }
  return best;
}

} // namespace

std::vector<int> nearest_indices_serial(const std::vector<Vec3>& A,
                                        const std::vector<Vec3>& B) {
  if (A.empty() || B.empty())
    throw std::invalid_argument("nearest_indices: empty cloud");
  std::vector<int> idx(A.size());
  for (int i = 0; i < (int)A.size(); ++i) idx[i] = nearest_one(A[i], B);
  return idx;
}

std::vector<int> nearest_indices(const std::vector<Vec3>& A,
                                 const std::vector<Vec3>& B) {
  if (A.empty() || B.empty())
    throw std::invalid_argument("nearest_indices: empty cloud");
  std::vector<int> idx(A.size());
  const int n = (int)A.size();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) idx[i] = nearest_one(A[i], B);
  return idx;
}

static double chamfer_from_indices(const PointCloud& X, const PointCloud& Y,
                                   const std::vector<int>& xy,
                                   const std::vector<int>& yx) {
  double sx = 0, sy = 0;
  for (int i = 0; i < X.size(); ++i) sx += squared_dist(X.points[i], Y.points[xy[i]]);
  for (int j = 0; j < Y.size(); ++j) sy += squared_dist(Y.points[j], X.points[yx[j]]);
  return sx / X.size() + sy / Y.size();
}

double chamfer(const PointCloud& X, const PointCloud& Y) {
  if (X.size() == 0 || Y.size() == 0)
    throw std::invalid_argument("chamfer: empty cloud");
  return chamfer_from_indices(X, Y, nearest_indices(X.points, Y.points),
                              nearest_indices(Y.points, X.points));
}

double chamfer_serial(const PointCloud& X, const PointCloud& Y) {
  if (X.size() == 0 || Y.size() == 0)
    throw std::invalid_argument("chamfer: empty cloud");
  return chamfer_from_indices(X, Y, nearest_indices_serial(X.points, Y.points),
                              nearest_indices_serial(Y.points, X.points));
}

std::vector<int> nearest_primitive_serial(
    const std::vector<Vec3>& points,
    const std::vector<std::pair<Superquadric, Pose>>& prims) {
  if (prims.empty()) throw std::invalid_argument("nearest_primitive: no primitives");
  std::vector<int> part(points.size());
  for (int i = 0; i < (int)points.size(); ++i)
    part[i] = nearest_prim_one(points[i], prims);
  return part;
}

std::vector<int> nearest_primitive(
    const std::vector<Vec3>& points,
    const std::vector<std::pair<Superquadric, Pose>>& prims) {
  if (prims.empty()) throw std::invalid_argument("nearest_primitive: no primitives");
  std::vector<int> part(points.size());
  const int n = (int)points.size();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) part[i] = nearest_prim_one(points[i], prims);
  return part;
}

} // namespace spa
