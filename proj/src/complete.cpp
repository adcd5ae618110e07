#include "spa/complete.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace spa {

namespace {

std::vector<int> part_indices(const PointCloud& X, int part) {
  if (!X.has_labels())
    throw std::invalid_argument("corruption requires part labels");
  std::vector<int> idx;
  for (int i = 0; i < X.size(); ++i)
    if (X.labels[i] == part) idx.push_back(i);
  return idx;
}

// Target-part indices sorted by descending w . (x,y,z), w ~ U[0,1]^3.
std::vector<int> weighted_sorted(const PointCloud& X, int part,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Vec3 w{uni(rng), uni(rng), uni(rng)};
  std::vector<int> idx = part_indices(X, part);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return X.points[a].dot(w) > X.points[b].dot(w);
  });
  return idx;
}

CorruptionResult remove_indices(const PointCloud& X, std::vector<int> removed) {
  std::sort(removed.begin(), removed.end());
  CorruptionResult out;
  out.removed = removed;
  size_t r = 0;
  for (int i = 0; i < X.size(); ++i) {
    if (r < removed.size() && removed[r] == i) {
      ++r;
      continue;
    }
    out.cloud.points.push_back(X.points[i]);
    if (X.has_labels()) out.cloud.labels.push_back(X.labels[i]);
  }
  return out;
}

} // namespace

CorruptionResult corrupt_cut(const PointCloud& X, int part, int K,
                             std::mt19937_64& rng) {
  const std::vector<int> sorted = weighted_sorted(X, part, rng);
  if (K < 1 || K >= (int)sorted.size())
    throw std::invalid_argument("corrupt_cut: K must satisfy 1 <= K < part size");
  return remove_indices(X, {sorted.begin(), sorted.begin() + K});
}

CorruptionResult corrupt_hole(const PointCloud& X, int part, int K,
                              std::mt19937_64& rng) {
  const std::vector<int> sorted = weighted_sorted(X, part, rng);
  if (K < 1 || 2 * K >= (int)sorted.size())
    throw std::invalid_argument("corrupt_hole: part must have more than 2K points");
  const int center = sorted[K - 1]; // rank-K point, likely interior
  std::vector<int> idx = part_indices(X, part);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return squared_dist(X.points[a], X.points[center]) <
           squared_dist(X.points[b], X.points[center]);
  });
  return remove_indices(X, {idx.begin(), idx.begin() + K});
}

PointCloud completion_r(const PointCloud& x_inc, int num_shapes, int num_parts,
                        const FitConfig& config) {
  return assemble(fit(x_inc, num_shapes, num_parts, config).model).cloud;
}

PointCloud completion_s(const PointCloud& x_inc, const PartsModel& model) {
  const std::vector<int> hot = model.frozen_assignment();
  std::vector<std::pair<Superquadric, Pose>> prims;
  for (int m = 0; m < model.num_parts(); ++m)
    prims.emplace_back(model.shapes[hot[m]].prim, model.poses[m]);
  const std::vector<int> part = nearest_primitive(x_inc.points, prims);

  PointCloud out = x_inc; // originals are never moved or deleted
  for (int i = 0; i < x_inc.size(); ++i) {
    const int m = part[i];
    const Vec3 canon = pose_inverse_apply(model.poses[m], x_inc.points[i]);
    for (int mp = 0; mp < model.num_parts(); ++mp) {
      if (mp == m || hot[mp] != hot[m]) continue;
      out.points.push_back(pose_apply(model.poses[mp], canon));
      if (out.has_labels()) out.labels.push_back(x_inc.labels[i]);
    }
  }
  return out;
}

} // namespace spa
