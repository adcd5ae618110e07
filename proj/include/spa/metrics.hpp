// Set-level evaluation metrics plus per-part statistics and balanced resampling.
#pragma once

#include "spa/model.hpp"

#include <utility>
#include <vector>

namespace spa {

struct CloudSet {
  std::vector<PointCloud> clouds;
  Vec3 lo, hi; // recorded ambient bounds (for JSD gridding)

  static CloudSet with_bounds(std::vector<PointCloud> clouds, Vec3 lo, Vec3 hi);
  // Bounds from the joint axis-aligned box, expanded to a cube.
  static CloudSet from_clouds(std::vector<PointCloud> clouds);
};

// Exact minimum-cost perfect matching (Euclidean ground distance) normalized
// by point count. Requires |X| = |Y| <= 512.
double emd(const PointCloud& X, const PointCloud& Y);

enum class PairDistance { CD, EMD };

double cloud_distance(const PointCloud& A, const PointCloud& B, PairDistance d);

// Mean over ground-truth clouds of the minimum distance to any generated cloud.
double mmd(const CloudSet& x_set, const CloudSet& y_set, PairDistance d);

// Fraction of ground-truth clouds that are the nearest target of some
// generated cloud; argmin ties to the lowest index.
double cov(const CloudSet& x_set, const CloudSet& y_set, PairDistance d);

// Pooled voxel-histogram Jensen-Shannon divergence, natural log, on a
// grid_res^3 grid over the joint recorded bounds. Out-of-bounds points are
// clamped to the boundary voxel and counted.
double jsd(const CloudSet& x_set, const CloudSet& y_set, int grid_res = 28);

// (mean, min) pairwise Chamfer distance between parts' canonical point sets.
std::pair<double, double> self_similarity(const PartsModel& model);

struct PartStats {
  std::vector<int> counts; // |X^m| per part
  double sdev = 0;         // population standard deviation
};

PartStats part_point_stats(const PointCloud& X, const PartsModel& model);
double counts_sdev(const std::vector<int>& counts);

// Assembled cloud with each part downsampled proportionally to the per-part
// mean assigned counts observed in fitting.
PointCloud balanced_resample(const PartsModel& model,
                             const std::vector<double>& train_counts,
                             uint64_t seed);

} // namespace spa
