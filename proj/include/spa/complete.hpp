// Cut/Hole corruption generators and the two completion procedures.
#pragma once

#include "spa/fit.hpp"

namespace spa {

struct CorruptionResult {
  PointCloud cloud;         // input minus removed points, order preserved
  std::vector<int> removed; // indices into the original cloud
};

// Removes the K extremal points of the target part along a random direction
// with uniform weights in [0,1]^3.
CorruptionResult corrupt_cut(const PointCloud& X, int part, int K,
                             std::mt19937_64& rng);

// Removes the K nearest neighbors (center included) of the rank-K point under
// the same weighted ordering; only target-part points are ever removed.
CorruptionResult corrupt_hole(const PointCloud& X, int part, int K,
                              std::mt19937_64& rng);

// Completion by reconstruction: fit then assemble.
PointCloud completion_r(const PointCloud& x_inc, int num_shapes, int num_parts,
                        const FitConfig& config);

// Completion by similarity: copy each input point into every other part that
// shares its part's canonical shape, via T^{m'} ((T^m)^{-1} x).
PointCloud completion_s(const PointCloud& x_inc, const PartsModel& model);

} // namespace spa
