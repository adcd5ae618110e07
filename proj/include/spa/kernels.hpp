// Data-parallel inner loops (nearest neighbors, partitioning) with serial
// reference versions kept for testing and benchmarking.
#pragma once

#include "spa/geometry.hpp"

#include <utility>
#include <vector>

namespace spa {

// For each point of A, index of its nearest point in B (squared Euclidean).
// Ties go to the lowest index.
std::vector<int> nearest_indices(const std::vector<Vec3>& A,
                                 const std::vector<Vec3>& B);
std::vector<int> nearest_indices_serial(const std::vector<Vec3>& A,
                                        const std::vector<Vec3>& B);

// Symmetric Chamfer distance: mean squared NN distance in both directions.
double chamfer(const PointCloud& X, const PointCloud& Y);
double chamfer_serial(const PointCloud& X, const PointCloud& Y);

// For each point, index of the part whose primitive is radially nearest after
// mapping into that part's canonical frame. Ties to the lowest part index.
std::vector<int> nearest_primitive(
    const std::vector<Vec3>& points,
    const std::vector<std::pair<Superquadric, Pose>>& prims);
std::vector<int> nearest_primitive_serial(
    const std::vector<Vec3>& points,
    const std::vector<std::pair<Superquadric, Pose>>& prims);

} // namespace spa
