// Plain-text interchange formats: point clouds, models, index lists.
#pragma once

#include "spa/model.hpp"

#include <string>
#include <vector>

namespace spa {

// "x y z [label]" per line, '#' comments. Doubles are written with enough
// digits for exact round trips.
void write_points(const std::string& path, const PointCloud& cloud);
PointCloud read_points(const std::string& path);

std::string points_to_string(const PointCloud& cloud);
PointCloud points_from_string(const std::string& text);

// Versioned human-readable key-value model document.
void write_model(const std::string& path, const PartsModel& model);
PartsModel read_model(const std::string& path);

std::string model_to_string(const PartsModel& model);
PartsModel model_from_string(const std::string& text);

void write_indices(const std::string& path, const std::vector<int>& idx);
std::vector<int> read_indices(const std::string& path);

// Polygon-file-compatible export for external viewers (x y z + part color index).
void write_ply(const std::string& path, const PointCloud& cloud);

} // namespace spa
