// PartsModel: M_s canonical shapes shared across M_T posed parts, plus the
// assignment log-scores, with a flat parameter-vector view for optimization
// and gradient checking.
#pragma once

#include "spa/assignment.hpp"
#include "spa/geometry.hpp"

#include <vector>

namespace spa {

struct CanonicalShape {
  Superquadric prim;
  std::vector<Vec3> canon_points;
};

struct PartsModel {
  std::vector<CanonicalShape> shapes; // M_s
  std::vector<Pose> poses;            // M_T
  Matrix logits;                      // M_s x M_T log-scores
  double tau = 1.0;

  int num_shapes() const { return (int)shapes.size(); }
  int num_parts() const { return (int)poses.size(); }
  int points_per_part() const {
    return shapes.empty() ? 0 : (int)shapes[0].canon_points.size();
  }

  void validate() const; // throws on structural violations

  // Hard assignment with noise suppressed (g = 0): hot shape per part.
  std::vector<int> frozen_assignment() const;
};

// Flat layout: per shape [alpha(3), eps(2), taper(2)], then per shape the
// canonical points row-major, then per pose [q(4), t(3)], then logits row-major.
struct ParamLayout {
  int num_shapes = 0, num_parts = 0, points_per_part = 0;

  int prim_offset(int shape) const { return shape * 7; }
  int points_offset(int shape) const {
    return num_shapes * 7 + shape * points_per_part * 3;
  }
  int pose_offset(int part) const {
    return num_shapes * (7 + points_per_part * 3) + part * 7;
  }
  int logits_offset() const {
    return num_shapes * (7 + points_per_part * 3) + num_parts * 7;
  }
  int size() const { return logits_offset() + num_shapes * num_parts; }
};

ParamLayout layout_of(const PartsModel& model);
std::vector<double> pack_params(const PartsModel& model);
void unpack_params(const std::vector<double>& flat, PartsModel& model);

// Gradient container mirroring PartsModel; flattens with the same layout.
struct ModelGrad {
  std::vector<PrimGrad> prims;
  std::vector<std::vector<Vec3>> canon_points;
  std::vector<PoseGrad> poses;
  Matrix logits;

  explicit ModelGrad(const PartsModel& model);
  std::vector<double> flatten(const ParamLayout& layout) const;
};

} // namespace spa
