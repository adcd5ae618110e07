// Reconstruction-error terms and the two stage objectives, each exposing
// value plus analytic gradient over the flat model parameter vector.
#pragma once

#include "spa/kernels.hpp"
#include "spa/model.hpp"

#include <functional>
#include <map>
#include <string>

namespace spa {

struct LossWeights {
  double w_o = 0, w_d = 0, w_a = 0.1;
  double s = 1.0;  // overlap indicator threshold
  double c1 = 4.0; // diversity squash scale

  // Category presets: "table", "chair", "airplane".
  static LossWeights preset(const std::string& category);
};

struct LossReport {
  double total = 0;
  std::map<std::string, double> terms;
  std::vector<double> gradient; // flat, pack_params layout
};

enum class SelectionMode { Hard, Soft };

// Point-to-part partition and nearest-neighbor index sets. Recomputed each
// optimization step, frozen during finite-difference checks.
struct Correspondences {
  std::vector<std::vector<int>> partition; // per part -> indices into X
  // stage 2, per part: NN of each partitioned point into the canon set, and
  // NN of each canon point into the partitioned set (position in partition[m],
  // 0 for the centroid stub of an empty part)
  std::vector<std::vector<int>> x_to_y, y_to_x;
  // stage 1, per part: NN of each primitive surface sample into all of X
  std::vector<std::vector<int>> surf_to_x;
};

struct EvalContext {
  SelectionMode mode = SelectionMode::Hard;
  const Matrix* gumbel = nullptr; // null -> zero noise
  const Correspondences* frozen = nullptr;
  int surface_samples = 64;
};

Correspondences compute_correspondences(const PointCloud& X,
                                        const PartsModel& model,
                                        const EvalContext& ctx,
                                        bool stage1, bool stage2);

std::vector<std::vector<int>> partition_by_primitive(
    const PointCloud& X,
    const std::vector<std::pair<Superquadric, Pose>>& prims);

LossReport stage1_objective(const PointCloud& X, const PartsModel& model,
                            const LossWeights& w, const EvalContext& ctx = {});
LossReport stage2_objective(const PointCloud& X, const PartsModel& model,
                            const LossWeights& w, const EvalContext& ctx = {});

// Value-only conveniences.
double points_loss(const PointCloud& X, const PartsModel& model);      // L_p
double prim_points_loss(const PointCloud& X, const PartsModel& model); // L_r
double overlap_loss(const std::vector<std::pair<Superquadric, Pose>>& prims,
                    double s, int surface_samples = 64);
double diversity_loss(const std::vector<Vec3>& alphas, double c1);

struct FiniteDiffReport {
  double max_rel_error = 0;
  int worst_index = -1;
};

// Central differences of f at x against a supplied analytic gradient.
FiniteDiffReport finite_diff_check(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, const std::vector<double>& analytic,
    double h);

} // namespace spa
