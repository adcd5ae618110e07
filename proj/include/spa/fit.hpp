// Direct per-object optimization of a PartsModel: k-means style init, model
// assembly, and the two-stage adaptive-moment fitting schedule.
#pragma once

#include "spa/losses.hpp"
#include "spa/model.hpp"

#include <cstdint>
#include <string>

namespace spa {

struct FitConfig {
  int stage1_iters = 200;
  int stage2_iters = 800;
  double stage1_step = 1e-2;
  double stage2_step = 5e-3;
  // Stage-2 step size decays geometrically to stage2_step * stage2_step_decay
  // across the stage; 1.0 keeps it constant.
  double stage2_step_decay = 1.0;
  LossWeights weights;
  uint64_t seed = 0;
  int restarts = 5;
  int points_per_part = 512; // N_p
  int surface_samples = 64;
  // Optional warm start: every restart begins from this model instead of a
  // fresh k-means initialization (refinement fits, pretrained-model reuse).
  // Must agree with the M_s/M_T passed to fit(); not owned.
  const PartsModel* warm_start = nullptr;
};

struct TraceRow {
  int stage = 0;
  int iter = 0;
  double total = 0;
  std::map<std::string, double> terms;
};

struct FitTrace {
  std::vector<TraceRow> rows;
  std::string to_table() const; // plain-text table for plotting
};

struct FitResult {
  PartsModel model;
  FitTrace trace;
  double final_total = 0;
  int failed_restarts = 0;
  std::vector<double> restart_totals;
};

PartsModel init_model(const PointCloud& X, int num_shapes, int num_parts,
                      std::mt19937_64& rng, int points_per_part = 512);

struct Assembly {
  PointCloud cloud;                                  // N_p * M_T points, labeled
  std::vector<std::pair<Superquadric, Pose>> prims;  // per part
  std::vector<int> part_of;                          // point -> part
  std::vector<int> hot;                              // part -> shape
};

Assembly assemble(const PartsModel& model);

FitResult fit(const PointCloud& X, int num_shapes, int num_parts,
              const FitConfig& config);

} // namespace spa
