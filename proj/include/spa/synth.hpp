// Synthetic ground-truth objects with known shared shapes, poses, and labels.
#pragma once

#include "spa/losses.hpp"
#include "spa/model.hpp"

#include <cstdint>

namespace spa {

enum class Template { Table4Leg, ChairArms, PlaneWings };

struct SynthSpec {
  Template tmpl = Template::Table4Leg;
  double noise_sigma = 0.0;
  int points_per_part = 256;
  uint64_t seed = 0;
};

struct SynthObject {
  PointCloud cloud;  // labeled by generating part
  PartsModel truth;
};

SynthObject generate(const SynthSpec& spec);

// Stage-2 objective evaluated at the ground-truth model; the reference level
// for recovery thresholds.
LossReport truth_loss(const PointCloud& X, const PartsModel& truth,
                      const LossWeights& weights);

Template template_from_name(const std::string& name);
const char* template_name(Template t);

} // namespace spa
