#include "spa/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace spa {

namespace {

struct TemplateDef {
  std::vector<Superquadric> shapes;
  std::vector<Pose> poses;
  std::vector<int> hot; // part -> shape
};

Superquadric make_sq(Vec3 alpha, double e1, double e2) {
  Superquadric p;
  p.alpha = alpha;
  p.eps1 = e1;
  p.eps2 = e2;
  return p;
}

TemplateDef table4leg() {
  TemplateDef d;
  d.shapes.push_back(make_sq({0.8, 0.8, 0.06}, 0.3, 0.3));  // top slab
  d.shapes.push_back(make_sq({0.06, 0.06, 0.25}, 0.3, 1.0)); // round leg
  d.poses.push_back({Quat{}, {0, 0, 0.5}});
  d.hot.push_back(0);
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) {
      d.poses.push_back({Quat{}, {0.6 * sx, 0.6 * sy, 0.2}});
      d.hot.push_back(1);
    }
  return d;
}

TemplateDef chair_arms() {
  TemplateDef d;
  d.shapes.push_back(make_sq({0.5, 0.5, 0.06}, 0.3, 0.3)); // seat
  d.shapes.push_back(make_sq({0.5, 0.06, 0.5}, 0.3, 0.3)); // back
  d.shapes.push_back(make_sq({0.06, 0.4, 0.06}, 0.4, 0.4)); // arm
  d.poses.push_back({Quat{}, {0, 0, 0}});
  d.hot.push_back(0);
  d.poses.push_back({Quat{}, {0, -0.45, 0.55}});
  d.hot.push_back(1);
  for (double sx : {-1.0, 1.0}) {
    d.poses.push_back({Quat{}, {0.55 * sx, 0.05, 0.35}});
    d.hot.push_back(2);
  }
  return d;
}

TemplateDef plane_wings() {
  TemplateDef d;
  d.shapes.push_back(make_sq({0.9, 0.12, 0.12}, 0.5, 1.0)); // fuselage along x
  d.shapes.push_back(make_sq({0.2, 0.7, 0.03}, 0.4, 0.4));  // wing along y
  d.poses.push_back({Quat{}, {0, 0, 0}});
  d.hot.push_back(0);
  d.poses.push_back({Quat{}, {0.1, 0.75, 0}});
  d.hot.push_back(1);
  // the mirrored wing is a proper rotation: half turn about the fuselage axis
  d.poses.push_back({Quat{0, 1, 0, 0}, {0.1, -0.75, 0}});
  d.hot.push_back(1);
  return d;
}

} // namespace

SynthObject generate(const SynthSpec& spec) {
  if (spec.points_per_part < 8)
    throw std::invalid_argument("generate: points_per_part must be >= 8");
  if (spec.noise_sigma < 0)
    throw std::invalid_argument("generate: noise_sigma must be >= 0");

  TemplateDef d;
  switch (spec.tmpl) {
    case Template::Table4Leg: d = table4leg(); break;
    case Template::ChairArms: d = chair_arms(); break;
    case Template::PlaneWings: d = plane_wings(); break;
  }

  std::mt19937_64 rng(spec.seed);
  SynthObject out;
  out.truth.poses = d.poses;
  out.truth.shapes.resize(d.shapes.size());
  for (size_t i = 0; i < d.shapes.size(); ++i) {
    out.truth.shapes[i].prim = d.shapes[i];
    out.truth.shapes[i].canon_points =
        sq_sample_surface(d.shapes[i], spec.points_per_part, rng).points;
  }
  out.truth.logits = zeros((int)d.shapes.size(), (int)d.poses.size());
  for (size_t m = 0; m < d.hot.size(); ++m) out.truth.logits[d.hot[m]][m] = 5.0;

  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  for (size_t m = 0; m < d.poses.size(); ++m) {
    for (const Vec3& c : out.truth.shapes[d.hot[m]].canon_points) {
      Vec3 p = pose_apply(d.poses[m], c);
      if (spec.noise_sigma > 0) p += {noise(rng), noise(rng), noise(rng)};
      out.cloud.points.push_back(p);
      out.cloud.labels.push_back((int)m);
    }
  }
  return out;
}

LossReport truth_loss(const PointCloud& X, const PartsModel& truth,
                      const LossWeights& weights) {
  return stage2_objective(X, truth, weights);
}

Template template_from_name(const std::string& name) {
  if (name == "table") return Template::Table4Leg;
  if (name == "chair") return Template::ChairArms;
  if (name == "plane") return Template::PlaneWings;
  throw std::invalid_argument("unknown template: " + name);
}

const char* template_name(Template t) {
  switch (t) {
    case Template::Table4Leg: return "table";
    case Template::ChairArms: return "chair";
    case Template::PlaneWings: return "plane";
  }
  return "?";
}

} // namespace spa
