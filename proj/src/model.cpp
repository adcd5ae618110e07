#include "spa/model.hpp"

#include <cmath>
#include <stdexcept>

namespace spa {

void PartsModel::validate() const {
  if (shapes.empty() || poses.empty())
    throw std::invalid_argument("PartsModel: needs at least one shape and pose");
  if (num_parts() < num_shapes())
    throw std::invalid_argument("PartsModel: requires M_T >= M_s");
  if ((int)logits.size() != num_shapes() ||
      (int)logits[0].size() != num_parts())
    throw std::invalid_argument("PartsModel: logits shape mismatch");
  const size_t np = shapes[0].canon_points.size();
  for (const auto& s : shapes)
    if (s.canon_points.size() != np)
      throw std::invalid_argument("PartsModel: uneven canonical point counts");
  if (tau <= 0) throw std::invalid_argument("PartsModel: tau must be > 0");
}

std::vector<int> PartsModel::frozen_assignment() const {
  return hard_assignment(logits, zeros(num_shapes(), num_parts()));
}

ParamLayout layout_of(const PartsModel& model) {
  return {model.num_shapes(), model.num_parts(), model.points_per_part()};
}

std::vector<double> pack_params(const PartsModel& model) {
  const ParamLayout L = layout_of(model);
  std::vector<double> flat(L.size());
  for (int i = 0; i < L.num_shapes; ++i) {
    const auto& p = model.shapes[i].prim;
    double* d = flat.data() + L.prim_offset(i);
    d[0] = p.alpha.x; d[1] = p.alpha.y; d[2] = p.alpha.z;
    d[3] = p.eps1; d[4] = p.eps2; d[5] = p.taper_x; d[6] = p.taper_y;
    double* pts = flat.data() + L.points_offset(i);
    for (int k = 0; k < L.points_per_part; ++k) {
      const Vec3& v = model.shapes[i].canon_points[k];
      pts[3 * k] = v.x; pts[3 * k + 1] = v.y; pts[3 * k + 2] = v.z;
    }
  }
  for (int m = 0; m < L.num_parts; ++m) {
    const Pose& T = model.poses[m];
    double* d = flat.data() + L.pose_offset(m);
    d[0] = T.q.w; d[1] = T.q.x; d[2] = T.q.y; d[3] = T.q.z;
    d[4] = T.t.x; d[5] = T.t.y; d[6] = T.t.z;
  }
  double* lg = flat.data() + L.logits_offset();
  for (int i = 0; i < L.num_shapes; ++i)
    for (int m = 0; m < L.num_parts; ++m) *lg++ = model.logits[i][m];
  return flat;
}

void unpack_params(const std::vector<double>& flat, PartsModel& model) {
  const ParamLayout L = layout_of(model);
  if ((int)flat.size() != L.size())
    throw std::invalid_argument("unpack_params: size mismatch");
  for (int i = 0; i < L.num_shapes; ++i) {
    auto& p = model.shapes[i].prim;
    const double* d = flat.data() + L.prim_offset(i);
    p.alpha = {d[0], d[1], d[2]};
    p.eps1 = d[3]; p.eps2 = d[4]; p.taper_x = d[5]; p.taper_y = d[6];
    const double* pts = flat.data() + L.points_offset(i);
    for (int k = 0; k < L.points_per_part; ++k)
      model.shapes[i].canon_points[k] = {pts[3 * k], pts[3 * k + 1], pts[3 * k + 2]};
  }
  for (int m = 0; m < L.num_parts; ++m) {
    Pose& T = model.poses[m];
    const double* d = flat.data() + L.pose_offset(m);
    T.q = {d[0], d[1], d[2], d[3]};
    T.t = {d[4], d[5], d[6]};
  }
  const double* lg = flat.data() + L.logits_offset();
  for (int i = 0; i < L.num_shapes; ++i)
    for (int m = 0; m < L.num_parts; ++m) model.logits[i][m] = *lg++;
}

ModelGrad::ModelGrad(const PartsModel& model)
    : prims(model.num_shapes()),
      canon_points(model.num_shapes(),
                   std::vector<Vec3>(model.points_per_part())),
      poses(model.num_parts()),
      logits(zeros(model.num_shapes(), model.num_parts())) {}

std::vector<double> ModelGrad::flatten(const ParamLayout& L) const {
  std::vector<double> flat(L.size(), 0.0);
  for (int i = 0; i < L.num_shapes; ++i) {
    const PrimGrad& g = prims[i];
    double* d = flat.data() + L.prim_offset(i);
    d[0] = g.d_alpha.x; d[1] = g.d_alpha.y; d[2] = g.d_alpha.z;
    d[3] = g.d_eps1; d[4] = g.d_eps2; d[5] = g.d_taper_x; d[6] = g.d_taper_y;
    double* pts = flat.data() + L.points_offset(i);
    for (int k = 0; k < L.points_per_part; ++k) {
      pts[3 * k] = canon_points[i][k].x;
      pts[3 * k + 1] = canon_points[i][k].y;
      pts[3 * k + 2] = canon_points[i][k].z;
    }
  }
  for (int m = 0; m < L.num_parts; ++m) {
    const PoseGrad& g = poses[m];
    double* d = flat.data() + L.pose_offset(m);
    d[0] = g.d_q[0]; d[1] = g.d_q[1]; d[2] = g.d_q[2]; d[3] = g.d_q[3];
    d[4] = g.d_t.x; d[5] = g.d_t.y; d[6] = g.d_t.z;
  }
  double* lg = flat.data() + L.logits_offset();
  for (int i = 0; i < L.num_shapes; ++i)
    for (int m = 0; m < L.num_parts; ++m) *lg++ = logits[i][m];
  return flat;
}

} // namespace spa
