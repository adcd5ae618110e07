#include "spa/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spa {

namespace {

// Lloyd iterations with farthest-point seeding; deterministic per rng state.
std::vector<Vec3> kmeans(const std::vector<Vec3>& pts, int k,
                         std::mt19937_64& rng, std::vector<int>* assign_out) {
  std::vector<Vec3> centers;
  std::uniform_int_distribution<int> pick(0, (int)pts.size() - 1);
  centers.push_back(pts[pick(rng)]);
  std::vector<double> dist(pts.size(), std::numeric_limits<double>::max());
  while ((int)centers.size() < k) {
    int far = 0;
    double fd = -1;
    for (size_t i = 0; i < pts.size(); ++i) {
      dist[i] = std::min(dist[i], squared_dist(pts[i], centers.back()));
      if (dist[i] > fd) { fd = dist[i]; far = (int)i; }
    }
    centers.push_back(pts[far]);
  }
  std::vector<int> assign(pts.size(), 0);
  for (int it = 0; it < 25; ++it) {
    bool moved = false;
    for (size_t i = 0; i < pts.size(); ++i) {
      int best = 0;
      double bd = squared_dist(pts[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d = squared_dist(pts[i], centers[c]);
        if (d < bd) { bd = d; best = c; }
      }
      if (assign[i] != best) { assign[i] = best; moved = true; }
    }
    std::vector<Vec3> sum(k);
    std::vector<int> cnt(k, 0);
    for (size_t i = 0; i < pts.size(); ++i) {
      sum[assign[i]] += pts[i];
      cnt[assign[i]]++;
    }
    for (int c = 0; c < k; ++c)
      if (cnt[c] > 0) centers[c] = sum[c] / cnt[c];
    if (!moved) break;
  }
  if (assign_out) *assign_out = assign;
  return centers;
}

struct Adam {
  std::vector<double> m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int t = 0;

  explicit Adam(size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& x, const std::vector<double>& grad,
            const std::vector<char>& mask, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    for (size_t i = 0; i < x.size(); ++i) {
      if (!mask[i]) continue;
      m[i] = beta1 * m[i] + (1 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1 - beta2) * grad[i] * grad[i];
      x[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

void project(PartsModel& model) {
  for (auto& s : model.shapes) s.prim.clamp();
  for (auto& T : model.poses) {
    const double n = T.q.norm();
    if (n < 1e-9) {
      T.q = Quat{};
    } else {
      T.q.w /= n; T.q.x /= n; T.q.y /= n; T.q.z /= n;
    }
  }
}

std::vector<char> stage_mask(const ParamLayout& L, int stage) {
  std::vector<char> mask(L.size(), 0);
  auto mark = [&](int off, int n) { std::fill_n(mask.begin() + off, n, 1); };
  if (stage == 1)
    for (int i = 0; i < L.num_shapes; ++i) mark(L.prim_offset(i), 7);
  else
    for (int i = 0; i < L.num_shapes; ++i)
      mark(L.points_offset(i), L.points_per_part * 3);
  for (int m = 0; m < L.num_parts; ++m) mark(L.pose_offset(m), 7);
  mark(L.logits_offset(), L.num_shapes * L.num_parts);
  return mask;
}

} // namespace

PartsModel init_model(const PointCloud& X, int num_shapes, int num_parts,
                      std::mt19937_64& rng, int points_per_part) {
  if (X.size() == 0) throw std::invalid_argument("init_model: empty cloud");
  if (num_shapes < 1 || num_shapes > num_parts)
    throw std::invalid_argument("init_model: requires 1 <= M_s <= M_T");

  std::vector<int> assign;
  const std::vector<Vec3> centers = kmeans(X.points, num_parts, rng, &assign);

  // per-cluster bounding-box half extents
  std::vector<Vec3> lo(num_parts, {1e30, 1e30, 1e30});
  std::vector<Vec3> hi(num_parts, {-1e30, -1e30, -1e30});
  for (size_t i = 0; i < X.points.size(); ++i) {
    const Vec3& p = X.points[i];
    Vec3& l = lo[assign[i]];
    Vec3& h = hi[assign[i]];
    l = {std::min(l.x, p.x), std::min(l.y, p.y), std::min(l.z, p.z)};
    h = {std::max(h.x, p.x), std::max(h.y, p.y), std::max(h.z, p.z)};
  }

  PartsModel model;
  model.poses.resize(num_parts);
  for (int m = 0; m < num_parts; ++m) model.poses[m].t = centers[m];

  std::normal_distribution<double> lam(0.0, 0.01);
  model.shapes.resize(num_shapes);
  for (int i = 0; i < num_shapes; ++i) {
    Vec3 half = (hi[i] - lo[i]) * 0.5;
    if (hi[i].x < lo[i].x) half = {0.1, 0.1, 0.1}; // empty cluster
    Superquadric p;
    p.alpha = {std::max(half.x, 0.01), std::max(half.y, 0.01),
               std::max(half.z, 0.01)};
    model.shapes[i].prim = p;
    model.shapes[i].canon_points.resize(points_per_part);
    std::uniform_real_distribution<double> ux(-p.alpha.x, p.alpha.x);
    std::uniform_real_distribution<double> uy(-p.alpha.y, p.alpha.y);
    std::uniform_real_distribution<double> uz(-p.alpha.z, p.alpha.z);
    for (auto& pt : model.shapes[i].canon_points) pt = {ux(rng), uy(rng), uz(rng)};
  }
  model.logits = zeros(num_shapes, num_parts);
  for (auto& row : model.logits)
    for (auto& v : row) v = lam(rng);
  return model;
}

Assembly assemble(const PartsModel& model) {
  model.validate();
  Assembly a;
  a.hot = model.frozen_assignment();
  const int np = model.points_per_part();
  for (int m = 0; m < model.num_parts(); ++m) {
    const auto& canon = model.shapes[a.hot[m]].canon_points;
    a.prims.emplace_back(model.shapes[a.hot[m]].prim, model.poses[m]);
    for (int k = 0; k < np; ++k) {
      a.cloud.points.push_back(pose_apply(model.poses[m], canon[k]));
      a.cloud.labels.push_back(m);
      a.part_of.push_back(m);
    }
  }
  return a;
}

std::string FitTrace::to_table() const {
  std::ostringstream os;
  os << "# stage iter total terms...\n";
  for (const auto& r : rows) {
    os << r.stage << ' ' << r.iter << ' ' << r.total;
    for (const auto& [k, v] : r.terms) os << ' ' << k << '=' << v;
    os << '\n';
  }
  return os.str();
}

FitResult fit(const PointCloud& X, int num_shapes, int num_parts,
              const FitConfig& config) {
  if (X.size() < num_parts)
    throw std::invalid_argument("fit: need at least M_T input points");
  if (config.warm_start) {
    config.warm_start->validate();
    if (config.warm_start->num_shapes() != num_shapes ||
        config.warm_start->num_parts() != num_parts)
      throw std::invalid_argument("fit: warm start M_s/M_T mismatch");
  }

  FitResult best;
  best.final_total = std::numeric_limits<double>::max();
  bool have_best = false;

  for (int r = 0; r < config.restarts; ++r) {
    std::mt19937_64 rng(config.seed + 0x9e3779b97f4a7c15ull * (r + 1));
    PartsModel model =
        config.warm_start
            ? *config.warm_start
            : init_model(X, num_shapes, num_parts, rng, config.points_per_part);
    const ParamLayout L = layout_of(model);
    std::vector<double> params = pack_params(model);
    FitTrace trace;
    bool diverged = false;

    for (int stage = 1; stage <= 2 && !diverged; ++stage) {
      const int iters = stage == 1 ? config.stage1_iters : config.stage2_iters;
      const double lr = stage == 1 ? config.stage1_step : config.stage2_step;
      const std::vector<char> mask = stage_mask(L, stage);
      Adam adam(params.size());
      for (int it = 0; it < iters; ++it) {
        const Matrix g =
            sample_gumbel(num_shapes, num_parts, rng); // fresh noise per step
        EvalContext ctx;
        ctx.gumbel = &g;
        ctx.surface_samples = config.surface_samples;
        const LossReport rep =
            stage == 1 ? stage1_objective(X, model, config.weights, ctx)
                       : stage2_objective(X, model, config.weights, ctx);
        if (!std::isfinite(rep.total)) {
          diverged = true;
          break;
        }
        trace.rows.push_back({stage, it, rep.total, rep.terms});
        double lr_it = lr;
        if (stage == 2 && iters > 1 && config.stage2_step_decay != 1.0)
          lr_it *= std::pow(config.stage2_step_decay,
                            (double)it / (iters - 1));
        adam.step(params, rep.gradient, mask, lr_it);
        unpack_params(params, model);
        project(model);
        params = pack_params(model);
      }
    }
    if (diverged) {
      best.failed_restarts++;
      best.restart_totals.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }

    // deterministic readout: zero noise, hard assignment
    EvalContext ctx;
    ctx.surface_samples = config.surface_samples;
    const double final_total =
        stage2_objective(X, model, config.weights, ctx).total;
    best.restart_totals.push_back(final_total);
    if (!have_best || final_total < best.final_total) {
      best.model = std::move(model);
      best.trace = std::move(trace);
      best.final_total = final_total;
      have_best = true;
    }
  }
  if (!have_best)
    throw std::runtime_error("fit: all restarts diverged");
  return best;
}

} // namespace spa
