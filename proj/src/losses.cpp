#include "spa/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spa {

LossWeights LossWeights::preset(const std::string& category) {
  LossWeights w;
  if (category == "table") {
    w.w_o = 1e-6; w.w_d = 1e-6; w.w_a = 0.1; w.s = 1.3;
  } else if (category == "chair") {
    w.w_o = 2e-3; w.w_d = 3e-3; w.w_a = 0.1; w.s = 1.5;
  } else if (category == "airplane") {
    w.w_o = 1e-3; w.w_d = 1e-5; w.w_a = 0.1; w.s = 1.0;
  } else {
    throw std::invalid_argument("unknown weight preset: " + category);
  }
  return w;
}

std::vector<std::vector<int>> partition_by_primitive(
    const PointCloud& X,
    const std::vector<std::pair<Superquadric, Pose>>& prims) {
  const std::vector<int> part = nearest_primitive(X.points, prims);
  std::vector<std::vector<int>> out(prims.size());
  for (int i = 0; i < X.size(); ++i) out[part[i]].push_back(i);
  return out;
}

namespace {

struct Selection {
  Matrix soft;
  std::vector<int> hot;
  Matrix W; // forward weights: one-hot columns (Hard) or soft (Soft)
};

Selection make_selection(const PartsModel& model, const EvalContext& ctx) {
  const Matrix g = ctx.gumbel
                       ? *ctx.gumbel
                       : zeros(model.num_shapes(), model.num_parts());
  Selection sel;
  sel.soft = soft_assignment(model.logits, g, model.tau);
  sel.hot = hard_assignment(model.logits, g);
  sel.W = ctx.mode == SelectionMode::Soft
              ? sel.soft
              : one_hot_columns(sel.hot, model.num_shapes());
  return sel;
}

Superquadric blend_prim(const PartsModel& model, const Matrix& W, int m) {
  Superquadric p;
  p.alpha = {0, 0, 0};
  p.eps1 = p.eps2 = p.taper_x = p.taper_y = 0;
  for (int i = 0; i < model.num_shapes(); ++i) {
    const double w = W[i][m];
    if (w == 0.0) continue;
    const Superquadric& q = model.shapes[i].prim;
    p.alpha += q.alpha * w;
    p.eps1 += w * q.eps1; p.eps2 += w * q.eps2;
    p.taper_x += w * q.taper_x; p.taper_y += w * q.taper_y;
  }
  return p;
}

std::vector<Vec3> blend_points(const PartsModel& model, const Matrix& W, int m) {
  std::vector<Vec3> out(model.points_per_part());
  for (int i = 0; i < model.num_shapes(); ++i) {
    const double w = W[i][m];
    if (w == 0.0) continue;
    const auto& pts = model.shapes[i].canon_points;
    for (size_t k = 0; k < pts.size(); ++k) out[k] += pts[k] * w;
  }
  return out;
}

double prim_dot(const Superquadric& p, const PrimGrad& g) {
  return p.alpha.dot(g.d_alpha) + p.eps1 * g.d_eps1 + p.eps2 * g.d_eps2 +
         p.taper_x * g.d_taper_x + p.taper_y * g.d_taper_y;
}

// Distribute a blended-primitive gradient to the shape primitives and the
// selection weights.
void distribute_prim(const PartsModel& model, const Matrix& W, int m,
                     const PrimGrad& dphi, ModelGrad& G, Matrix& dW) {
  for (int i = 0; i < model.num_shapes(); ++i) {
    const double w = W[i][m];
    if (w != 0.0) {
      PrimGrad scaled = dphi;
      G.prims[i] += scaled.scale(w);
    }
    dW[i][m] += prim_dot(model.shapes[i].prim, dphi);
  }
}

std::vector<std::pair<Superquadric, Pose>> hard_prims(const PartsModel& model,
                                                      const std::vector<int>& hot) {
  std::vector<std::pair<Superquadric, Pose>> prims;
  prims.reserve(model.num_parts());
  for (int m = 0; m < model.num_parts(); ++m)
    prims.emplace_back(model.shapes[hot[m]].prim, model.poses[m]);
  return prims;
}

Vec3 centroid_of(const PointCloud& X) {
  Vec3 c;
  for (const Vec3& p : X.points) c += p;
  return c / X.size();
}

struct Evaluator {
  const PointCloud& X;
  const PartsModel& model;
  const LossWeights& w;
  const EvalContext& ctx;
  Selection sel;
  ModelGrad G;
  Matrix dW;
  Correspondences local; // used when ctx.frozen is null
  const Correspondences* corr = nullptr;

  Evaluator(const PointCloud& X_, const PartsModel& model_,
            const LossWeights& w_, const EvalContext& ctx_)
      : X(X_), model(model_), w(w_), ctx(ctx_),
        sel(make_selection(model_, ctx_)), G(model_),
        dW(zeros(model_.num_shapes(), model_.num_parts())) {
    if (X.size() == 0) throw std::invalid_argument("empty input cloud");
    model.validate();
  }

  void prepare(bool stage1, bool stage2) {
    if (ctx.frozen) {
      corr = ctx.frozen;
      return;
    }
    local = compute_correspondences(X, model, ctx, stage1, stage2);
    corr = &local;
  }

  // Chamfer-based points loss, Eq. 8 pattern: sum over parts of canonical CD.
  double points_term() {
    const int mt = model.num_parts();
    const Vec3 cen = centroid_of(X);
    double total = 0;
    for (int m = 0; m < mt; ++m) {
      const Pose& T = model.poses[m];
      const auto& idx = corr->partition[m];
      std::vector<Vec3> A;
      if (idx.empty()) {
        A.push_back(pose_inverse_apply(T, cen)); // dead part: pull toward data
      } else {
        A.reserve(idx.size());
        for (int i : idx) A.push_back(pose_inverse_apply(T, X.points[i]));
      }
      const std::vector<Vec3> B = blend_points(model, sel.W, m);
      const auto& xy = corr->x_to_y[m];
      const auto& yx = corr->y_to_x[m];
      const double na = (double)A.size(), nb = (double)B.size();

      std::vector<Vec3> dA(A.size()), dB(B.size());
      for (size_t i = 0; i < A.size(); ++i) {
        const Vec3 d = A[i] - B[xy[i]];
        total += d.squared_norm() / na;
        dA[i] += d * (2.0 / na);
        dB[xy[i]] -= d * (2.0 / na);
      }
      for (size_t j = 0; j < B.size(); ++j) {
        const Vec3 d = B[j] - A[yx[j]];
        total += d.squared_norm() / nb;
        dB[j] += d * (2.0 / nb);
        dA[yx[j]] -= d * (2.0 / nb);
      }

      for (size_t i = 0; i < A.size(); ++i) {
        const Vec3 src = idx.empty() ? cen : X.points[idx[i]];
        pose_inverse_apply_backward(T, src, dA[i], G.poses[m], nullptr);
      }
      for (size_t j = 0; j < B.size(); ++j) {
        for (int i = 0; i < model.num_shapes(); ++i) {
          const double wi = sel.W[i][m];
          if (wi != 0.0) G.canon_points[i][j] += dB[j] * wi;
          dW[i][m] += model.shapes[i].canon_points[j].dot(dB[j]);
        }
      }
    }
    return total;
  }

  // L_r = L_{P->X} + L_{X->P}, with cached canonical surface samples reused
  // by the overlap term.
  double prim_points_term(std::vector<std::vector<Vec3>>& surf_canon,
                          std::vector<std::vector<Vec3>>& surf_obj,
                          std::vector<Superquadric>& blended,
                          double& l_px, double& l_xp) {
    const int mt = model.num_parts();
    const auto angles = sq_surface_grid(ctx.surface_samples);
    const int nr = (int)angles.size();
    surf_canon.assign(mt, {});
    surf_obj.assign(mt, {});
    blended.resize(mt);
    for (int m = 0; m < mt; ++m) {
      blended[m] = blend_prim(model, sel.W, m);
      surf_canon[m].reserve(nr);
      surf_obj[m].reserve(nr);
      for (const auto& [eta, omega] : angles) {
        const Vec3 s = sq_surface_point(blended[m], eta, omega);
        surf_canon[m].push_back(s);
        surf_obj[m].push_back(pose_apply(model.poses[m], s));
      }
    }

    // primitives -> points
    l_px = 0;
    for (int m = 0; m < mt; ++m) {
      PrimGrad dphi;
      const auto& nn = corr->surf_to_x[m];
      for (int k = 0; k < nr; ++k) {
        const Vec3 d = surf_obj[m][k] - X.points[nn[k]];
        l_px += d.squared_norm() / (mt * nr);
        const Vec3 ds_obj = d * (2.0 / (mt * nr));
        Vec3 ds_canon;
        pose_apply_backward(model.poses[m], surf_canon[m][k], ds_obj,
                            G.poses[m], &ds_canon);
        sq_surface_point_backward(blended[m], angles[k].first,
                                  angles[k].second, ds_canon, dphi);
      }
      distribute_prim(model, sel.W, m, dphi, G, dW);
    }

    // points -> primitives (radial distance in each part's canonical frame)
    l_xp = 0;
    const double inv_n = 1.0 / X.size();
    for (int m = 0; m < mt; ++m) {
      PrimGrad dphi;
      for (int i : corr->partition[m]) {
        const Vec3 xh = pose_inverse_apply(model.poses[m], X.points[i]);
        Vec3 dxh;
        l_xp += inv_n * sq_radial_sq_grad(blended[m], xh, inv_n, dphi, &dxh);
        pose_inverse_apply_backward(model.poses[m], X.points[i], dxh,
                                    G.poses[m], nullptr);
      }
      distribute_prim(model, sel.W, m, dphi, G, dW);
    }
    return l_px + l_xp;
  }

  double overlap_term(const std::vector<std::vector<Vec3>>& surf_canon,
                      const std::vector<std::vector<Vec3>>& surf_obj,
                      const std::vector<Superquadric>& blended,
                      double weight) {
    const int mt = model.num_parts();
    if (mt < 2) return 0;
    const auto angles = sq_surface_grid(ctx.surface_samples);
    const int nr = (int)angles.size();
    const double coef = 1.0 / (mt * (mt - 1) * nr);
    double total = 0;
    std::vector<PrimGrad> dphi(mt);
    for (int m = 0; m < mt; ++m) {
      for (int mp = 0; mp < mt; ++mp) {
        if (mp == m) continue;
        for (int k = 0; k < nr; ++k) {
          const Vec3& y = surf_obj[mp][k];
          const Vec3 yh = pose_inverse_apply(model.poses[m], y);
          const double H = sq_indicator(blended[m], yh);
          if (H >= w.s) continue;
          total += coef * (w.s - H);
          Vec3 dyh;
          sq_indicator_grad(blended[m], yh, -coef * weight, dphi[m], &dyh);
          Vec3 dy_obj;
          pose_inverse_apply_backward(model.poses[m], y, dyh, G.poses[m],
                                      &dy_obj);
          Vec3 ds_canon;
          pose_apply_backward(model.poses[mp], surf_canon[mp][k], dy_obj,
                              G.poses[mp], &ds_canon);
          sq_surface_point_backward(blended[mp], angles[k].first,
                                    angles[k].second, ds_canon, dphi[mp]);
        }
      }
    }
    for (int m = 0; m < mt; ++m) distribute_prim(model, sel.W, m, dphi[m], G, dW);
    return total;
  }

  double diversity_term(double weight) {
    const int ms = model.num_shapes();
    if (ms < 2) return 0;
    double ssq = 0;
    for (int i = 0; i < ms; ++i)
      for (int j = 0; j < ms; ++j)
        if (j != i)
          ssq += squared_dist(model.shapes[i].prim.alpha,
                              model.shapes[j].prim.alpha);
    const double denom = (double)ms * (ms - 1);
    const double v = std::tanh(-w.c1 * ssq / denom);
    const double dv = weight * (1.0 - v * v) * (-w.c1 / denom);
    for (int i = 0; i < ms; ++i) {
      Vec3 acc;
      for (int j = 0; j < ms; ++j)
        if (j != i)
          acc += (model.shapes[i].prim.alpha - model.shapes[j].prim.alpha) * 4.0;
      G.prims[i].d_alpha += acc * dv;
    }
    return v;
  }

  double assignment_term(double weight) {
    const int ms = model.num_shapes(), mt = model.num_parts();
    double total = 0;
    for (int i = 0; i < ms; ++i) {
      double used = 0;
      for (int j = 0; j < mt; ++j) used += sel.W[i][j];
      if (used < 1.0) {
        total += (1.0 - used) / ms;
        for (int j = 0; j < mt; ++j) dW[i][j] -= weight / ms;
      }
    }
    return total;
  }

  LossReport finish(double total, std::map<std::string, double> terms) {
    backprop_selection(sel.soft, dW, model.tau, G.logits);
    LossReport r;
    r.total = total;
    r.terms = std::move(terms);
    r.gradient = G.flatten(layout_of(model));
    return r;
  }
};

} // namespace

Correspondences compute_correspondences(const PointCloud& X,
                                        const PartsModel& model,
                                        const EvalContext& ctx, bool stage1,
                                        bool stage2) {
  Selection sel = make_selection(model, ctx);
  Correspondences c;
  c.partition = partition_by_primitive(X, hard_prims(model, sel.hot));
  const int mt = model.num_parts();
  if (stage2) {
    const Vec3 cen = centroid_of(X);
    c.x_to_y.resize(mt);
    c.y_to_x.resize(mt);
    for (int m = 0; m < mt; ++m) {
      std::vector<Vec3> A;
      if (c.partition[m].empty()) {
        A.push_back(pose_inverse_apply(model.poses[m], cen));
      } else {
        for (int i : c.partition[m])
          A.push_back(pose_inverse_apply(model.poses[m], X.points[i]));
      }
      const std::vector<Vec3> B = blend_points(model, sel.W, m);
      c.x_to_y[m] = nearest_indices(A, B);
      c.y_to_x[m] = nearest_indices(B, A);
    }
  }
  if (stage1) {
    const auto angles = sq_surface_grid(ctx.surface_samples);
    c.surf_to_x.resize(mt);
    for (int m = 0; m < mt; ++m) {
      const Superquadric p = blend_prim(model, sel.W, m);
      std::vector<Vec3> S;
      S.reserve(angles.size());
      for (const auto& [eta, omega] : angles)
        S.push_back(pose_apply(model.poses[m], sq_surface_point(p, eta, omega)));
      c.surf_to_x[m] = nearest_indices(S, X.points);
    }
  }
  return c;
}

LossReport stage1_objective(const PointCloud& X, const PartsModel& model,
                            const LossWeights& w, const EvalContext& ctx) {
  Evaluator ev(X, model, w, ctx);
  ev.prepare(/*stage1=*/true, /*stage2=*/false);
  std::vector<std::vector<Vec3>> surf_canon, surf_obj;
  std::vector<Superquadric> blended;
  double l_px = 0, l_xp = 0;
  const double l_r =
      ev.prim_points_term(surf_canon, surf_obj, blended, l_px, l_xp);
  const double l_o =
      w.w_o != 0 ? ev.overlap_term(surf_canon, surf_obj, blended, w.w_o) : 0;
  const double l_d = w.w_d != 0 ? ev.diversity_term(w.w_d) : 0;
  const double l_a = ev.assignment_term(w.w_a);
  const double total = l_r + w.w_o * l_o + w.w_d * l_d + w.w_a * l_a;
  return ev.finish(total, {{"L_r", l_r}, {"L_px", l_px}, {"L_xp", l_xp},
                           {"L_o", l_o}, {"L_d", l_d}, {"L_a", l_a}});
}

LossReport stage2_objective(const PointCloud& X, const PartsModel& model,
                            const LossWeights& w, const EvalContext& ctx) {
  Evaluator ev(X, model, w, ctx);
  ev.prepare(/*stage1=*/false, /*stage2=*/true);
  const double l_p = ev.points_term();
  const double l_a = ev.assignment_term(w.w_a);
  const double total = l_p + w.w_a * l_a;
  return ev.finish(total, {{"L_p", l_p}, {"L_a", l_a}});
}

double points_loss(const PointCloud& X, const PartsModel& model) {
  LossWeights w;
  w.w_a = 0;
  return stage2_objective(X, model, w).terms.at("L_p");
}

double prim_points_loss(const PointCloud& X, const PartsModel& model) {
  LossWeights w;
  w.w_o = w.w_d = w.w_a = 0;
  return stage1_objective(X, model, w).terms.at("L_r");
}

double overlap_loss(const std::vector<std::pair<Superquadric, Pose>>& prims,
                    double s, int surface_samples) {
  const int mt = (int)prims.size();
  if (mt < 2) return 0;
  const auto angles = sq_surface_grid(surface_samples);
  const int nr = (int)angles.size();
  std::vector<std::vector<Vec3>> surf(mt);
  for (int m = 0; m < mt; ++m)
    for (const auto& [eta, omega] : angles)
      surf[m].push_back(
          pose_apply(prims[m].second, sq_surface_point(prims[m].first, eta, omega)));
  double total = 0;
  for (int m = 0; m < mt; ++m)
    for (int mp = 0; mp < mt; ++mp) {
      if (mp == m) continue;
      for (const Vec3& y : surf[mp]) {
        const double H = sq_indicator(prims[m].first,
                                      pose_inverse_apply(prims[m].second, y));
        total += std::max(s - H, 0.0) / (mt * (mt - 1) * nr);
      }
    }
  return total;
}

double diversity_loss(const std::vector<Vec3>& alphas, double c1) {
  const int ms = (int)alphas.size();
  if (ms < 2) return 0;
  double ssq = 0;
  for (int i = 0; i < ms; ++i)
    for (int j = 0; j < ms; ++j)
      if (j != i) ssq += squared_dist(alphas[i], alphas[j]);
  return std::tanh(-c1 * ssq / ((double)ms * (ms - 1)));
}

FiniteDiffReport finite_diff_check(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, const std::vector<double>& analytic,
    double h) {
  FiniteDiffReport rep;
  std::vector<double> xp = x;
  for (size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    const double fd = (fp - fm) / (2 * h);
    const double an = analytic[i];
    if (std::abs(fd) < 1e-7 && std::abs(an) < 1e-7) continue;
    const double rel =
        std::abs(fd - an) / std::max({1e-4, std::abs(fd), std::abs(an)});
    if (rel > rep.max_rel_error) {
      rep.max_rel_error = rel;
      rep.worst_index = (int)i;
    }
  }
  return rep;
}

} // namespace spa
