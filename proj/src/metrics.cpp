#include "spa/metrics.hpp"

#include "spa/fit.hpp"
#include "spa/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace spa {

CloudSet CloudSet::with_bounds(std::vector<PointCloud> clouds, Vec3 lo, Vec3 hi) {
  if (clouds.empty()) throw std::invalid_argument("CloudSet: empty set");
  return {std::move(clouds), lo, hi};
}

CloudSet CloudSet::from_clouds(std::vector<PointCloud> clouds) {
  if (clouds.empty()) throw std::invalid_argument("CloudSet: empty set");
  Vec3 lo{1e30, 1e30, 1e30}, hi{-1e30, -1e30, -1e30};
  for (const auto& c : clouds)
    for (const Vec3& p : c.points) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
  // expand to a cube so voxels are isotropic
  const Vec3 c = (lo + hi) * 0.5;
  double half = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1e-9}) * 0.5;
  lo = c - Vec3{half, half, half};
  hi = c + Vec3{half, half, half};
  return {std::move(clouds), lo, hi};
}

// Jonker-Volgenant style shortest augmenting path assignment, O(n^3).
double emd(const PointCloud& X, const PointCloud& Y) {
  const int n = X.size();
  if (n != Y.size()) throw std::invalid_argument("emd: size mismatch");
  if (n == 0 || n > 512)
    throw std::invalid_argument("emd: requires 1 <= n <= 512");
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[i][j] = (X.points[i] - Y.points[j]).norm();

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
          if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
          if (minv[j] < delta) { delta = minv[j]; j1 = j; }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0;
  for (int j = 1; j <= n; ++j)
    if (p[j]) total += cost[p[j] - 1][j - 1];
  return total / n;
}

double cloud_distance(const PointCloud& A, const PointCloud& B, PairDistance d) {
  return d == PairDistance::CD ? chamfer(A, B) : emd(A, B);
}

double mmd(const CloudSet& x_set, const CloudSet& y_set, PairDistance d) {
  double sum = 0;
  for (const auto& X : x_set.clouds) {
    double best = std::numeric_limits<double>::max();
    for (const auto& Y : y_set.clouds)
      best = std::min(best, cloud_distance(X, Y, d));
    sum += best;
  }
  return sum / x_set.clouds.size();
}

double cov(const CloudSet& x_set, const CloudSet& y_set, PairDistance d) {
  std::vector<char> covered(x_set.clouds.size(), 0);
  for (const auto& Y : y_set.clouds) {
    int best = 0;
    double bd = std::numeric_limits<double>::max();
    for (size_t j = 0; j < x_set.clouds.size(); ++j) {
      const double v = cloud_distance(x_set.clouds[j], Y, d);
      if (v < bd) { bd = v; best = (int)j; }
    }
    covered[best] = 1;
  }
  const double hits = std::accumulate(covered.begin(), covered.end(), 0.0);
  return hits / x_set.clouds.size();
}

namespace {

std::vector<double> voxel_histogram(const CloudSet& set, Vec3 lo, Vec3 hi,
                                    int res) {
  std::vector<double> h(res * res * res, 0.0);
  const Vec3 span = hi - lo;
  double total = 0;
  for (const auto& c : set.clouds)
    for (const Vec3& p : c.points) {
      auto cell = [&](double v, double l, double s) {
        const int k = (int)std::floor((v - l) / s * res);
        return std::clamp(k, 0, res - 1);
      };
      const int ix = cell(p.x, lo.x, span.x);
      const int iy = cell(p.y, lo.y, span.y);
      const int iz = cell(p.z, lo.z, span.z);
      h[(ix * res + iy) * res + iz] += 1.0;
      total += 1.0;
    }
  for (double& v : h) v /= total;
  return h;
}

double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  return s;
}

} // namespace

double jsd(const CloudSet& x_set, const CloudSet& y_set, int grid_res) {
  // joint bounds keep the measure symmetric
  const Vec3 lo{std::min(x_set.lo.x, y_set.lo.x), std::min(x_set.lo.y, y_set.lo.y),
                std::min(x_set.lo.z, y_set.lo.z)};
  const Vec3 hi{std::max(x_set.hi.x, y_set.hi.x), std::max(x_set.hi.y, y_set.hi.y),
                std::max(x_set.hi.z, y_set.hi.z)};
  const auto px = voxel_histogram(x_set, lo, hi, grid_res);
  const auto py = voxel_histogram(y_set, lo, hi, grid_res);
  std::vector<double> m(px.size());
  for (size_t i = 0; i < px.size(); ++i) m[i] = 0.5 * (px[i] + py[i]);
  return 0.5 * kl(px, m) + 0.5 * kl(py, m);
}

std::pair<double, double> self_similarity(const PartsModel& model) {
  const int mt = model.num_parts();
  if (mt < 2)
    throw std::invalid_argument("self_similarity: needs at least two parts");
  const std::vector<int> hot = model.frozen_assignment();
  double sum = 0, mn = std::numeric_limits<double>::max();
  int pairs = 0;
  for (int j = 0; j < mt; ++j)
    for (int jp = j + 1; jp < mt; ++jp) {
      PointCloud a, b;
      a.points = model.shapes[hot[j]].canon_points;
      b.points = model.shapes[hot[jp]].canon_points;
      const double cd = hot[j] == hot[jp] ? 0.0 : chamfer(a, b);
      sum += cd;
      mn = std::min(mn, cd);
      ++pairs;
    }
  return {sum / pairs, mn};
}

double counts_sdev(const std::vector<int>& counts) {
  const double n = (double)counts.size();
  const double mean =
      std::accumulate(counts.begin(), counts.end(), 0.0) / n;
  double ss = 0;
  for (int c : counts) ss += (c - mean) * (c - mean);
  return std::sqrt(ss / n);
}

PartStats part_point_stats(const PointCloud& X, const PartsModel& model) {
  const Assembly a = assemble(model);
  const std::vector<int> part = nearest_primitive(X.points, a.prims);
  PartStats st;
  st.counts.assign(model.num_parts(), 0);
  for (int p : part) st.counts[p]++;
  st.sdev = counts_sdev(st.counts);
  return st;
}

PointCloud balanced_resample(const PartsModel& model,
                             const std::vector<double>& train_counts,
                             uint64_t seed) {
  const Assembly a = assemble(model);
  const int mt = model.num_parts();
  if ((int)train_counts.size() != mt)
    throw std::invalid_argument("balanced_resample: one count per part required");
  const int np = model.points_per_part();
  const double total_rate =
      std::accumulate(train_counts.begin(), train_counts.end(), 0.0);
  const double n_total = (double)np * mt;
  std::mt19937_64 rng(seed);
  PointCloud out;
  for (int m = 0; m < mt; ++m) {
    int want = (int)std::lround(n_total * train_counts[m] / total_rate);
    want = std::clamp(want, 0, np);
    std::vector<int> idx(np);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    for (int k : idx) {
      out.points.push_back(a.cloud.points[m * np + k]);
      out.labels.push_back(m);
    }
  }
  return out;
}

} // namespace spa
