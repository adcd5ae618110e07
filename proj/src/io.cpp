#include "spa/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spa {

namespace {

void fmt(std::ostream& os, double v) {
  char buf[32];
  snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

} // namespace

std::string points_to_string(const PointCloud& cloud) {
  std::ostringstream os;
  os << "# spa-points v1\n";
  const bool lab = cloud.has_labels();
  for (int i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    fmt(os, p.x); os << ' '; fmt(os, p.y); os << ' '; fmt(os, p.z);
    if (lab) os << ' ' << cloud.labels[i];
    os << '\n';
  }
  return os.str();
}

PointCloud points_from_string(const std::string& text) {
  PointCloud cloud;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) continue;
    cloud.points.push_back({x, y, z});
    int label;
    if (ls >> label) cloud.labels.push_back(label);
  }
  if (cloud.points.empty())
    throw std::runtime_error("point file contains no points");
  if (!cloud.labels.empty() && cloud.labels.size() != cloud.points.size())
    throw std::runtime_error("point file mixes labeled and unlabeled lines");
  return cloud;
}

void write_points(const std::string& path, const PointCloud& cloud) {
  spit(path, points_to_string(cloud));
}

PointCloud read_points(const std::string& path) {
  return points_from_string(slurp(path));
}

std::string model_to_string(const PartsModel& model) {
  std::ostringstream os;
  os << "spa-model v1\n";
  os << "shapes " << model.num_shapes() << '\n';
  os << "parts " << model.num_parts() << '\n';
  os << "points_per_part " << model.points_per_part() << '\n';
  os << "tau "; fmt(os, model.tau); os << '\n';
  for (int i = 0; i < model.num_shapes(); ++i) {
    const Superquadric& p = model.shapes[i].prim;
    os << "shape " << i << '\n';
    os << "alpha "; fmt(os, p.alpha.x); os << ' '; fmt(os, p.alpha.y);
    os << ' '; fmt(os, p.alpha.z); os << '\n';
    os << "eps "; fmt(os, p.eps1); os << ' '; fmt(os, p.eps2); os << '\n';
    os << "taper "; fmt(os, p.taper_x); os << ' '; fmt(os, p.taper_y); os << '\n';
    os << "points\n";
    for (const Vec3& v : model.shapes[i].canon_points) {
      fmt(os, v.x); os << ' '; fmt(os, v.y); os << ' '; fmt(os, v.z); os << '\n';
    }
  }
  for (int m = 0; m < model.num_parts(); ++m) {
    const Pose& T = model.poses[m];
    os << "pose " << m << '\n';
    os << "q "; fmt(os, T.q.w); os << ' '; fmt(os, T.q.x); os << ' ';
    fmt(os, T.q.y); os << ' '; fmt(os, T.q.z); os << '\n';
    os << "t "; fmt(os, T.t.x); os << ' '; fmt(os, T.t.y); os << ' ';
    fmt(os, T.t.z); os << '\n';
  }
  os << "lambda\n";
  for (int i = 0; i < model.num_shapes(); ++i) {
    for (int m = 0; m < model.num_parts(); ++m) {
      if (m) os << ' ';
      fmt(os, model.logits[i][m]);
    }
    os << '\n';
  }
  return os.str();
}

PartsModel model_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  in >> tok;
  std::string ver;
  in >> ver;
  if (tok != "spa-model" || ver != "v1")
    throw std::runtime_error("not a spa-model v1 file");
  int ms = 0, mt = 0, np = 0;
  PartsModel model;
  auto expect = [&](const std::string& want) {
    in >> tok;
    if (tok != want)
      throw std::runtime_error("model parse: expected '" + want + "', got '" +
                               tok + "'");
  };
  expect("shapes"); in >> ms;
  expect("parts"); in >> mt;
  expect("points_per_part"); in >> np;
  expect("tau"); in >> model.tau;
  if (ms < 1 || mt < ms || np < 1)
    throw std::runtime_error("model parse: invalid dimensions");
  model.shapes.resize(ms);
  model.poses.resize(mt);
  model.logits = zeros(ms, mt);
  for (int i = 0; i < ms; ++i) {
    int idx;
    expect("shape"); in >> idx;
    Superquadric& p = model.shapes[i].prim;
    expect("alpha"); in >> p.alpha.x >> p.alpha.y >> p.alpha.z;
    expect("eps"); in >> p.eps1 >> p.eps2;
    expect("taper"); in >> p.taper_x >> p.taper_y;
    expect("points");
    model.shapes[i].canon_points.resize(np);
    for (Vec3& v : model.shapes[i].canon_points) in >> v.x >> v.y >> v.z;
  }
  for (int m = 0; m < mt; ++m) {
    int idx;
    expect("pose"); in >> idx;
    Pose& T = model.poses[m];
    expect("q"); in >> T.q.w >> T.q.x >> T.q.y >> T.q.z;
    expect("t"); in >> T.t.x >> T.t.y >> T.t.z;
  }
  expect("lambda");
  for (int i = 0; i < ms; ++i)
    for (int m = 0; m < mt; ++m) in >> model.logits[i][m];
  if (!in) throw std::runtime_error("model parse: truncated file");
  model.validate();
  return model;
}

void write_model(const std::string& path, const PartsModel& model) {
  spit(path, model_to_string(model));
}

PartsModel read_model(const std::string& path) {
  return model_from_string(slurp(path));
}

void write_indices(const std::string& path, const std::vector<int>& idx) {
  std::ostringstream os;
  for (int i : idx) os << i << '\n';
  spit(path, os.str());
}

std::vector<int> read_indices(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<int> idx;
  int v;
  while (in >> v) idx.push_back(v);
  return idx;
}

void write_ply(const std::string& path, const PointCloud& cloud) {
  std::ostringstream os;
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << cloud.size() << '\n';
  os << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_labels()) os << "property int part\n";
  os << "end_header\n";
  for (int i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    fmt(os, p.x); os << ' '; fmt(os, p.y); os << ' '; fmt(os, p.z);
    if (cloud.has_labels()) os << ' ' << cloud.labels[i];
    os << '\n';
  }
  spit(path, os.str());
}

} // namespace spa
