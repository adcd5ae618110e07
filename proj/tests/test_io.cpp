#include "doctest.h"

#include "spa/io.hpp"
#include "spa/synth.hpp"

#include <cstdio>
#include <fstream>
#include <random>

using namespace spa;

namespace {

PointCloud random_cloud(int n, bool labels, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PointCloud c;
  for (int i = 0; i < n; ++i) {
    c.points.push_back({g(rng), g(rng), g(rng)});
    if (labels) c.labels.push_back(i % 3);
  }
  return c;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/spa_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("point text round trips are value-exact and byte-stable") {
  for (bool labels : {false, true}) {
    const PointCloud c = random_cloud(57, labels, labels ? 2 : 1);
    const std::string text = points_to_string(c);
    const PointCloud back = points_from_string(text);
    REQUIRE(back.size() == c.size());
    CHECK(back.has_labels() == labels);
    for (int i = 0; i < c.size(); ++i) {
      CHECK(back.points[i].x == c.points[i].x);
      CHECK(back.points[i].y == c.points[i].y);
      CHECK(back.points[i].z == c.points[i].z);
      if (labels) CHECK(back.labels[i] == c.labels[i]);
    }
    // serialize(parse(serialize(x))) is byte-identical
    CHECK(points_to_string(back) == text);
  }
}

TEST_CASE("point parser handles comments and rejects garbage") {
  const PointCloud c =
      points_from_string("# header\n1 2 3 # trailing\n\n4 5 6\n");
  REQUIRE(c.size() == 2);
  CHECK(c.points[1].x == 4);
  CHECK(!c.has_labels());

  CHECK_THROWS_AS(points_from_string("# nothing here\n"), std::runtime_error);
  CHECK_THROWS_AS(points_from_string("1 2 3 0\n4 5 6\n"), std::runtime_error);
}

TEST_CASE("point file io") {
  TempFile f("points.xyz");
  const PointCloud c = random_cloud(23, true, 5);
  write_points(f.path, c);
  const PointCloud back = read_points(f.path);
  CHECK(points_to_string(back) == points_to_string(c));

  CHECK_THROWS_AS(read_points("/nonexistent/path/file.xyz"), std::runtime_error);
}

TEST_CASE("model text round trips are byte-stable") {
  SynthSpec spec;
  spec.tmpl = Template::ChairArms;
  spec.points_per_part = 20;
  spec.seed = 11;
  PartsModel model = generate(spec).truth;
  model.tau = 0.75;
  model.poses[1].q = {0.9, -0.1, 0.2, 0.4};
  model.shapes[0].prim.taper_x = -0.31;

  const std::string text = model_to_string(model);
  const PartsModel back = model_from_string(text);
  CHECK(model_to_string(back) == text);
  CHECK(back.num_shapes() == model.num_shapes());
  CHECK(back.num_parts() == model.num_parts());
  CHECK(back.points_per_part() == model.points_per_part());
  CHECK(back.tau == model.tau);
  CHECK(back.poses[1].q.z == model.poses[1].q.z);
  CHECK(back.frozen_assignment() == model.frozen_assignment());
}

TEST_CASE("model parser rejects malformed documents") {
  CHECK_THROWS_AS(model_from_string("garbage\n"), std::runtime_error);
  CHECK_THROWS_AS(model_from_string("spa-model v2\n"), std::runtime_error);
  CHECK_THROWS_AS(
      model_from_string("spa-model v1\nshapes 2\nparts 1\npoints_per_part 4\ntau 1\n"),
      std::runtime_error); // M_s > M_T
  SynthSpec spec;
  const std::string good = model_to_string(generate(spec).truth);
  CHECK_THROWS_AS(model_from_string(good.substr(0, good.size() / 2)),
                  std::runtime_error);
}

TEST_CASE("model file io") {
  TempFile f("model.model");
  SynthSpec spec;
  spec.tmpl = Template::PlaneWings;
  spec.points_per_part = 12;
  const PartsModel model = generate(spec).truth;
  write_model(f.path, model);
  const PartsModel back = read_model(f.path);
  CHECK(model_to_string(back) == model_to_string(model));
}

TEST_CASE("index list round trip") {
  TempFile f("indices.txt");
  const std::vector<int> idx{5, 0, 17, 3, 3};
  write_indices(f.path, idx);
  CHECK(read_indices(f.path) == idx);
}

TEST_CASE("polygon export carries the header and one line per point") {
  TempFile f("cloud.ply");
  const PointCloud c = random_cloud(9, true, 7);
  write_ply(f.path, c);
  std::ifstream in(f.path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "ply");
  int lines = 1;
  bool vertex_count = false;
  while (std::getline(in, line)) {
    ++lines;
    if (line == "element vertex 9") vertex_count = true;
  }
  CHECK(vertex_count);
  CHECK(lines == 8 + 9); // header lines + points
}
