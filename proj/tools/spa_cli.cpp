// Command-line surface tying the pipeline together: synth, fit, corrupt,
// complete, eval, export.
#include "CLI11.hpp"

#include "spa/complete.hpp"
#include "spa/fit.hpp"
#include "spa/io.hpp"
#include "spa/metrics.hpp"
#include "spa/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace spa;

namespace {

uint64_t default_seed() {
  if (const char* env = std::getenv("SPA_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

struct FitFlags {
  int ms = 2, mt = 5;
  FitConfig config;
  std::string preset;
  bool wo_set = false, wd_set = false, wa_set = false, s_set = false;
  double wo = 0, wd = 0, wa = 0.1, s = 1.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--ms", ms, "number of canonical shapes M_s");
    cmd->add_option("--mt", mt, "number of parts M_T");
    cmd->add_option("--preset", preset, "category weight preset: table|chair|airplane");
    cmd->add_option("--wo", wo, "overlap weight")->each([this](const std::string&) { wo_set = true; });
    cmd->add_option("--wd", wd, "diversity weight")->each([this](const std::string&) { wd_set = true; });
    cmd->add_option("--wa", wa, "assignment weight")->each([this](const std::string&) { wa_set = true; });
    cmd->add_option("--s", s, "overlap threshold")->each([this](const std::string&) { s_set = true; });
    cmd->add_option("--np", config.points_per_part, "points per part N_p");
    cmd->add_option("--stage1-iters", config.stage1_iters, "stage 1 iterations");
    cmd->add_option("--stage2-iters", config.stage2_iters, "stage 2 iterations");
    cmd->add_option("--restarts", config.restarts, "random restarts");
    cmd->add_option("--surface-samples", config.surface_samples, "surface samples per part");
  }

  FitConfig resolve(uint64_t seed) {
    // precedence: explicit flags > preset > defaults
    LossWeights w;
    if (!preset.empty()) w = LossWeights::preset(preset);
    if (wo_set) w.w_o = wo;
    if (wd_set) w.w_d = wd;
    if (wa_set) w.w_a = wa;
    if (s_set) w.s = s;
    config.weights = w;
    config.seed = seed;
    return config;
  }
};

void write_report(const std::string& path, const std::string& invocation,
                  uint64_t seed, const FitResult& result, double seconds) {
  std::ostringstream os;
  os << "# spa run report\n";
  os << "invocation " << invocation << '\n';
  os << "seed " << seed << '\n';
  os << "seconds " << seconds << '\n';
  os << "final_total " << result.final_total << '\n';
  os << "failed_restarts " << result.failed_restarts << '\n';
  os << "restart_totals";
  for (double t : result.restart_totals) os << ' ' << t;
  os << '\n';
  std::ofstream out(path);
  out << os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"parts-based point cloud decomposition with shared shapes"};
  app.require_subcommand(1);
  app.set_config("--config");

  uint64_t seed = default_seed();
  app.add_option("--seed", seed, "rng seed (env SPA_SEED)");

  // ---- synth ----
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic labeled object");
  std::string synth_template = "table", synth_out = "synth";
  double synth_sigma = 0.0;
  int synth_ppp = 256;
  c_synth->add_option("--template", synth_template, "table|chair|plane");
  c_synth->add_option("--sigma", synth_sigma, "noise standard deviation");
  c_synth->add_option("--points-per-part", synth_ppp, "points per part");
  c_synth->add_option("--out", synth_out, "output prefix")->required();

  // ---- fit ----
  auto* c_fit = app.add_subcommand("fit", "fit a parts model to a point cloud");
  std::string fit_in, fit_out, fit_report, fit_trace;
  FitFlags fit_flags;
  c_fit->add_option("--input", fit_in, "input point file")->required();
  c_fit->add_option("--out", fit_out, "output model file")->required();
  c_fit->add_option("--report", fit_report, "run report file");
  c_fit->add_option("--trace", fit_trace, "loss trace table file");
  fit_flags.add_to(c_fit);

  // ---- corrupt ----
  auto* c_corrupt = app.add_subcommand("corrupt", "remove points from one part");
  std::string cor_in, cor_kind = "cut", cor_out, cor_removed;
  int cor_part = 0, cor_k = 100;
  c_corrupt->add_option("--input", cor_in, "labeled point file")->required();
  c_corrupt->add_option("--kind", cor_kind, "cut|hole");
  c_corrupt->add_option("--part", cor_part, "target part label");
  c_corrupt->add_option("--k", cor_k, "points to remove");
  c_corrupt->add_option("--out", cor_out, "corrupted point file")->required();
  c_corrupt->add_option("--removed", cor_removed, "removed-index file");

  // ---- complete ----
  auto* c_complete = app.add_subcommand("complete", "complete an incomplete cloud");
  std::string cmp_in, cmp_mode = "s", cmp_model, cmp_out;
  FitFlags cmp_flags;
  c_complete->add_option("--input", cmp_in, "incomplete point file")->required();
  c_complete->add_option("--mode", cmp_mode, "r|s");
  c_complete->add_option("--model", cmp_model, "fitted model (mode s; fitted if absent)");
  c_complete->add_option("--out", cmp_out, "completed point file")->required();
  cmp_flags.add_to(c_complete);

  // ---- eval ----
  auto* c_eval = app.add_subcommand("eval", "set-level metrics between two cloud dirs");
  std::string ev_a, ev_b, ev_metrics = "jsd,mmd-cd,cov-cd", ev_out;
  int ev_grid = 28;
  c_eval->add_option("--set-a", ev_a, "reference cloud directory")->required();
  c_eval->add_option("--set-b", ev_b, "generated cloud directory")->required();
  c_eval->add_option("--metrics", ev_metrics, "comma list: jsd,mmd-cd,mmd-emd,cov-cd,cov-emd");
  c_eval->add_option("--grid-res", ev_grid, "JSD voxel resolution");
  c_eval->add_option("--out", ev_out, "report file (stdout if absent)");

  // ---- export ----
  auto* c_export = app.add_subcommand("export", "export model points or primitive surfaces");
  std::string ex_model, ex_what = "points", ex_out;
  int ex_nsurf = 512;
  bool ex_ply = false;
  c_export->add_option("--model", ex_model, "model file")->required();
  c_export->add_option("--what", ex_what, "points|primitives");
  c_export->add_option("--n-surface", ex_nsurf, "surface samples per part");
  c_export->add_flag("--ply", ex_ply, "write polygon-file format instead of text");
  c_export->add_option("--out", ex_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*c_synth) {
    SynthSpec spec;
    spec.tmpl = template_from_name(synth_template);
    spec.noise_sigma = synth_sigma;
    spec.points_per_part = synth_ppp;
    spec.seed = seed;
    const SynthObject obj = generate(spec);
    write_points(synth_out + "_points.xyz", obj.cloud);
    write_model(synth_out + "_truth.model", obj.truth);
    std::cout << "wrote " << synth_out << "_points.xyz (" << obj.cloud.size()
              << " points) and " << synth_out << "_truth.model\n";
    return 0;
  }

  if (*c_fit) {
    const PointCloud X = read_points(fit_in);
    const FitConfig config = fit_flags.resolve(seed);
    const auto t0 = std::chrono::steady_clock::now();
    const FitResult result = fit(X, fit_flags.ms, fit_flags.mt, config);
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_model(fit_out, result.model);
    if (!fit_trace.empty()) {
      std::ofstream out(fit_trace);
      out << result.trace.to_table();
    }
    if (!fit_report.empty()) {
      std::ostringstream inv;
      for (int i = 0; i < argc; ++i) inv << (i ? " " : "") << argv[i];
      write_report(fit_report, inv.str(), seed, result, secs);
    }
    std::cout << "final stage-2 total " << result.final_total << " ("
              << result.failed_restarts << " failed restarts)\n";
    return 0;
  }

  if (*c_corrupt) {
    const PointCloud X = read_points(cor_in);
    std::mt19937_64 rng(seed);
    const CorruptionResult res = cor_kind == "hole"
                                     ? corrupt_hole(X, cor_part, cor_k, rng)
                                     : corrupt_cut(X, cor_part, cor_k, rng);
    write_points(cor_out, res.cloud);
    if (!cor_removed.empty()) write_indices(cor_removed, res.removed);
    std::cout << "removed " << res.removed.size() << " points from part "
              << cor_part << '\n';
    return 0;
  }

  if (*c_complete) {
    const PointCloud X = read_points(cmp_in);
    PointCloud out;
    if (cmp_mode == "r") {
      out = completion_r(X, cmp_flags.ms, cmp_flags.mt, cmp_flags.resolve(seed));
    } else {
      PartsModel model = cmp_model.empty()
                             ? fit(X, cmp_flags.ms, cmp_flags.mt,
                                   cmp_flags.resolve(seed)).model
                             : read_model(cmp_model);
      out = completion_s(X, model);
    }
    write_points(cmp_out, out);
    std::cout << "completed cloud has " << out.size() << " points\n";
    return 0;
  }

  if (*c_eval) {
    auto load_dir = [](const std::string& dir) {
      std::vector<std::string> files;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      std::vector<PointCloud> clouds;
      for (const auto& f : files) clouds.push_back(read_points(f));
      if (clouds.empty()) throw std::runtime_error("no point files in " + dir);
      return CloudSet::from_clouds(std::move(clouds));
    };
    const CloudSet A = load_dir(ev_a), B = load_dir(ev_b);
    std::ostringstream os;
    std::stringstream names(ev_metrics);
    std::string name;
    while (std::getline(names, name, ',')) {
      double v = 0;
      if (name == "jsd") v = jsd(A, B, ev_grid);
      else if (name == "mmd-cd") v = mmd(A, B, PairDistance::CD);
      else if (name == "mmd-emd") v = mmd(A, B, PairDistance::EMD);
      else if (name == "cov-cd") v = cov(A, B, PairDistance::CD);
      else if (name == "cov-emd") v = cov(A, B, PairDistance::EMD);
      else throw std::runtime_error("unknown metric: " + name);
      os << name << ' ' << v << '\n';
    }
    if (ev_out.empty()) std::cout << os.str();
    else { std::ofstream f(ev_out); f << os.str(); }
    return 0;
  }

  if (*c_export) {
    const PartsModel model = read_model(ex_model);
    PointCloud out;
    if (ex_what == "points") {
      out = assemble(model).cloud;
    } else if (ex_what == "primitives") {
      const Assembly a = assemble(model);
      std::mt19937_64 rng(seed);
      for (int m = 0; m < (int)a.prims.size(); ++m) {
        const PointCloud surf = sq_sample_surface(a.prims[m].first, ex_nsurf, rng);
        for (const Vec3& p : surf.points) {
          out.points.push_back(pose_apply(a.prims[m].second, p));
          out.labels.push_back(m);
        }
      }
    } else {
      throw std::runtime_error("unknown export target: " + ex_what);
    }
    if (ex_ply) write_ply(ex_out, out);
    else write_points(ex_out, out);
    std::cout << "exported " << out.size() << " points\n";
    return 0;
  }

  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    // distinguish numerical failures from usage/I-O problems
    return std::string(e.what()).find("diverged") != std::string::npos ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
