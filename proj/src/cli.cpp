#include "svo/cli.hpp"

#include "svo/error.hpp"
#include "svo/eval.hpp"
#include "svo/kitti.hpp"
#include "svo/rng.hpp"
#include "svo/synthetic.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#ifndef SVO_VERSION
#define SVO_VERSION "0.0.0"
#endif

namespace svo::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestHeader = "# svo run manifest";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < values.size(); ++i) ss << (i ? "," : "") << values[i];
  return ss.str();
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ConfigError, "manifest key '" + key + "' expects an unsigned integer");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ConfigError, "manifest key '" + key + "' expects an integer");
}

std::string absolute_or_empty(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

// Keeps the base source alive next to an optional slice of it.
struct Source {
  std::unique_ptr<FrameSource> base;
  std::unique_ptr<SliceSource> slice;
  std::string label;

  const FrameSource& get() const { return slice ? *slice : *base; }
};

Source open_source(const RunOptions& o) {
  Source s;
  if (!o.synthetic.empty()) {
    s.base = std::make_unique<SyntheticSequence>(load_scene(o.synthetic));
    s.label = fs::path(o.synthetic).stem().string();
  } else if (!o.dataset.empty()) {
    s.base = std::make_unique<KittiSequence>(open_sequence(o.dataset, o.sequence));
    s.label = o.sequence;
  } else {
    throw Error(ErrorCode::InvalidArgument, "one of --dataset or --synthetic is required");
  }
  if (!o.frames.empty()) {
    const auto [a, b] = parse_frame_range(o.frames);
    s.slice = std::make_unique<SliceSource>(*s.base, a, b);
  }
  return s;
}

std::string render(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream ss;
  fn(ss);
  return ss.str();
}

PipelineConfig with_threads(PipelineConfig cfg, int threads) {
  cfg.threads = threads;
  cfg.stereo.threads = threads;
  cfg.match.threads = threads;
  return cfg;
}

int cmd_vo(const RunOptions& o, const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Source src = open_source(o);
  const PipelineConfig cfg = with_threads(c.pipeline, o.threads);
  const auto result = run_sequence(src.get(), cfg, make_retina_pattern(), o.seed);
  const fs::path dir(o.out);
  write_file_atomic(dir / "trajectory.txt", render([&](std::ostream& s) { write_poses(s, result.poses); }));
  write_file_atomic(dir / "diagnostics.csv",
                    render([&](std::ostream& s) { write_diagnostics_csv(s, result.diagnostics); }));
  write_file_atomic(dir / "timing.csv", render([&](std::ostream& s) { write_timing_csv(s, result.diagnostics); }));
  out << "frames: " << result.poses.size() << ", fallbacks: " << result.fallbacks << '\n';
  if (cfg.max_fallbacks >= 0 && result.fallbacks > cfg.max_fallbacks) {
    err << "estimation failed on " << result.fallbacks << " frames, budget is " << cfg.max_fallbacks << '\n';
    return 3;
  }
  return 0;
}

int cmd_track_eval(const RunOptions& o, const RunConfig& c, std::ostream& out) {
  const Source src = open_source(o);
  const PipelineConfig base = with_threads(c.pipeline, o.threads);
  const auto pattern = make_retina_pattern();
  std::vector<DescriptorVariant> variants;
  for (const auto& b : o.backends) {
    const auto backend = parse_backend(b);
    variants.push_back({backend, base.stereo_descriptor, true});
    variants.push_back({backend, base.stereo_descriptor, false});
  }
  std::vector<int> budgets = o.feature_budgets;
  if (budgets.empty()) budgets.push_back(base.detector.max_features);
  std::vector<TrackingScoreReport> reports;
  for (int budget : budgets) {
    PipelineConfig cfg = base;
    cfg.detector.max_features = budget;
    reports.push_back(tracking_score(src.get(), cfg, pattern, variants, c.eval));
  }
  const fs::path dir(o.out);
  write_file_atomic(dir / "tracking.csv", render([&](std::ostream& s) { write_tracking_csv(s, src.label, reports); }));
  write_file_atomic(dir / "tracking_steps.csv",
                    render([&](std::ostream& s) { write_tracking_variants_csv(s, src.label, reports); }));
  const std::string table = render([&](std::ostream& s) { write_tracking_table(s, src.label, reports); });
  write_file_atomic(dir / "tracking.txt", table);
  out << table;
  return 0;
}

std::vector<DescriptorVariant> comparison_variants(const PipelineConfig& cfg) {
  return {{cfg.backend, true, true}, {cfg.backend, false, false}};
}

int cmd_inliers(const RunOptions& o, const RunConfig& c, std::ostream& out) {
  const Source src = open_source(o);
  const PipelineConfig cfg = with_threads(c.pipeline, o.threads);
  const auto curves = inlier_curve(src.get(), cfg, make_retina_pattern(), comparison_variants(cfg), o.steps, o.seed);
  const fs::path dir(o.out);
  write_file_atomic(dir / "inliers.csv", render([&](std::ostream& s) { write_inlier_csv(s, curves); }));
  write_file_atomic(dir / "inlier_pairs.csv", render([&](std::ostream& s) { write_inlier_pairs_csv(s, curves); }));
  const std::string table = render([&](std::ostream& s) { write_inlier_table(s, curves); });
  write_file_atomic(dir / "inliers.txt", table);
  out << table;
  return 0;
}

int cmd_repeat_vo(const RunOptions& o, const RunConfig& c, std::ostream& out) {
  const Source src = open_source(o);
  const PipelineConfig cfg = with_threads(c.pipeline, o.threads);
  const auto pattern = make_retina_pattern();
  std::vector<TranslationErrorReport> reports;
  for (const auto& v : comparison_variants(cfg)) {
    reports.push_back(repeated_vo_experiment(src.get(), cfg, pattern, v, o.seeds));
  }
  const fs::path dir(o.out);
  write_file_atomic(dir / "translation.csv", render([&](std::ostream& s) { write_translation_csv(s, reports); }));
  write_file_atomic(dir / "translation_runs.csv",
                    render([&](std::ostream& s) { write_translation_runs_csv(s, reports); }));
  const std::string table = render([&](std::ostream& s) { write_translation_table(s, reports); });
  write_file_atomic(dir / "translation.txt", table);
  out << table;
  return 0;
}

int cmd_synth(const RunOptions& o, std::ostream& out) {
  SyntheticScene scene;
  if (o.kind == "corridor" || o.kind == "static") {
    CorridorOptions opts;
    opts.seed = o.seed;
    opts.frames = o.length;
    opts.noise_sigma = o.noise;
    opts.static_camera = o.kind == "static";
    opts.width = o.width;
    opts.height = o.height;
    opts.fx = o.fx;
    scene = make_corridor_scene(opts);
  } else if (o.kind == "plane") {
    scene = make_plane_scene(o.seed, 10.0, o.width, o.height, o.fx, 0.54);
    scene.noise_sigma = o.noise;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scene kind '" + o.kind + "'");
  }
  const fs::path dir(o.out);
  write_file_atomic(dir / "scene.txt", serialize_scene(scene));
  if (o.kitti) write_kitti_sequence(dir / "kitti", o.sequence, SyntheticSequence(scene));
  out << "scene with " << scene.poses.size() << " poses written to " << (dir / "scene.txt").string() << '\n';
  return 0;
}

}  // namespace

std::string code_version() { return SVO_VERSION; }

std::pair<std::size_t, std::size_t> parse_frame_range(const std::string& text) {
  const auto dots = text.find("..");
  auto bad = [&] { return Error(ErrorCode::InvalidArgument, "frame range must look like a..b, got '" + text + "'"); };
  if (dots == std::string::npos) throw bad();
  try {
    std::size_t used_a = 0;
    std::size_t used_b = 0;
    const std::string a = text.substr(0, dots);
    const std::string b = text.substr(dots + 2);
    const auto first = std::stoull(a, &used_a);
    const auto last = std::stoull(b, &used_b);
    if (used_a != a.size() || used_b != b.size() || last <= first) throw bad();
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
  } catch (const std::logic_error&) {
    throw bad();
  }
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string serialize_manifest(const RunOptions& o, const RunConfig& config) {
  std::ostringstream ss;
  ss << kManifestHeader << '\n';
  auto kv = [&ss](const std::string& k, const std::string& v) { ss << k << " = " << v << '\n'; };
  kv("command", o.command);
  kv("code_version", code_version());
  kv("dataset", o.dataset);
  kv("sequence", o.sequence);
  kv("synthetic", o.synthetic);
  kv("frames", o.frames);
  kv("config_file", o.config_file);
  kv("seed", std::to_string(o.seed));
  kv("seeds", join(o.seeds));
  kv("runs", std::to_string(o.runs));
  kv("feature_budgets", join(o.feature_budgets));
  kv("backends", join(o.backends));
  kv("steps", join(o.steps));
  kv("threads", std::to_string(o.threads));
  kv("out", o.out);
  kv("kind", o.kind);
  kv("length", std::to_string(o.length));
  kv("width", std::to_string(o.width));
  kv("height", std::to_string(o.height));
  {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", o.fx);
    kv("fx", buf);
  }
  {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", o.noise);
    kv("noise", buf);
  }
  kv("kitti", o.kitti ? "true" : "false");
  for (const auto& [k, v] : config_entries(config)) kv("config." + k, v);
  return ss.str();
}

void parse_manifest(const std::string& text, RunOptions& o, RunConfig& config) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (trim(line) != kManifestHeader) throw Error(ErrorCode::ConfigError, "not a run manifest");
  o = RunOptions{};
  config = RunConfig{};
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "bad manifest line '" + line + "'");
    const std::string k = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (k.rfind("config.", 0) == 0) {
      set_config_value(config, k.substr(7), v);
    } else if (k == "command") {
      o.command = v;
    } else if (k == "code_version") {
      // informational
    } else if (k == "dataset") {
      o.dataset = v;
    } else if (k == "sequence") {
      o.sequence = v;
    } else if (k == "synthetic") {
      o.synthetic = v;
    } else if (k == "frames") {
      o.frames = v;
    } else if (k == "config_file") {
      o.config_file = v;
    } else if (k == "seed") {
      o.seed = to_u64(k, v);
    } else if (k == "seeds") {
      o.seeds.clear();
      for (const auto& s : split(v)) o.seeds.push_back(to_u64(k, s));
    } else if (k == "runs") {
      o.runs = to_int(k, v);
    } else if (k == "feature_budgets") {
      o.feature_budgets.clear();
      for (const auto& s : split(v)) o.feature_budgets.push_back(to_int(k, s));
    } else if (k == "backends") {
      o.backends = split(v);
    } else if (k == "steps") {
      o.steps.clear();
      for (const auto& s : split(v)) o.steps.push_back(to_int(k, s));
    } else if (k == "threads") {
      o.threads = to_int(k, v);
    } else if (k == "out") {
      o.out = v;
    } else if (k == "kind") {
      o.kind = v;
    } else if (k == "length") {
      o.length = to_int(k, v);
    } else if (k == "width") {
      o.width = to_int(k, v);
    } else if (k == "height") {
      o.height = to_int(k, v);
    } else if (k == "fx") {
      o.fx = std::stod(v);
    } else if (k == "noise") {
      o.noise = std::stod(v);
    } else if (k == "kitti") {
      o.kitti = v == "true";
    } else {
      throw Error(ErrorCode::ConfigError, "unknown manifest key '" + k + "'");
    }
  }
}

int execute(RunOptions o, const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
  if (o.threads < 1) throw Error(ErrorCode::InvalidArgument, "--threads must be positive");
  o.out = absolute_or_empty(o.out);
  fs::create_directories(o.out);
  write_file_atomic(fs::path(o.out) / "manifest.txt", serialize_manifest(o, config));
  if (o.command == "vo") return cmd_vo(o, config, out, err);
  if (o.command == "track-eval") return cmd_track_eval(o, config, out);
  if (o.command == "inliers") return cmd_inliers(o, config, out);
  if (o.command == "repeat-vo") return cmd_repeat_vo(o, config, out);
  if (o.command == "synth") return cmd_synth(o, out);
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + o.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stereo visual odometry with depth-normalised descriptors", "svo"};
  app.require_subcommand(1);

  RunOptions o;
  std::string descriptor;
  bool stereo_desc = false;
  bool scale_norm = false;
  std::string manifest;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--dataset", o.dataset, "KITTI odometry root (contains sequences/ and poses/)");
    sc->add_option("--sequence", o.sequence, "sequence id");
    sc->add_option("--synthetic", o.synthetic, "synthetic scene file written by 'synth'");
    sc->add_option("--frames", o.frames, "half-open frame range a..b");
    sc->add_option("--config", o.config_file, "key = value configuration file");
    sc->add_option("--descriptor", descriptor, "retina or gradhist")->check(CLI::IsMember({"retina", "gradhist"}));
    sc->add_flag("--stereo-desc", stereo_desc, "concatenate left and right descriptors");
    sc->add_flag("--scale-norm", scale_norm, "size descriptors from metric depth");
    sc->add_option("--seed", o.seed, "base seed");
    sc->add_option("--feature-budget", o.feature_budgets, "maximum features per frame")->delimiter(',');
    sc->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sc->add_option("--out", o.out, "output directory")->required();
  };

  auto* vo = app.add_subcommand("vo", "run the odometry pipeline and write the trajectory");
  add_common(vo);
  auto* track = app.add_subcommand("track-eval", "tracking score of scale-normalised vs standard descriptors");
  add_common(track);
  track->add_option("--backends", o.backends, "descriptor backends to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"retina", "gradhist"}));
  auto* inl = app.add_subcommand("inliers", "mean inlier counts for increasing frame steps");
  add_common(inl);
  inl->add_option("--steps", o.steps, "frame steps")->delimiter(',');
  auto* rep = app.add_subcommand("repeat-vo", "translation error over repeated seeded runs");
  add_common(rep);
  rep->add_option("--runs", o.runs, "number of runs")->check(CLI::PositiveNumber);
  rep->add_option("--seeds", o.seeds, "explicit run seeds (overrides --runs)")->delimiter(',');
  auto* syn = app.add_subcommand("synth", "generate a synthetic scene fixture");
  syn->add_option("--out", o.out, "output directory")->required();
  syn->add_option("--seed", o.seed, "scene seed");
  syn->add_option("--kind", o.kind, "corridor, static or plane")
      ->check(CLI::IsMember({"corridor", "static", "plane"}));
  syn->add_option("--length", o.length, "number of frames")->check(CLI::PositiveNumber);
  syn->add_option("--width", o.width, "image width")->check(CLI::PositiveNumber);
  syn->add_option("--height", o.height, "image height")->check(CLI::PositiveNumber);
  syn->add_option("--fx", o.fx, "focal length in pixels")->check(CLI::PositiveNumber);
  syn->add_option("--noise", o.noise, "Gaussian intensity noise sigma")->check(CLI::NonNegativeNumber);
  syn->add_flag("--kitti", o.kitti, "also write the frames in KITTI layout under <out>/kitti");
  syn->add_option("--sequence", o.sequence, "sequence id for --kitti");
  auto* rerun = app.add_subcommand("rerun", "replay a run from its manifest");
  rerun->add_option("--manifest", manifest, "manifest.txt of an earlier run")->required()->check(CLI::ExistingFile);
  rerun->add_option("--out", o.out, "output directory")->required();
  rerun->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (rerun->parsed()) {
      std::ifstream in(manifest);
      std::stringstream ss;
      ss << in.rdbuf();
      RunOptions replay;
      RunConfig config;
      parse_manifest(ss.str(), replay, config);
      replay.out = o.out;
      if (rerun->count("--threads") > 0) replay.threads = o.threads;
      return execute(replay, config, out, err);
    }

    o.command = app.get_subcommands().front()->get_name();
    o.dataset = absolute_or_empty(o.dataset);
    o.synthetic = absolute_or_empty(o.synthetic);
    o.config_file = absolute_or_empty(o.config_file);
    RunConfig config;
    if (!o.config_file.empty()) config = load_config(o.config_file);
    if (!descriptor.empty()) config.pipeline.backend = parse_backend(descriptor);
    if (stereo_desc) config.pipeline.stereo_descriptor = true;
    if (scale_norm) config.pipeline.scale.enabled = true;
    if (o.command != "track-eval") {
      if (o.feature_budgets.size() > 1) {
        throw Error(ErrorCode::InvalidArgument, "--feature-budget takes a list only for track-eval");
      }
      if (o.feature_budgets.size() == 1) {
        config.pipeline.detector.max_features = o.feature_budgets.front();
        o.feature_budgets.clear();
      }
    }
    if (o.command == "repeat-vo" && o.seeds.empty()) {
      for (int i = 0; i < o.runs; ++i) o.seeds.push_back(derive_seed(o.seed, "run", static_cast<std::uint64_t>(i)));
    }
    if (o.command == "repeat-vo") o.runs = static_cast<int>(o.seeds.size());
    return execute(o, config, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::ConfigError) {
      err << '\n' << app.help();
      return 1;
    }
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace svo::cli
