// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Criteria 4-7 use the first 300 frames of a KITTI
// sequence when SVO_KITTI_ROOT is set (SVO_KITTI_SEQUENCE, default "00"),
// otherwise a 100-frame noisy synthetic corridor with KITTI-like geometry.

#include "svo/cli.hpp"
#include "svo/descriptor.hpp"
#include "svo/error.hpp"
#include "svo/eval.hpp"
#include "svo/geometry.hpp"
#include "svo/kitti.hpp"
#include "svo/matching.hpp"
#include "svo/odometry.hpp"
#include "svo/rng.hpp"
#include "svo/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace svo;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kRoundTripTol = 1e-6;         // meters
constexpr int kScaleTrials = 500;
constexpr int kMaxSnBitDiff = 25;              // 5% of 512 bits
constexpr double kScalePassFraction = 0.95;
constexpr int kDriftTrials = 500;
constexpr double kDriftCloserFraction = 0.90;
constexpr double kRetinaMinImprovement = 10.0;  // percent
constexpr double kGradhistMinImprovement = 3.0;
constexpr int kRuns = 5;
constexpr double kEndpointTol = 0.5;            // percent of path length
constexpr double kOutlierExclusion = 0.95;

// Runtime limits in seconds.
constexpr double kLimit1 = 5, kLimit2 = 60, kLimit3 = 120, kLimit4 = 15 * 60, kLimit5 = 30 * 60,
                 kLimit6 = 15 * 60, kLimit7 = 30 * 60, kLimit8 = 5 * 60;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, const Outcome& o, double seconds, double limit) {
  const bool in_time = limit <= 0 || seconds < limit;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d (%s): %s; runtime %.1f s", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              seconds);
  if (limit > 0) std::printf(" (limit %.0f s%s)", limit, in_time ? "" : ", exceeded");
  std::printf("\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome geometry_oracles() {
  Rng rng(derive_seed(1, "acceptance-geometry"));
  StereoRig rig;
  rig.intrinsics = {718.856, 718.856, 607.1928, 185.2157};
  rig.baseline = 0.5372;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double z = uniform_real(rng, 1.0, 200.0);
    const Point3 p(uniform_real(rng, -0.8, 0.8) * z, uniform_real(rng, -0.3, 0.3) * z, z);
    const Point3 back = triangulate(project(p, rig.intrinsics), project_right(p, rig), rig);
    worst = std::max(worst, (back - p).norm());
  }
  ScaleConfig sc;
  sc.enabled = true;
  std::vector<double> depths(10000);
  for (auto& d : depths) d = std::exp(uniform_real(rng, std::log(0.05), std::log(5000.0)));
  std::sort(depths.begin(), depths.end());
  bool monotone = true, clamped = true;
  double prev = sc.r_max;
  for (double d : depths) {
    const double r = depth_to_radius(d, rig, sc);
    monotone = monotone && r <= prev;
    prev = r;
    const double raw = rig.intrinsics.fx * sc.metric_radius / d;
    clamped = clamped && r >= sc.r_min && r <= sc.r_max &&
              (raw < sc.r_min || raw > sc.r_max || std::abs(r - raw) <= 1e-12 * raw);
    if (raw <= sc.r_min) clamped = clamped && r == sc.r_min;
    if (raw >= sc.r_max) clamped = clamped && r == sc.r_max;
  }
  Outcome o;
  o.pass = worst < kRoundTripTol && monotone && clamped;
  o.detail = fmt("round-trip max error %.2e m over 10000 points; radius monotone=%s, clamp=%s", worst,
                 monotone ? "yes" : "no", clamped ? "yes" : "no");
  return o;
}

// The same textured plane at depth Z and 2Z seen head-on from a random
// lateral offset; the scene point sits at the principal point.
Outcome scale_invariance(const RetinaPattern& pattern) {
  ScaleConfig sc;
  sc.enabled = true;
  int both = 0;
  std::vector<int> sn_dists;
  for (int i = 0; i < kScaleTrials; ++i) {
    Rng rng(derive_seed(2, "scale-trial", static_cast<std::uint64_t>(i)));
    const double z = uniform_real(rng, 8.0, 15.0);
    auto near = make_plane_scene(derive_seed(2, "scene", static_cast<std::uint64_t>(i)), z, 16, 16, 500.0, 0.54);
    Feature near_sn, far_sn;
    near_sn.size = depth_to_radius(z, near.rig, sc);
    far_sn.size = depth_to_radius(2 * z, near.rig, sc);
    const int half = static_cast<int>(std::ceil(binary_support_radius(near_sn, pattern))) + 6;
    near.width = near.height = 2 * half + 1;
    near.rig.intrinsics = {500.0, 500.0, double(half), double(half)};
    near.supersample = 4;
    near.poses[0] = Pose(Eigen::Matrix3d::Identity(),
                         Eigen::Vector3d(uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0), 0.0));
    auto far = near;
    far.planes[0].origin.z() = 2 * z;
    auto a = render(near, 0).left;
    auto b = render(far, 0).left;
    a.build_integral();
    b.build_integral();
    near_sn.x = near_sn.y = far_sn.x = far_sn.y = half;
    Feature near_fixed = near_sn, far_fixed = far_sn;
    near_fixed.size = far_fixed.size = 7.0;
    const int d_sn = static_cast<int>(distance(describe_binary(a, near_sn, pattern), describe_binary(b, far_sn, pattern)));
    const int d_fixed = static_cast<int>(distance(describe_binary(a, near_fixed, pattern), describe_binary(b, far_fixed, pattern)));
    sn_dists.push_back(d_sn);
    both += d_sn <= kMaxSnBitDiff && d_sn <= d_fixed;
  }
  std::sort(sn_dists.begin(), sn_dists.end());
  Outcome o;
  o.pass = both >= kScalePassFraction * kScaleTrials;
  o.detail = fmt("%d/%d trials with SN distance <= %d bits and <= fixed-size distance; SN median %d, max %d", both,
                 kScaleTrials, kMaxSnBitDiff, sn_dists[sn_dists.size() / 2], sn_dists.back());
  return o;
}

BinaryDescriptor section(const BinaryDescriptor& d, int k) {
  BinaryDescriptor s;
  const auto half = static_cast<std::ptrdiff_t>(d.words.size() / 2);
  s.words.assign(d.words.begin() + k * half, d.words.begin() + (k + 1) * half);
  return s;
}

// A scene point on a plane is described in two frames; the impostor is the
// same point displaced by 1 px in a random direction in each view.
Outcome drift_rejection(const RetinaPattern& pattern) {
  ScaleConfig sc;
  sc.enabled = true;
  const MatchConfig mc;
  const double mono_thr = mc.binary_abs_threshold;
  const double stereo_thr = 2 * mc.binary_abs_threshold;
  int closer = 0, rej_stereo = 0, rej_mono = 0, rej_sections = 0, closer_same = 0, rej_same = 0;
  for (int i = 0; i < kDriftTrials; ++i) {
    Rng rng(derive_seed(3, "drift-trial", static_cast<std::uint64_t>(i)));
    const double z = uniform_real(rng, 10.0, 20.0);
    auto s = make_plane_scene(derive_seed(3, "scene", static_cast<std::uint64_t>(i)), z, 261, 215, 500.0, 0.54);
    s.supersample = 2;
    s.poses.push_back(Pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(uniform_real(rng, -0.5, 0.5), 0.0, 0.5)));
    auto f0 = render(s, 0), f1 = render(s, 1);
    for (auto* im : {&f0.left, &f0.right, &f1.left, &f1.right}) im->build_integral();
    const Point3 p(0.27, 0.0, z);
    const auto g0 = project_ground_truth(s, 0, p), g1 = project_ground_truth(s, 1, p);
    auto feature = [&](const Pixel& px, double depth) {
      Feature f;
      f.x = px.x();
      f.y = px.y();
      f.size = depth_to_radius(depth, s.rig, sc);
      return f;
    };
    const double a_left = uniform_real(rng, 0.0, 2 * std::numbers::pi);
    const double a_right = uniform_real(rng, 0.0, 2 * std::numbers::pi);
    const Pixel d_left(std::cos(a_left), std::sin(a_left)), d_right(std::cos(a_right), std::sin(a_right));
    auto describe = [&](const Pixel& dl, const Pixel& dr) {
      return std::get<BinaryDescriptor>(describe_stereo(f1.left, f1.right, feature(g1.left + dl, g1.depth),
                                                        feature(g1.right + dr, g1.depth), DescriptorBackend::Retina,
                                                        pattern));
    };
    const auto ref = std::get<BinaryDescriptor>(describe_stereo(
        f0.left, f0.right, feature(g0.left, g0.depth), feature(g0.right, g0.depth), DescriptorBackend::Retina, pattern));
    const auto truth = describe(Pixel(0, 0), Pixel(0, 0));
    const auto impostor = describe(d_left, d_right);
    const auto impostor_same = describe(d_left, d_left);
    const double d_true = distance(ref, truth);
    const double d_imp = distance(ref, impostor);
    const double d_left_imp = distance(section(ref, 0), section(impostor, 0));
    const double d_right_imp = distance(section(ref, 1), section(impostor, 1));
    closer += d_true < d_imp;
    rej_stereo += d_imp > stereo_thr;
    rej_mono += d_left_imp > mono_thr;
    rej_sections += d_left_imp > mono_thr || d_right_imp > mono_thr;
    const double d_same = distance(ref, impostor_same);
    closer_same += d_true < d_same;
    rej_same += d_same > stereo_thr;
  }
  Outcome o;
  o.pass = closer >= kDriftCloserFraction * kDriftTrials && rej_stereo > rej_mono;
  o.detail = fmt(
      "true match closer in %d/%d; impostor rejection stereo %d vs mono %d (per-section check %d; "
      "same drift in both views: closer %d, stereo rejection %d)",
      closer, kDriftTrials, rej_stereo, rej_mono, rej_sections, closer_same, rej_same);
  return o;
}

struct StandIn {
  std::unique_ptr<FrameSource> base;
  std::unique_ptr<SliceSource> slice;
  std::string label;
  const FrameSource& get() const { return slice ? *slice : *base; }
};

StandIn sequence_under_test() {
  StandIn s;
  if (const char* root = std::getenv("SVO_KITTI_ROOT"); root && *root) {
    const char* seq = std::getenv("SVO_KITTI_SEQUENCE");
    const std::string id = seq && *seq ? seq : "00";
    s.base = std::make_unique<KittiSequence>(open_sequence(root, id));
    s.slice = std::make_unique<SliceSource>(*s.base, 0, std::min<std::size_t>(300, s.base->size()));
    s.label = "KITTI sequence " + id + ", frames 0..300";
    return s;
  }
  CorridorOptions o;
  o.frames = 100;
  o.width = 1241;
  o.height = 376;
  o.fx = 718.856;
  o.baseline = 0.5372;
  o.noise_sigma = 2.0;
  s.base = std::make_unique<SyntheticSequence>(make_corridor_scene(o));
  s.label = "synthetic corridor, 100 frames, 1241x376, noise 2";
  return s;
}

std::vector<DescriptorVariant> sn_vs_standard(DescriptorBackend backend) {
  return {{backend, false, true}, {backend, false, false}};
}

double score_improvement(const TrackingScoreReport& r) {
  return improvement_percent(static_cast<double>(r.scores[0]), static_cast<double>(r.scores[1]));
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

std::string join(const std::vector<double>& v, const char* f) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : "/") + fmt(f, x);
  return s;
}

// Straight noiseless corridor, chained odometry end to end.
Outcome straight_line_accuracy(const SyntheticSequence& seq, const RetinaPattern& pattern) {
  const auto result = run_sequence(seq, PipelineConfig{}, pattern, 8);
  const auto& gt = *seq.ground_truth();
  double path = 0.0;
  for (std::size_t i = 1; i < gt.size(); ++i) path += (gt[i].translation() - gt[i - 1].translation()).norm();
  const double err = (result.poses.back().translation() - gt.back().translation()).norm();
  Outcome o;
  o.pass = 100.0 * err / path < kEndpointTol;
  o.detail = fmt("endpoint error %.3f m over %.1f m (%.3f%%), %d fallbacks", err, path, 100.0 * err / path,
                 result.fallbacks);
  return o;
}

Outcome outlier_exclusion(const SyntheticSequence& seq, const RetinaPattern& pattern) {
  const auto& rig = seq.rig();
  const auto f0 = seq.frame(0), f1 = seq.frame(1);
  const auto a = process_frame(0, f0.left, f0.right, rig, {}, pattern);
  const auto b = process_frame(1, f1.left, f1.right, rig, {}, pattern);
  const Pose a_to_b = (*seq.ground_truth())[1].inverse() * (*seq.ground_truth())[0];
  std::vector<Match> matches;
  std::set<int> used;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point3 p = a_to_b * correspondence_point(a.correspondences[i], rig);
    if (p.z() <= 0) continue;
    const Pixel px = project(p, rig.intrinsics);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto& f = b.correspondences[j].left_feature;
      if ((px - Pixel(f.x, f.y)).norm() < 0.75 && used.insert(static_cast<int>(j)).second) {
        matches.push_back({static_cast<int>(i), static_cast<int>(j), 0.0});
        break;
      }
    }
  }
  Rng rng(derive_seed(8, "outliers"));
  std::set<std::size_t> outliers;
  const std::size_t n_out = matches.size() * 3 / 7;  // 30% of the final list
  for (std::size_t k = 0; k < n_out; ++k) {
    const int q = static_cast<int>(uniform_index(rng, a.size()));
    const Pixel px = project(a_to_b * correspondence_point(a.correspondences[q], rig), rig.intrinsics);
    int t = 0;
    do {
      t = static_cast<int>(uniform_index(rng, b.size()));
    } while ((px - Pixel(b.correspondences[t].left_feature.x, b.correspondences[t].left_feature.y)).norm() < 20.0);
    outliers.insert(matches.size());
    matches.push_back({q, t, 0.0});
  }
  const auto est = estimate_motion_from_matches(a, b, matches, rig, {}, 8);
  std::size_t kept = 0;
  for (int k : est.inliers) kept += outliers.count(static_cast<std::size_t>(k));
  const double excluded = 1.0 - static_cast<double>(kept) / static_cast<double>(outliers.size());
  Outcome o;
  o.pass = excluded >= kOutlierExclusion;
  o.detail = fmt("%zu of %zu injected outliers excluded (%.1f%%) among %zu matches", outliers.size() - kept,
                 outliers.size(), 100.0 * excluded, matches.size());
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args, std::string& err_text) {
  args.insert(args.begin(), "svo");
  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  err_text = err.str();
  return code;
}

// Every command is run with one thread, re-run from its manifest with three,
// and every output file except the manifest and wall-clock timing compared.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("svo_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  Outcome o;
  o.pass = true;
  std::string err;
  if (run_cli({"synth", "--out", (dir / "scene").string(), "--length", "21", "--width", "320", "--height", "180",
               "--fx", "250", "--noise", "2", "--seed", "9"},
              err) != 0) {
    o.pass = false;
    o.detail = "synth failed: " + err;
    return o;
  }
  const std::string scene = (dir / "scene" / "scene.txt").string();
  const std::vector<std::vector<std::string>> commands = {
      {"vo", "--synthetic", scene, "--stereo-desc", "--scale-norm"},
      {"vo", "--synthetic", scene, "--descriptor", "gradhist"},
      {"track-eval", "--synthetic", scene, "--feature-budget", "300,600"},
      {"inliers", "--synthetic", scene, "--steps", "1,2,3"},
      {"repeat-vo", "--synthetic", scene, "--runs", "3"},
  };
  int files = 0, identical = 0;
  std::string mismatches;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const fs::path a = dir / ("a" + std::to_string(i)), b = dir / ("b" + std::to_string(i));
    auto args = commands[i];
    args.insert(args.end(), {"--threads", "1", "--out", a.string()});
    const int first = run_cli(args, err);
    const int second =
        run_cli({"rerun", "--manifest", (a / "manifest.txt").string(), "--threads", "3", "--out", b.string()}, err);
    if (first != 0 || second != 0) {
      o.pass = false;
      mismatches += " " + commands[i][0] + "(exit " + std::to_string(first) + "/" + std::to_string(second) + ")";
      continue;
    }
    for (const auto& e : fs::directory_iterator(a)) {
      const auto name = e.path().filename().string();
      if (name == "manifest.txt" || name == "timing.csv") continue;
      ++files;
      if (fs::exists(b / name) && slurp(e.path()) == slurp(b / name)) {
        ++identical;
      } else {
        o.pass = false;
        mismatches += " " + commands[i][0] + "/" + name;
      }
    }
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  o.pass = o.pass && files > 0;
  o.detail = fmt("%d/%d output files byte-identical across 5 commands re-run with --threads 3", identical, files) +
             (mismatches.empty() ? "" : "; differing:" + mismatches);
  return o;
}

template <class Fn>
void timed(int id, const char* name, double limit, Fn fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("error: ") + e.what();
  }
  report(id, name, o, seconds_since(t0), limit);
}

}  // namespace

int main() {
  const auto pattern = make_retina_pattern();

  timed(1, "geometry oracles", kLimit1, geometry_oracles);
  timed(2, "scale invariance", kLimit2, [&] { return scale_invariance(pattern); });
  timed(3, "stereo drift rejection", kLimit3, [&] { return drift_rejection(pattern); });

  std::unique_ptr<StandIn> seq;
  try {
    seq = std::make_unique<StandIn>(sequence_under_test());
    std::printf("criteria 4-7 run on %s\n", seq->label.c_str());
  } catch (const std::exception& e) {
    std::printf("sequence unavailable: %s\n", e.what());
  }
  const EvalConfig eval;
  const PipelineConfig base;

  // The 1350 budget serves both criterion 4 and criterion 5.
  TrackingScoreReport retina1350;
  double seconds1350 = 0.0;
  timed(4, "tracking score direction", kLimit4, [&] {
    if (!seq) throw Error(ErrorCode::IoError, "no sequence");
    const auto t0 = std::chrono::steady_clock::now();
    PipelineConfig cfg = base;
    cfg.detector.max_features = 1350;
    auto variants = sn_vs_standard(DescriptorBackend::Retina);
    const auto gh = sn_vs_standard(DescriptorBackend::GradHist);
    variants.insert(variants.end(), gh.begin(), gh.end());
    const auto r = tracking_score(seq->get(), cfg, pattern, variants, eval);
    seconds1350 = seconds_since(t0);
    retina1350 = r;
    const double retina = improvement_percent(double(r.scores[0]), double(r.scores[1]));
    const double grad = improvement_percent(double(r.scores[2]), double(r.scores[3]));
    Outcome o;
    o.pass = retina >= kRetinaMinImprovement && grad >= kGradhistMinImprovement;
    o.detail = fmt("budget 1350: SN-retina %ld vs %ld (%+.2f%%, need >= %.0f%%); SN-gradhist %ld vs %ld (%+.2f%%, "
                   "need >= %.0f%%)",
                   r.scores[0], r.scores[1], retina, kRetinaMinImprovement, r.scores[2], r.scores[3], grad,
                   kGradhistMinImprovement);
    return o;
  });

  {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      if (!seq || retina1350.scores.empty()) throw Error(ErrorCode::IoError, "no budget-1350 result");
      std::vector<double> impr;
      for (int budget : {300, 1350, 2300}) {
        if (budget == 1350) {
          impr.push_back(score_improvement(retina1350));
          continue;
        }
        PipelineConfig cfg = base;
        cfg.detector.max_features = budget;
        impr.push_back(score_improvement(
            tracking_score(seq->get(), cfg, pattern, sn_vs_standard(DescriptorBackend::Retina), eval)));
      }
      o.pass = impr[1] >= impr[0] && impr[2] >= impr[1];
      o.detail = "SN-retina improvement at budgets 300/1350/2300: " + join(impr, "%.2f%%");
    } catch (const std::exception& e) {
      o.detail = std::string("error: ") + e.what();
    }
    report(5, "improvement trend", o, seconds_since(t0) + seconds1350, kLimit5);
  }

  timed(6, "inlier curve shape", kLimit6, [&] {
    if (!seq) throw Error(ErrorCode::IoError, "no sequence");
    const auto curves =
        inlier_curve(seq->get(), base, pattern, {{base.backend, true, true}, {base.backend, false, false}},
                     {1, 2, 3, 4, 5}, 6);
    bool dominates = true;
    for (std::size_t k = 0; k < curves[0].mean_inliers.size(); ++k)
      dominates = dominates && curves[0].mean_inliers[k] >= curves[1].mean_inliers[k];
    Outcome o;
    o.pass = non_increasing(curves[0].mean_inliers) && non_increasing(curves[1].mean_inliers) && dominates;
    o.detail = "mean inliers steps 1..5: SN/stereo " + join(curves[0].mean_inliers, "%.1f") + " vs standard " +
               join(curves[1].mean_inliers, "%.1f");
    return o;
  });

  timed(7, "repeated VO translation error", kLimit7, [&] {
    if (!seq) throw Error(ErrorCode::IoError, "no sequence");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < kRuns; ++i) seeds.push_back(derive_seed(7, "run", static_cast<std::uint64_t>(i)));
    const auto stereo = repeated_vo_experiment(seq->get(), base, pattern, {base.backend, true, true}, seeds);
    const auto standard = repeated_vo_experiment(seq->get(), base, pattern, {base.backend, false, false}, seeds);
    auto ordered = [](const TranslationErrorReport& r) { return r.best <= r.mean && r.mean <= r.worst; };
    Outcome o;
    o.pass = stereo.mean <= standard.mean && ordered(stereo) && ordered(standard);
    o.detail = fmt("%d runs: stereo-retina best/mean/worst %.3f/%.3f/%.3f%% vs standard %.3f/%.3f/%.3f%%", kRuns,
                   stereo.best, stereo.mean, stereo.worst, standard.best, standard.mean, standard.worst);
    return o;
  });
  seq.reset();

  {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      CorridorOptions opts;
      opts.frames = 100;
      const SyntheticSequence straight(make_corridor_scene(opts));
      const auto a = straight_line_accuracy(straight, pattern);
      const auto b = outlier_exclusion(straight, pattern);
      o.pass = a.pass && b.pass;
      o.detail = a.detail + "; " + b.detail;
    } catch (const std::exception& e) {
      o.detail = std::string("error: ") + e.what();
    }
    report(8, "synthetic VO accuracy", o, seconds_since(t0), kLimit8);
  }

  timed(9, "determinism", 0, determinism);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
