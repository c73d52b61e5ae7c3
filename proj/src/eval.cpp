#include "svo/eval.hpp"

#include "svo/error.hpp"
#include "svo/parallel.hpp"
#include "svo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>

namespace svo {

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::uint64_t fingerprint(const std::vector<StereoCorrespondence>& corrs) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& c : corrs) {
    mix(c.left_feature.x);
    mix(c.left_feature.y);
    mix(c.left_feature.response);
    mix(c.left_feature.size);
    mix(c.right_feature.x);
    mix(c.right_feature.y);
    mix(c.depth);
  }
  return h;
}

struct Prepared {
  std::shared_ptr<GrayImage> left;
  std::shared_ptr<GrayImage> right;
  std::vector<StereoCorrespondence> correspondences;
};

Prepared prepare(const FrameSource& frames, std::size_t i, const PipelineConfig& cfg) {
  auto frame = frames.frame(i);
  Prepared p;
  p.left = std::make_shared<GrayImage>(std::move(frame.left));
  p.right = std::make_shared<GrayImage>(std::move(frame.right));
  p.left->build_integral();
  p.right->build_integral();
  p.correspondences = extract_stereo_features(*p.left, *p.right, frames.rig(), cfg);
  return p;
}

// One bundle per variant for every frame; detection and stereo tracking are
// shared. Images are released once described.
std::vector<std::vector<FrameBundle>> process_variants(const FrameSource& frames,
                                                       const PipelineConfig& base,
                                                       const RetinaPattern& pattern,
                                                       const std::vector<DescriptorVariant>& variants) {
  std::vector<std::vector<FrameBundle>> out(variants.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Prepared p = prepare(frames, i, base);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      FrameBundle b = describe_frame(static_cast<int>(i), p.left, p.right, p.correspondences,
                                     frames.rig(), variants[v].apply(base), pattern);
      b.left.reset();
      b.right.reset();
      out[v].push_back(std::move(b));
    }
  }
  return out;
}

Trajectory require_ground_truth(const FrameSource& frames) {
  auto gt = frames.ground_truth();
  if (!gt) throw Error(ErrorCode::MissingGroundTruth, "sequence '" + frames.name() + "' has no ground truth");
  if (gt->size() != frames.size()) {
    throw Error(ErrorCode::MissingGroundTruth, "ground truth length differs from frame count");
  }
  return *gt;
}

std::vector<double> path_distances(const Trajectory& gt) {
  std::vector<double> dist(gt.size(), 0.0);
  for (std::size_t i = 1; i < gt.size(); ++i) {
    dist[i] = dist[i - 1] + (gt[i].translation() - gt[i - 1].translation()).norm();
  }
  return dist;
}

}  // namespace

std::string DescriptorVariant::name() const {
  return std::string(to_string(backend)) + (stereo ? "-stereo" : "-mono") + (scale_norm ? "-sn" : "-std");
}

PipelineConfig DescriptorVariant::apply(PipelineConfig cfg) const {
  cfg.backend = backend;
  cfg.stereo_descriptor = stereo;
  cfg.scale.enabled = scale_norm;
  return cfg;
}

double improvement_percent(double scale_normalized, double standard) {
  if (standard <= 0.0) throw Error(ErrorCode::InvalidArgument, "standard score must be positive");
  return (scale_normalized - standard) / standard * 100.0;
}

PairScore score_pair(const FrameBundle& a, const FrameBundle& b, const Pose& a_to_b,
                     const StereoRig& rig, const MatchConfig& match, double tol) {
  PairScore score;
  const auto matches = match_descriptors(a.descriptors, b.descriptors, match);
  score.matches = static_cast<long>(matches.size());
  for (const auto& m : matches) {
    const Point3 p = a_to_b * correspondence_point(a.correspondences[m.query_index], rig);
    if (p.z() <= 0.0) continue;
    const Pixel px = project(p, rig.intrinsics);
    const auto& f = b.correspondences[m.train_index].left_feature;
    if ((px - Pixel(f.x, f.y)).norm() <= tol) ++score.correct;
  }
  return score;
}

TrackingScoreReport tracking_score(const FrameSource& frames, const PipelineConfig& base,
                                   const RetinaPattern& pattern,
                                   const std::vector<DescriptorVariant>& variants,
                                   const EvalConfig& eval) {
  if (eval.frame_stride < 1 || eval.max_step < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame stride and max step must be positive");
  }
  if (frames.size() < 2) throw Error(ErrorCode::TooFewFrames, "need at least two frames");
  const Trajectory gt = require_ground_truth(frames);
  const StereoRig& rig = frames.rig();
  const std::size_t n = frames.size();
  const std::size_t nv = variants.size();

  TrackingScoreReport report;
  report.variants = variants;
  report.scores.assign(nv, 0);
  report.matches.assign(nv, 0);
  report.step_scores.assign(nv, std::vector<long>(eval.max_step, 0));
  report.feature_budget = base.detector.max_features;

  std::vector<std::uint64_t> fingerprints(nv, 0);
  std::vector<bool> fingerprint_set(nv, false);
  // Sliding cache of described frames: [frame][variant].
  std::map<std::size_t, std::vector<FrameBundle>> cache;
  auto bundles_for = [&](std::size_t i) -> const std::vector<FrameBundle>& {
    auto it = cache.find(i);
    if (it != cache.end()) return it->second;
    const Prepared p = prepare(frames, i, base);
    std::vector<FrameBundle> per_variant;
    for (std::size_t v = 0; v < nv; ++v) {
      // Every variant receives the same pre-normalisation list.
      const std::uint64_t h = fingerprint(p.correspondences);
      fingerprints[v] = fingerprint_set[v] ? (fingerprints[v] * 31 + h) : h;
      fingerprint_set[v] = true;
      FrameBundle b = describe_frame(static_cast<int>(i), p.left, p.right, p.correspondences, rig,
                                     variants[v].apply(base), pattern);
      b.left.reset();
      b.right.reset();
      per_variant.push_back(std::move(b));
    }
    return cache.emplace(i, std::move(per_variant)).first->second;
  };

  for (std::size_t t = 0; t + 1 < n; t += static_cast<std::size_t>(eval.frame_stride)) {
    while (!cache.empty() && cache.begin()->first < t) cache.erase(cache.begin());
    for (int step = 1; step <= eval.max_step; ++step) {
      const std::size_t u = t + static_cast<std::size_t>(step);
      if (u >= n) break;
      const auto& a = bundles_for(t);
      const auto& b = bundles_for(u);
      const Pose a_to_b = gt[u].inverse() * gt[t];
      std::vector<PairScore> scores(nv);
      parallel_for(nv, base.threads, [&](std::size_t v) {
        scores[v] = score_pair(a[v], b[v], a_to_b, rig, variants[v].apply(base).match, eval.correctness_tol);
      });
      for (std::size_t v = 0; v < nv; ++v) {
        report.scores[v] += scores[v].correct;
        report.matches[v] += scores[v].matches;
        report.step_scores[v][step - 1] += scores[v].correct;
      }
      ++report.frame_pairs;
    }
  }
  report.feature_fingerprints = fingerprints;
  return report;
}

std::vector<double> aggregate_inliers(const std::vector<InlierPairRecord>& pairs,
                                      const std::vector<int>& steps) {
  std::vector<double> means;
  for (int step : steps) {
    double sum = 0.0;
    int count = 0;
    for (const auto& p : pairs) {
      if (p.step != step) continue;
      sum += p.inliers;
      ++count;
    }
    means.push_back(count > 0 ? sum / count : 0.0);
  }
  return means;
}

std::vector<InlierCurve> inlier_curve(const FrameSource& frames, const PipelineConfig& base,
                                      const RetinaPattern& pattern,
                                      const std::vector<DescriptorVariant>& variants,
                                      const std::vector<int>& steps, std::uint64_t seed) {
  if (frames.size() < 2) throw Error(ErrorCode::TooFewFrames, "need at least two frames");
  for (int s : steps) {
    if (s < 1) throw Error(ErrorCode::InvalidArgument, "steps must be positive");
  }
  const auto bundles = process_variants(frames, base, pattern, variants);
  const StereoRig& rig = frames.rig();
  const int n = static_cast<int>(frames.size());

  std::vector<InlierCurve> curves;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const PipelineConfig cfg = variants[v].apply(base);
    InlierCurve curve;
    curve.variant = variants[v];
    curve.steps = steps;
    for (int step : steps) {
      for (int t = 0; t + step < n; ++t) curve.pairs.push_back({t, step, 0, 0, false});
    }
    PipelineConfig inner = cfg;
    inner.match.threads = 1;
    parallel_for(curve.pairs.size(), cfg.threads, [&](std::size_t k) {
      auto& rec = curve.pairs[k];
      const auto& a = bundles[v][rec.t];
      const auto& b = bundles[v][rec.t + rec.step];
      auto matches = match_descriptors(a.descriptors, b.descriptors, inner.match);
      rec.matches = static_cast<int>(matches.size());
      const std::uint64_t s = derive_seed(seed, "inliers", static_cast<std::uint64_t>(rec.t) * 1024 + rec.step);
      try {
        const auto est = estimate_motion_from_matches(a, b, std::move(matches), rig, cfg.ransac, s);
        rec.inliers = static_cast<int>(est.inliers.size());
        rec.ok = true;
      } catch (const Error&) {
        rec.inliers = 0;
        rec.ok = false;
      }
    });
    curve.mean_inliers = aggregate_inliers(curve.pairs, steps);
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<double> evaluation_lengths(const Trajectory& gt) {
  if (gt.size() < 2) throw Error(ErrorCode::SequenceTooShort, "need at least two poses");
  const double total = path_distances(gt).back();
  if (!(total > 0.0)) throw Error(ErrorCode::SequenceTooShort, "ground truth does not move");
  std::vector<double> lengths;
  for (int k = 1; k <= 8; ++k) {
    if (100.0 * k < total) lengths.push_back(100.0 * k);
  }
  if (lengths.empty()) {
    for (int k = 1; k <= 8; ++k) lengths.push_back(total * k / 10.0);
  }
  return lengths;
}

double translation_error(const Trajectory& estimate, const Trajectory& gt) {
  if (estimate.size() != gt.size()) {
    throw Error(ErrorCode::LengthMismatch, "estimate has " + std::to_string(estimate.size()) +
                                               " poses, ground truth " + std::to_string(gt.size()));
  }
  const auto lengths = evaluation_lengths(gt);
  const auto dist = path_distances(gt);
  double sum = 0.0;
  int count = 0;
  for (std::size_t first = 0; first < gt.size(); first += 10) {
    for (double len : lengths) {
      std::size_t last = first;
      while (last < gt.size() && !(dist[last] > dist[first] + len)) ++last;
      if (last >= gt.size()) continue;
      const Pose delta_gt = gt[first].inverse() * gt[last];
      const Pose delta_est = estimate[first].inverse() * estimate[last];
      const Pose err = delta_est.inverse() * delta_gt;
      sum += err.translation().norm() / len;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::SequenceTooShort, "no evaluable segment");
  return 100.0 * sum / count;
}

std::vector<FrameBundle> process_all_frames(const FrameSource& frames, const PipelineConfig& cfg,
                                            const RetinaPattern& pattern) {
  DescriptorVariant v{cfg.backend, cfg.stereo_descriptor, cfg.scale.enabled};
  return std::move(process_variants(frames, cfg, pattern, {v}).front());
}

TranslationErrorReport repeated_vo_experiment(const FrameSource& frames, const PipelineConfig& base,
                                              const RetinaPattern& pattern,
                                              const DescriptorVariant& variant,
                                              const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one run");
  if (frames.size() < 2) throw Error(ErrorCode::TooFewFrames, "need at least two frames");
  const Trajectory gt = require_ground_truth(frames);
  const PipelineConfig cfg = variant.apply(base);
  const auto bundles = process_all_frames(frames, cfg, pattern);

  TranslationErrorReport report;
  report.variant = variant;
  report.seeds = seeds;
  report.run_errors.assign(seeds.size(), 0.0);
  report.run_fallbacks.assign(seeds.size(), 0);
  PipelineConfig inner = cfg;
  inner.threads = 1;
  inner.match.threads = 1;
  parallel_for(seeds.size(), cfg.threads, [&](std::size_t r) {
    const auto result = run_sequence_on_bundles(bundles, frames.rig(), inner, seeds[r]);
    report.run_errors[r] = translation_error(result.poses, gt);
    report.run_fallbacks[r] = result.fallbacks;
  });
  report.best = *std::min_element(report.run_errors.begin(), report.run_errors.end());
  report.worst = *std::max_element(report.run_errors.begin(), report.run_errors.end());
  double sum = 0.0;
  for (double e : report.run_errors) sum += e;
  report.mean = sum / static_cast<double>(report.run_errors.size());
  return report;
}

namespace {

struct PairRow {
  DescriptorBackend backend;
  long sn;
  long standard;
};

std::vector<PairRow> pair_rows(const TrackingScoreReport& r) {
  std::vector<PairRow> rows;
  for (auto backend : {DescriptorBackend::Retina, DescriptorBackend::GradHist}) {
    for (bool stereo : {false, true}) {
      long sn = -1;
      long standard = -1;
      for (std::size_t v = 0; v < r.variants.size(); ++v) {
        const auto& var = r.variants[v];
        if (var.backend != backend || var.stereo != stereo) continue;
        (var.scale_norm ? sn : standard) = r.scores[v];
      }
      if (sn >= 0 && standard >= 0) rows.push_back({backend, sn, standard});
    }
  }
  return rows;
}

std::string improvement_text(long sn, long standard) {
  return standard > 0 ? format("%.2f", improvement_percent(sn, standard)) : std::string("nan");
}

}  // namespace

void write_tracking_csv(std::ostream& out, const std::string& sequence,
                        const std::vector<TrackingScoreReport>& reports) {
  out << "sequence,feature_budget,backend,sn_score,standard_score,improvement_pct\n";
  for (const auto& r : reports) {
    for (const auto& row : pair_rows(r)) {
      out << sequence << ',' << r.feature_budget << ',' << to_string(row.backend) << ',' << row.sn << ','
          << row.standard << ',' << improvement_text(row.sn, row.standard) << '\n';
    }
  }
}

void write_tracking_variants_csv(std::ostream& out, const std::string& sequence,
                                 const std::vector<TrackingScoreReport>& reports) {
  out << "sequence,feature_budget,variant,step,correct\n";
  for (const auto& r : reports) {
    for (std::size_t v = 0; v < r.variants.size(); ++v) {
      for (std::size_t s = 0; s < r.step_scores[v].size(); ++s) {
        out << sequence << ',' << r.feature_budget << ',' << r.variants[v].name() << ',' << (s + 1) << ','
            << r.step_scores[v][s] << '\n';
      }
    }
  }
}

void write_tracking_table(std::ostream& out, const std::string& sequence,
                          const std::vector<TrackingScoreReport>& reports) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %8s %-9s %10s %10s %12s\n", "sequence", "budget", "backend",
                "SN", "standard", "improvement");
  out << line;
  for (const auto& r : reports) {
    for (const auto& row : pair_rows(r)) {
      const std::string imp = improvement_text(row.sn, row.standard) + "%";
      std::snprintf(line, sizeof(line), "%-10s %8d %-9s %10ld %10ld %12s\n", sequence.c_str(),
                    r.feature_budget, std::string(to_string(row.backend)).c_str(), row.sn, row.standard,
                    imp.c_str());
      out << line;
    }
  }
}

void write_inlier_csv(std::ostream& out, const std::vector<InlierCurve>& curves) {
  out << "variant,step,mean_inliers,pairs\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      const auto pairs = std::count_if(c.pairs.begin(), c.pairs.end(),
                                       [&](const InlierPairRecord& p) { return p.step == c.steps[i]; });
      out << c.variant.name() << ',' << c.steps[i] << ',' << format("%.4f", c.mean_inliers[i]) << ','
          << pairs << '\n';
    }
  }
}

void write_inlier_pairs_csv(std::ostream& out, const std::vector<InlierCurve>& curves) {
  out << "variant,t,step,matches,inliers,ok\n";
  for (const auto& c : curves) {
    for (const auto& p : c.pairs) {
      out << c.variant.name() << ',' << p.t << ',' << p.step << ',' << p.matches << ',' << p.inliers << ','
          << (p.ok ? 1 : 0) << '\n';
    }
  }
}

void write_inlier_table(std::ostream& out, const std::vector<InlierCurve>& curves) {
  char line[160];
  out << "step";
  for (const auto& c : curves) {
    std::snprintf(line, sizeof(line), " %22s", c.variant.name().c_str());
    out << line;
  }
  out << '\n';
  if (curves.empty()) return;
  for (std::size_t i = 0; i < curves.front().steps.size(); ++i) {
    std::snprintf(line, sizeof(line), "%4d", curves.front().steps[i]);
    out << line;
    for (const auto& c : curves) {
      std::snprintf(line, sizeof(line), " %22.2f", c.mean_inliers[i]);
      out << line;
    }
    out << '\n';
  }
}

void write_translation_csv(std::ostream& out, const std::vector<TranslationErrorReport>& reports) {
  out << "variant,best_pct,mean_pct,worst_pct,runs\n";
  for (const auto& r : reports) {
    out << r.variant.name() << ',' << format("%.4f", r.best) << ',' << format("%.4f", r.mean) << ','
        << format("%.4f", r.worst) << ',' << r.run_errors.size() << '\n';
  }
}

void write_translation_runs_csv(std::ostream& out, const std::vector<TranslationErrorReport>& reports) {
  out << "variant,run,seed,translation_error_pct,fallbacks\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.run_errors.size(); ++i) {
      out << r.variant.name() << ',' << i << ',' << r.seeds[i] << ',' << format("%.6f", r.run_errors[i]) << ','
          << r.run_fallbacks[i] << '\n';
    }
  }
}

void write_translation_table(std::ostream& out, const std::vector<TranslationErrorReport>& reports) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %5s\n", "variant", "best", "mean", "worst", "runs");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-24s %7.3f%% %7.3f%% %7.3f%% %5zu\n", r.variant.name().c_str(), r.best,
                  r.mean, r.worst, r.run_errors.size());
    out << line;
  }
}

void write_diagnostics_csv(std::ostream& out, const std::vector<FrameDiagnostics>& diagnostics) {
  out << "frame,matches,inliers,mean_reproj_err,fallback\n";
  for (const auto& d : diagnostics) {
    out << d.frame << ',' << d.matches << ',' << d.inliers << ',' << format("%.6f", d.mean_reproj_err) << ','
        << (d.fallback ? 1 : 0) << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<FrameDiagnostics>& diagnostics) {
  out << "frame,runtime_ms\n";
  for (const auto& d : diagnostics) out << d.frame << ',' << format("%.3f", d.runtime_ms) << '\n';
}

}  // namespace svo
