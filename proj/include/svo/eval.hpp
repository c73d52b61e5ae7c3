#pragma once

#include "svo/frame_source.hpp"
#include "svo/odometry.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace svo {

struct DescriptorVariant {
  DescriptorBackend backend = DescriptorBackend::Retina;
  bool stereo = false;
  bool scale_norm = false;

  std::string name() const;
  PipelineConfig apply(PipelineConfig cfg) const;
};

struct EvalConfig {
  int frame_stride = 10;         // t advances by this after each step sweep
  int max_step = 10;
  double correctness_tol = 2.0;  // pixels
};

double improvement_percent(double scale_normalized, double standard);

struct TrackingScoreReport {
  std::vector<DescriptorVariant> variants;
  std::vector<long> scores;                    // per variant
  std::vector<std::vector<long>> step_scores;  // [variant][step - 1]
  std::vector<long> matches;                   // per variant, all matches counted
  // Hash of the feature list each variant received before normalisation.
  std::vector<std::uint64_t> feature_fingerprints;
  int feature_budget = 0;
  int frame_pairs = 0;
};

struct PairScore {
  long correct = 0;
  long matches = 0;
};

// Scores one matched pair: a match is correct when the earlier feature's 3D
// point, moved by the ground-truth relative pose (frame a -> frame b),
// projects within tol pixels of the matched feature.
PairScore score_pair(const FrameBundle& a, const FrameBundle& b, const Pose& a_to_b,
                     const StereoRig& rig, const MatchConfig& match, double tol);

// For t = 0, stride, 2 stride, ...: for step = 1..max_step, describe frames
// t and t + step with each variant, match, and count correct matches.
TrackingScoreReport tracking_score(const FrameSource& frames, const PipelineConfig& base,
                                   const RetinaPattern& pattern,
                                   const std::vector<DescriptorVariant>& variants,
                                   const EvalConfig& eval);

struct InlierPairRecord {
  int t = 0;
  int step = 0;
  int matches = 0;
  int inliers = 0;  // 0 when estimation failed
  bool ok = false;
};

struct InlierCurve {
  DescriptorVariant variant;
  std::vector<int> steps;
  std::vector<double> mean_inliers;  // parallel to steps
  std::vector<InlierPairRecord> pairs;
};

// Mean inlier count over every (t, t + step) pair of the sequence.
std::vector<InlierCurve> inlier_curve(const FrameSource& frames, const PipelineConfig& base,
                                      const RetinaPattern& pattern,
                                      const std::vector<DescriptorVariant>& variants,
                                      const std::vector<int>& steps, std::uint64_t seed);

// Re-aggregates per-pair records into per-step means.
std::vector<double> aggregate_inliers(const std::vector<InlierPairRecord>& pairs,
                                      const std::vector<int>& steps);

// Path lengths (meters) evaluated for a ground-truth trajectory: the standard
// 100..800 m set where realizable, otherwise 10%..80% of the total length.
std::vector<double> evaluation_lengths(const Trajectory& gt);

// Mean relative translation error (percent) over all start frames (every
// 10th) and path lengths.
double translation_error(const Trajectory& estimate, const Trajectory& gt);

struct TranslationErrorReport {
  DescriptorVariant variant;
  std::vector<std::uint64_t> seeds;
  std::vector<double> run_errors;  // percent
  std::vector<int> run_fallbacks;
  double best = 0.0;
  double mean = 0.0;
  double worst = 0.0;
};

// Pre-processes every frame once for the variant, then runs the chained
// odometry per seed.
TranslationErrorReport repeated_vo_experiment(const FrameSource& frames, const PipelineConfig& base,
                                              const RetinaPattern& pattern,
                                              const DescriptorVariant& variant,
                                              const std::vector<std::uint64_t>& seeds);

std::vector<FrameBundle> process_all_frames(const FrameSource& frames, const PipelineConfig& cfg,
                                            const RetinaPattern& pattern);

// CSV and text renderings of the reports.
void write_tracking_csv(std::ostream& out, const std::string& sequence,
                        const std::vector<TrackingScoreReport>& reports);
void write_tracking_variants_csv(std::ostream& out, const std::string& sequence,
                                 const std::vector<TrackingScoreReport>& reports);
void write_tracking_table(std::ostream& out, const std::string& sequence,
                          const std::vector<TrackingScoreReport>& reports);
void write_inlier_csv(std::ostream& out, const std::vector<InlierCurve>& curves);
void write_inlier_pairs_csv(std::ostream& out, const std::vector<InlierCurve>& curves);
void write_inlier_table(std::ostream& out, const std::vector<InlierCurve>& curves);
void write_translation_csv(std::ostream& out, const std::vector<TranslationErrorReport>& reports);
void write_translation_runs_csv(std::ostream& out, const std::vector<TranslationErrorReport>& reports);
void write_translation_table(std::ostream& out, const std::vector<TranslationErrorReport>& reports);
// Deterministic per-frame columns; wall-clock times go to the timing file.
void write_diagnostics_csv(std::ostream& out, const std::vector<FrameDiagnostics>& diagnostics);
void write_timing_csv(std::ostream& out, const std::vector<FrameDiagnostics>& diagnostics);

}  // namespace svo
