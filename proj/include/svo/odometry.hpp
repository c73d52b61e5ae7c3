#pragma once

#include "svo/descriptor.hpp"
#include "svo/detector.hpp"
#include "svo/frame_source.hpp"
#include "svo/geometry.hpp"
#include "svo/matching.hpp"
#include "svo/retina_pattern.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace svo {

struct RansacConfig {
  int max_iterations = 1000;
  double confidence = 0.99;
  double reproj_tol = 2.0;  // pixels, applied to the left and right view
  int min_inliers = 8;
  int refine_iterations = 10;
  double refine_epsilon = 1e-9;
};

struct PipelineConfig {
  DetectorConfig detector;
  StereoTrackConfig stereo;
  ScaleConfig scale;
  DescriptorBackend backend = DescriptorBackend::Retina;
  bool stereo_descriptor = false;
  MatchConfig match;
  RansacConfig ransac;
  int threads = 1;
  int max_fallbacks = -1;  // frames allowed to use the fallback; -1 = unlimited
};

// One timestep after detection, stereo tracking and description.
// descriptors[i] describes correspondences[i].
struct FrameBundle {
  int index = 0;
  std::shared_ptr<const GrayImage> left;
  std::shared_ptr<const GrayImage> right;
  std::vector<StereoCorrespondence> correspondences;
  std::vector<Descriptor> descriptors;

  std::size_t size() const { return correspondences.size(); }
};

struct MotionEstimate {
  Pose pose;                 // maps points of frame t into frame t + step
  std::vector<Match> matches;
  std::vector<int> inliers;  // indices into matches
  double mean_reproj_err = 0.0;
  int iterations = 0;
};

// Detection on the left image followed by stereo tracking into the right.
std::vector<StereoCorrespondence> extract_stereo_features(const GrayImage& left,
                                                          const GrayImage& right,
                                                          const StereoRig& rig,
                                                          const PipelineConfig& cfg);

// Scale normalisation (if enabled) and description of tracked features.
// Features whose support leaves either described image are dropped.
FrameBundle describe_frame(int index, std::shared_ptr<const GrayImage> left,
                           std::shared_ptr<const GrayImage> right,
                           const std::vector<StereoCorrespondence>& correspondences,
                           const StereoRig& rig, const PipelineConfig& cfg,
                           const RetinaPattern& pattern);

FrameBundle process_frame(int index, const GrayImage& left, const GrayImage& right,
                          const StereoRig& rig, const PipelineConfig& cfg,
                          const RetinaPattern& pattern);

// 3D point of a correspondence in its frame.
Point3 correspondence_point(const StereoCorrespondence& c, const StereoRig& rig);

// Left error is the full pixel distance; the right view shares the left row
// on a rectified rig, so its error is the column difference only.
double left_reprojection_error(const Pose& pose, const Point3& p, const StereoCorrespondence& obs,
                               const StereoRig& rig);
double right_reprojection_error(const Pose& pose, const Point3& p, const StereoCorrespondence& obs,
                                const StereoRig& rig);

struct PoseObservation {
  Point3 point;  // in the source frame
  Pixel left;
  Pixel right;
};

// Gauss-Newton on the left (u, v) and right u reprojection residuals; the pose
// is updated multiplicatively by the exponential of a 6-vector twist.
Pose refine_pose(const Pose& initial, const std::vector<PoseObservation>& observations,
                 const StereoRig& rig, int max_iterations, double epsilon);

// RANSAC over P3P hypotheses for already matched 3D-2D pairs.
MotionEstimate estimate_motion_from_matches(const FrameBundle& prev, const FrameBundle& curr,
                                            std::vector<Match> matches, const StereoRig& rig,
                                            const RansacConfig& cfg, std::uint64_t seed);

MotionEstimate estimate_motion(const FrameBundle& prev, const FrameBundle& curr,
                               const StereoRig& rig, const PipelineConfig& cfg,
                               std::uint64_t seed);

struct FrameDiagnostics {
  int frame = 0;
  int matches = 0;
  int inliers = 0;
  double mean_reproj_err = 0.0;
  double runtime_ms = 0.0;
  bool fallback = false;
};

struct SequenceResult {
  Trajectory poses;  // camera-to-world, poses[0] = identity
  std::vector<FrameDiagnostics> diagnostics;  // one row per frame after the first
  int fallbacks = 0;
};

// Chains frame-to-frame motion over pre-processed bundles. Failed frames
// reuse the previous motion (constant velocity) and are flagged.
SequenceResult run_sequence_on_bundles(const std::vector<FrameBundle>& bundles, const StereoRig& rig,
                                       const PipelineConfig& cfg, std::uint64_t seed);

SequenceResult run_sequence(const FrameSource& frames, const PipelineConfig& cfg,
                            const RetinaPattern& pattern, std::uint64_t seed);

}  // namespace svo
