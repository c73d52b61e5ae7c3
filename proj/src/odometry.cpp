#include "svo/odometry.hpp"

#include "svo/error.hpp"
#include "svo/p3p.hpp"
#include "svo/parallel.hpp"
#include "svo/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace svo {

std::vector<StereoCorrespondence> extract_stereo_features(const GrayImage& left,
                                                          const GrayImage& right,
                                                          const StereoRig& rig,
                                                          const PipelineConfig& cfg) {
  const auto features = detect(left, cfg.detector);
  StereoTrackConfig stereo = cfg.stereo;
  stereo.threads = cfg.threads;
  return stereo_track(left, right, features, rig, stereo);
}

FrameBundle describe_frame(int index, std::shared_ptr<const GrayImage> left,
                           std::shared_ptr<const GrayImage> right,
                           const std::vector<StereoCorrespondence>& correspondences,
                           const StereoRig& rig, const PipelineConfig& cfg,
                           const RetinaPattern& pattern) {
  if (!left->has_integral() || !right->has_integral()) {
    throw Error(ErrorCode::InvalidArgument, "describe_frame needs images with summed-area tables");
  }
  std::vector<Feature> lefts;
  lefts.reserve(correspondences.size());
  for (const auto& c : correspondences) lefts.push_back(c.left_feature);
  const auto sized = normalize_scale(lefts, rig, cfg.scale);

  std::vector<StereoCorrespondence> kept_candidates;
  for (std::size_t i = 0; i < correspondences.size(); ++i) {
    StereoCorrespondence c = correspondences[i];
    c.left_feature.size = sized[i].size;
    c.right_feature.size = sized[i].size;
    if (!describable(*left, c.left_feature, cfg.backend, pattern)) continue;
    if (cfg.stereo_descriptor && !describable(*right, c.right_feature, cfg.backend, pattern)) continue;
    kept_candidates.push_back(c);
  }

  std::vector<Descriptor> descriptors(kept_candidates.size());
  parallel_for(kept_candidates.size(), cfg.threads, [&](std::size_t i) {
    const auto& c = kept_candidates[i];
    descriptors[i] = cfg.stereo_descriptor
                         ? describe_stereo(*left, *right, c.left_feature, c.right_feature,
                                           cfg.backend, pattern)
                         : describe(*left, c.left_feature, cfg.backend, pattern);
  });

  FrameBundle bundle;
  bundle.index = index;
  bundle.left = std::move(left);
  bundle.right = std::move(right);
  bundle.correspondences = std::move(kept_candidates);
  bundle.descriptors = std::move(descriptors);
  return bundle;
}

FrameBundle process_frame(int index, const GrayImage& left, const GrayImage& right,
                          const StereoRig& rig, const PipelineConfig& cfg,
                          const RetinaPattern& pattern) {
  auto l = std::make_shared<GrayImage>(left);
  auto r = std::make_shared<GrayImage>(right);
  if (l->width() != r->width() || l->height() != r->height()) {
    throw Error(ErrorCode::InvalidArgument, "left and right images differ in size");
  }
  if (!l->has_integral()) l->build_integral();
  if (!r->has_integral()) r->build_integral();
  const auto correspondences = extract_stereo_features(*l, *r, rig, cfg);
  return describe_frame(index, std::move(l), std::move(r), correspondences, rig, cfg, pattern);
}

Point3 correspondence_point(const StereoCorrespondence& c, const StereoRig& rig) {
  const auto& k = rig.intrinsics;
  const double z = c.depth;
  return {(c.left_feature.x - k.cx) * z / k.fx, (c.left_feature.y - k.cy) * z / k.fy, z};
}

namespace {

constexpr double kBehindCamera = std::numeric_limits<double>::infinity();

double pixel_error(const Point3& q, double u, double v, const PinholeIntrinsics& k) {
  if (!(q.z() > 1e-9)) return kBehindCamera;
  return std::hypot(k.fx * q.x() / q.z() + k.cx - u, k.fy * q.y() / q.z() + k.cy - v);
}

// On a rectified rig the right observation shares the left row, so only its
// column is an independent measurement.
double right_column_error(const Point3& q, double u, const StereoRig& rig) {
  if (!(q.z() > 1e-9)) return kBehindCamera;
  const auto& k = rig.intrinsics;
  return std::abs(k.fx * (q.x() - rig.baseline) / q.z() + k.cx - u);
}

struct Correspondence3d2d {
  Point3 point;
  Pixel left;
  Pixel right;
};

// Both reprojection errors must be within tolerance.
bool is_inlier(const Pose& pose, const Correspondence3d2d& c, const StereoRig& rig, double tol,
               double* err) {
  const Point3 q = pose * c.point;
  const double el = pixel_error(q, c.left.x(), c.left.y(), rig.intrinsics);
  const double er = right_column_error(q, c.right.x(), rig);
  if (err) *err = 0.5 * (el + er);
  return el <= tol && er <= tol;
}

std::vector<int> collect_inliers(const Pose& pose, const std::vector<Correspondence3d2d>& data,
                                 const StereoRig& rig, double tol, double* mean_err) {
  std::vector<int> inliers;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double e = 0.0;
    if (is_inlier(pose, data[i], rig, tol, &e)) {
      inliers.push_back(static_cast<int>(i));
      sum += e;
    }
  }
  if (mean_err) *mean_err = inliers.empty() ? 0.0 : sum / inliers.size();
  return inliers;
}

}  // namespace

double left_reprojection_error(const Pose& pose, const Point3& p, const StereoCorrespondence& obs,
                               const StereoRig& rig) {
  return pixel_error(pose * p, obs.left_feature.x, obs.left_feature.y, rig.intrinsics);
}

double right_reprojection_error(const Pose& pose, const Point3& p, const StereoCorrespondence& obs,
                                const StereoRig& rig) {
  return right_column_error(pose * p, obs.right_feature.x, rig);
}

Pose refine_pose(const Pose& initial, const std::vector<PoseObservation>& observations,
                 const StereoRig& rig, int max_iterations, double epsilon) {
  const auto& k = rig.intrinsics;
  Pose pose = initial;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& obs : observations) {
      const Point3 q = pose * obs.point;
      if (!(q.z() > 1e-9)) continue;
      Eigen::Matrix<double, 3, 6> dq;
      dq.leftCols<3>() = Eigen::Matrix3d::Identity();
      dq.rightCols<3>() = -skew(q);
      const double iz = 1.0 / q.z();
      const Eigen::Vector3d r(k.fx * q.x() * iz + k.cx - obs.left.x(), k.fy * q.y() * iz + k.cy - obs.left.y(),
                              k.fx * (q.x() - rig.baseline) * iz + k.cx - obs.right.x());
      Eigen::Matrix3d dp;
      dp << k.fx * iz, 0, -k.fx * q.x() * iz * iz,
            0, k.fy * iz, -k.fy * q.y() * iz * iz,
            k.fx * iz, 0, -k.fx * (q.x() - rig.baseline) * iz * iz;
      const Eigen::Matrix<double, 3, 6> j = dp * dq;
      h += j.transpose() * j;
      g += j.transpose() * r;
    }
    const Eigen::Matrix<double, 6, 1> delta = h.ldlt().solve(-g);
    if (!delta.allFinite()) break;
    pose = Pose::exp(delta) * pose;
    if (delta.norm() < epsilon) break;
  }
  return pose;
}

MotionEstimate estimate_motion_from_matches(const FrameBundle& prev, const FrameBundle& curr,
                                            std::vector<Match> matches, const StereoRig& rig,
                                            const RansacConfig& cfg, std::uint64_t seed) {
  const int min_required = std::max(cfg.min_inliers, 3);
  if (static_cast<int>(matches.size()) < min_required) {
    throw Error(ErrorCode::InsufficientMatches,
                std::to_string(matches.size()) + " matches, need " + std::to_string(min_required));
  }
  std::vector<Correspondence3d2d> data;
  data.reserve(matches.size());
  for (const auto& m : matches) {
    const auto& p = prev.correspondences.at(m.query_index);
    const auto& c = curr.correspondences.at(m.train_index);
    data.push_back({correspondence_point(p, rig), Pixel(c.left_feature.x, c.left_feature.y),
                    Pixel(c.right_feature.x, c.right_feature.y)});
  }
  const auto& k = rig.intrinsics;
  auto bearing = [&k](const Pixel& px) {
    return Eigen::Vector3d((px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy, 1.0).normalized();
  };

  Rng rng(seed);
  const std::size_t n = data.size();
  std::vector<int> best_inliers;
  Pose best_pose;
  int needed = cfg.max_iterations;
  int iterations = 0;
  int degenerate = 0;
  const int max_degenerate = 10 * std::max(cfg.max_iterations, 1);
  while (iterations < needed && iterations < cfg.max_iterations) {
    std::array<std::size_t, 3> idx{};
    idx[0] = uniform_index(rng, n);
    do {
      idx[1] = uniform_index(rng, n);
    } while (idx[1] == idx[0]);
    do {
      idx[2] = uniform_index(rng, n);
    } while (idx[2] == idx[0] || idx[2] == idx[1]);

    const std::array<Point3, 3> world = {data[idx[0]].point, data[idx[1]].point, data[idx[2]].point};
    const double area = (world[1] - world[0]).cross(world[2] - world[0]).norm();
    const double scale = std::max({(world[1] - world[0]).squaredNorm(),
                                   (world[2] - world[0]).squaredNorm(), 1e-12});
    if (area < 1e-6 * scale) {
      if (++degenerate > max_degenerate) {
        throw Error(ErrorCode::DegenerateGeometry, "every minimal sample was collinear");
      }
      continue;
    }
    ++iterations;
    const std::array<Eigen::Vector3d, 3> bearings = {bearing(data[idx[0]].left), bearing(data[idx[1]].left),
                                                     bearing(data[idx[2]].left)};
    for (const Pose& hypothesis : solve_p3p(bearings, world)) {
      auto inliers = collect_inliers(hypothesis, data, rig, cfg.reproj_tol, nullptr);
      if (inliers.size() > best_inliers.size()) {
        best_inliers = std::move(inliers);
        best_pose = hypothesis;
        const double w = static_cast<double>(best_inliers.size()) / n;
        const double miss = 1.0 - w * w * w;
        if (miss <= 1e-12) {
          needed = iterations;
        } else {
          const double est = std::log(1.0 - cfg.confidence) / std::log(miss);
          needed = static_cast<int>(std::min<double>(std::ceil(est), cfg.max_iterations));
        }
      }
    }
  }
  if (static_cast<int>(best_inliers.size()) < min_required) {
    throw Error(ErrorCode::NoConsensus, "best hypothesis has " + std::to_string(best_inliers.size()) +
                                            " inliers, need " + std::to_string(min_required));
  }

  // Refine on the consensus set, re-select inliers, refine once more.
  Pose pose = best_pose;
  std::vector<int> inliers = best_inliers;
  for (int round = 0; round < 2; ++round) {
    std::vector<PoseObservation> obs;
    obs.reserve(inliers.size());
    for (int i : inliers) obs.push_back({data[i].point, data[i].left, data[i].right});
    const Pose refined = refine_pose(pose, obs, rig, cfg.refine_iterations, cfg.refine_epsilon);
    auto refined_inliers = collect_inliers(refined, data, rig, cfg.reproj_tol, nullptr);
    if (refined_inliers.size() < inliers.size()) break;
    pose = refined;
    inliers = std::move(refined_inliers);
  }

  MotionEstimate est;
  est.pose = pose;
  est.inliers = collect_inliers(pose, data, rig, cfg.reproj_tol, &est.mean_reproj_err);
  est.matches = std::move(matches);
  est.iterations = iterations;
  if (static_cast<int>(est.inliers.size()) < min_required) {
    throw Error(ErrorCode::NoConsensus, "refined pose lost consensus");
  }
  return est;
}

MotionEstimate estimate_motion(const FrameBundle& prev, const FrameBundle& curr,
                               const StereoRig& rig, const PipelineConfig& cfg,
                               std::uint64_t seed) {
  if (prev.size() == 0 || curr.size() == 0) {
    throw Error(ErrorCode::InsufficientMatches, "empty frame bundle");
  }
  MatchConfig match = cfg.match;
  match.threads = cfg.threads;
  auto matches = match_descriptors(prev.descriptors, curr.descriptors, match);
  return estimate_motion_from_matches(prev, curr, std::move(matches), rig, cfg.ransac, seed);
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Appends the next absolute pose and a diagnostics row.
void chain_step(SequenceResult& result, Pose& velocity, const FrameBundle& prev,
                const FrameBundle& curr, const StereoRig& rig, const PipelineConfig& cfg,
                std::uint64_t seed, int frame, std::chrono::steady_clock::time_point start) {
  FrameDiagnostics diag;
  diag.frame = frame;
  try {
    const auto est = estimate_motion(prev, curr, rig, cfg, derive_seed(seed, "ransac", frame));
    velocity = est.pose;
    diag.matches = static_cast<int>(est.matches.size());
    diag.inliers = static_cast<int>(est.inliers.size());
    diag.mean_reproj_err = est.mean_reproj_err;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientMatches && e.code() != ErrorCode::NoConsensus &&
        e.code() != ErrorCode::DegenerateGeometry) {
      throw;
    }
    diag.fallback = true;
    ++result.fallbacks;
  }
  // velocity maps frame t points into frame t+1; the camera moves by its inverse.
  result.poses.push_back(result.poses.back() * velocity.inverse());
  diag.runtime_ms = elapsed_ms(start);
  result.diagnostics.push_back(diag);
}

}  // namespace

SequenceResult run_sequence_on_bundles(const std::vector<FrameBundle>& bundles, const StereoRig& rig,
                                       const PipelineConfig& cfg, std::uint64_t seed) {
  if (bundles.size() < 2) throw Error(ErrorCode::TooFewFrames, "need at least two frames");
  SequenceResult result;
  result.poses.push_back(Pose::identity());
  Pose velocity;
  for (std::size_t i = 1; i < bundles.size(); ++i) {
    chain_step(result, velocity, bundles[i - 1], bundles[i], rig, cfg, seed, static_cast<int>(i),
               std::chrono::steady_clock::now());
  }
  return result;
}

SequenceResult run_sequence(const FrameSource& frames, const PipelineConfig& cfg,
                            const RetinaPattern& pattern, std::uint64_t seed) {
  if (frames.size() < 2) throw Error(ErrorCode::TooFewFrames, "need at least two frames");
  const StereoRig& rig = frames.rig();
  SequenceResult result;
  result.poses.push_back(Pose::identity());
  Pose velocity;
  auto first = frames.frame(0);
  FrameBundle prev = process_frame(0, first.left, first.right, rig, cfg, pattern);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    auto frame = frames.frame(i);
    FrameBundle curr = process_frame(static_cast<int>(i), frame.left, frame.right, rig, cfg, pattern);
    chain_step(result, velocity, prev, curr, rig, cfg, seed, static_cast<int>(i), start);
    prev = std::move(curr);
  }
  return result;
}

}  // namespace svo
