#pragma once

#include "svo/descriptor.hpp"
#include "svo/detector.hpp"
#include "svo/geometry.hpp"
#include "svo/image.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace svo {

struct Match {
  int query_index = 0;
  int train_index = 0;
  double dist = 0.0;

  bool operator==(const Match&) const = default;
};

struct StereoCorrespondence {
  Feature left_feature;   // carries the triangulated depth
  Feature right_feature;
  double disparity = 0.0;
  double depth = 0.0;
};

struct StereoTrackConfig {
  int half_window = 5;        // ZNCC template is (2h+1)^2
  int epipolar_search = 1;    // rows searched above and below
  double d_min = 1.0;
  double d_max = 120.0;
  double zncc_min = 0.8;
  double lr_tolerance = 1.0;  // pixels, reverse search agreement
  double epipolar_tolerance = 2.0;
  // ZNCC lead an off-row peak needs over the feature's own row.
  double off_row_margin = 0.05;
  int threads = 1;
};

struct EpipolarHit {
  double x = 0.0;  // sub-pixel position in the destination image
  double y = 0.0;
  double score = 0.0;
};

// Best ZNCC position in `dst` for the patch around (x, y) in `src`, searching
// x_dst = x - d for d in [d_min, d_max] over the configured band of rows.
// Negative disparity ranges are allowed (reverse search).
std::optional<EpipolarHit> epipolar_search(const GrayImage& src, const GrayImage& dst, double x,
                                           double y, double d_min, double d_max,
                                           const StereoTrackConfig& cfg);

// Epipolar search followed by the left-right consistency check. Entry i is
// empty when feature i was rejected.
std::vector<std::optional<EpipolarHit>> track_epipolar(const GrayImage& src, const GrayImage& dst,
                                                       const std::vector<Feature>& features,
                                                       double d_min, double d_max,
                                                       const StereoTrackConfig& cfg);

std::vector<StereoCorrespondence> stereo_track(const GrayImage& left, const GrayImage& right,
                                               const std::vector<Feature>& features,
                                               const StereoRig& rig, const StereoTrackConfig& cfg);

struct MatchConfig {
  double binary_abs_threshold = 128.0;  // bits per 512-bit section
  double float_abs_threshold = 0.8;     // L2 per 128-value section
  double binary_ratio = 0.9;
  double float_ratio = 0.8;
  bool mutual = true;
  // Stereo descriptors: also require every section to pass the per-section
  // threshold, not only their sum.
  bool section_check = false;
  int threads = 1;
};

// Brute-force nearest neighbour with absolute threshold, ratio test and
// mutual check. Ties go to the lower index on either side.
std::vector<Match> match_descriptors(const std::vector<Descriptor>& query,
                                     const std::vector<Descriptor>& train, const MatchConfig& cfg);

void write_matches_csv(std::ostream& out, const std::vector<Match>& matches);

}  // namespace svo
