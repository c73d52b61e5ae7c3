#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace svo {

// One retina sampling point. `radius` and `sigma` are fractions of the
// pattern unit, which is feature.size * RetinaPattern::unit_scale pixels.
struct RetinaPoint {
  double angle = 0.0;
  double radius = 0.0;
  double sigma = 0.0;
  int ring = -1;  // 0 = outermost ring, -1 = centre

  bool operator==(const RetinaPoint&) const = default;
};

struct RetinaPatternConfig {
  int rings = 7;
  int points_per_ring = 6;
  double inner_radius = 0.1;
  double outer_radius = 1.0;
  double sigma_ratio = 0.4;
  double unit_scale = 2.5;
  int num_pairs = 512;
  std::uint64_t seed = 0x5eed'f4ea'cULL;
};

struct RetinaPattern {
  static constexpr int kVersion = 1;
  static constexpr int kNumPoints = 43;
  static constexpr int kNumPairs = 512;
  static constexpr int kNumOrientationPairs = 45;

  double unit_scale = 2.5;
  std::vector<RetinaPoint> points;
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::pair<int, int>> orientation_pairs;

  // Largest extent of any smoothing box, in multiples of feature.size.
  double support_factor() const;

  bool operator==(const RetinaPattern&) const = default;
};

RetinaPattern make_retina_pattern(const RetinaPatternConfig& cfg = {});

// Versioned text table: header, then POINT / PAIR / ORIENT records.
std::string serialize_pattern(const RetinaPattern& pattern);
RetinaPattern parse_pattern(std::string_view text);
RetinaPattern load_pattern(const std::string& path);

}  // namespace svo
