#pragma once

#include "svo/frame_source.hpp"
#include "svo/geometry.hpp"
#include "svo/image.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svo {

// Rectangle origin + [0, extent_u] * axis_u + [0, extent_v] * axis_v carrying
// seeded multi-octave block-noise luminance.
struct TexturedPlane {
  Point3 origin = Point3::Zero();
  Eigen::Vector3d axis_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_v = Eigen::Vector3d::UnitY();
  double extent_u = 1.0;
  double extent_v = 1.0;
  std::uint64_t texture_seed = 1;
  double base_cell = 0.5;  // meters, coarsest texture cell
  int octaves = 4;
  double albedo = 0.5;     // mean luminance in [0, 1]
  double contrast = 0.8;

  bool operator==(const TexturedPlane&) const = default;
};

// Uniformly bright sphere; used for point-like targets.
struct SceneBlob {
  Point3 position = Point3::Zero();
  double radius = 0.05;
  double intensity = 1.0;

  bool operator==(const SceneBlob&) const = default;
};

struct SyntheticScene {
  static constexpr int kVersion = 1;

  std::uint64_t seed = 1;
  int width = 640;
  int height = 360;
  StereoRig rig;
  double noise_sigma = 0.0;  // intensity levels, Gaussian
  int supersample = 2;       // samples per pixel side
  double sky = 0.7;          // luminance of rays that hit nothing
  std::vector<TexturedPlane> planes;
  std::vector<SceneBlob> blobs;
  Trajectory poses;  // left camera to world

  bool operator==(const SyntheticScene& other) const;
};

double texture_value(const TexturedPlane& plane, double s, double t);

StereoFrame render(const SyntheticScene& scene, std::size_t pose_index);

// Depth (camera z) of the first surface hit through pixel (u, v) of the left
// camera at the given pose, if any.
std::optional<double> depth_at(const SyntheticScene& scene, std::size_t pose_index, double u, double v);

struct GroundTruthProjection {
  Pixel left;
  Pixel right;
  double depth = 0.0;
  bool visible = false;  // in front of the camera, inside both images, not occluded
};

GroundTruthProjection project_ground_truth(const SyntheticScene& scene, std::size_t pose_index,
                                           const Point3& world);

std::string serialize_scene(const SyntheticScene& scene);
SyntheticScene parse_scene(std::string_view text);
SyntheticScene load_scene(const std::string& path);

struct CorridorOptions {
  std::uint64_t seed = 7;
  int frames = 100;
  int width = 640;
  int height = 360;
  double fx = 500.0;
  double baseline = 0.54;
  double speed = 1.0;          // meters per frame along +z
  double lateral_sway = 0.0;   // meters, sinusoidal x offset amplitude
  double yaw_sway = 0.0;       // radians, sinusoidal heading amplitude
  double half_width = 6.0;     // corridor walls at x = +-half_width
  double camera_height = 1.6;  // ground plane at y = camera_height
  double wall_height = 10.0;
  double noise_sigma = 0.0;
  int supersample = 2;
  bool obstacles = true;
  bool static_camera = false;
};

// Straight road between two textured facades, with a textured ground plane
// and optional box-like obstacles; camera drives forward along +z.
SyntheticScene make_corridor_scene(const CorridorOptions& options);

// Single fronto-parallel textured plane at `depth` meters, camera at origin.
SyntheticScene make_plane_scene(std::uint64_t seed, double depth, int width, int height, double fx,
                                double baseline);

// Renders lazily and caches frames.
class SyntheticSequence : public FrameSource {
 public:
  explicit SyntheticSequence(SyntheticScene scene);

  std::size_t size() const override { return scene_.poses.size(); }
  StereoFrame frame(std::size_t index) const override;
  const StereoRig& rig() const override { return scene_.rig; }
  std::optional<Trajectory> ground_truth() const override { return scene_.poses; }
  std::string name() const override;

  const SyntheticScene& scene() const { return scene_; }

 private:
  SyntheticScene scene_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, StereoFrame> cache_;
};

}  // namespace svo
