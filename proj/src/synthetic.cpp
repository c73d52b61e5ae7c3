#include "svo/synthetic.hpp"

#include "svo/error.hpp"
#include "svo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace svo {
namespace {

double hash01(std::uint64_t seed, std::uint64_t a, std::int64_t b, std::int64_t c) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(a));
  h = splitmix64(h ^ static_cast<std::uint64_t>(b));
  h = splitmix64(h ^ static_cast<std::uint64_t>(c));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct Ray {
  Eigen::Vector3d origin;
  Eigen::Vector3d dir;  // camera-frame z component is 1
};

struct Hit {
  double depth = std::numeric_limits<double>::infinity();
  double luminance = 0.0;
};

// Lattice placement of one texture octave.
struct OctaveFrame {
  double ox, oy, ca, sa, cell, amp;
};

std::vector<OctaveFrame> octave_frames(const TexturedPlane& plane) {
  std::vector<OctaveFrame> frames;
  double amp = 1.0;
  double cell = plane.base_cell;
  for (int k = 0; k < plane.octaves; ++k) {
    // Each octave's lattice is shifted and rotated so cell corners differ in
    // shape across octaves.
    const double ox = hash01(plane.texture_seed, 1000 + k, 0, 0) * cell;
    const double oy = hash01(plane.texture_seed, 2000 + k, 0, 0) * cell;
    const double angle = hash01(plane.texture_seed, 3000 + k, 0, 0) * 1.5707963267948966;
    frames.push_back({ox, oy, std::cos(angle), std::sin(angle), cell, amp});
    amp *= 0.65;
    cell *= 0.5;
  }
  return frames;
}

double shade(const TexturedPlane& plane, const std::vector<OctaveFrame>& frames, double s, double t) {
  double acc = 0.0;
  double norm = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    const double rs = f.ca * s - f.sa * t;
    const double rt = f.sa * s + f.ca * t;
    const auto ix = static_cast<std::int64_t>(std::floor((rs + f.ox) / f.cell));
    const auto iy = static_cast<std::int64_t>(std::floor((rt + f.oy) / f.cell));
    acc += f.amp * hash01(plane.texture_seed, k, ix, iy);
    norm += f.amp;
  }
  // Octave averaging narrows the spread; stretch it back towards uniform.
  const double tex = std::clamp(0.5 + 1.8 * (acc / norm - 0.5), 0.0, 1.0);
  return std::clamp(plane.albedo + plane.contrast * (tex - 0.5), 0.0, 1.0);
}

struct PreparedPlane {
  const TexturedPlane* plane;
  Eigen::Vector3d normal;
  std::vector<OctaveFrame> octaves;
};

std::vector<PreparedPlane> prepare(const SyntheticScene& scene) {
  std::vector<PreparedPlane> out;
  for (const auto& p : scene.planes) out.push_back({&p, p.axis_u.cross(p.axis_v), octave_frames(p)});
  return out;
}

Hit trace(const SyntheticScene& scene, const std::vector<PreparedPlane>& planes, const Ray& ray,
          bool with_shading) {
  Hit hit;
  for (const auto& pp : planes) {
    const double denom = pp.normal.dot(ray.dir);
    if (std::abs(denom) < 1e-12) continue;
    const double lambda = pp.normal.dot(pp.plane->origin - ray.origin) / denom;
    if (!(lambda > 1e-6) || lambda >= hit.depth) continue;
    const Eigen::Vector3d rel = ray.origin + lambda * ray.dir - pp.plane->origin;
    const double s = rel.dot(pp.plane->axis_u);
    const double t = rel.dot(pp.plane->axis_v);
    if (s < 0 || t < 0 || s > pp.plane->extent_u || t > pp.plane->extent_v) continue;
    hit.depth = lambda;
    if (with_shading) hit.luminance = shade(*pp.plane, pp.octaves, s, t);
  }
  for (const auto& blob : scene.blobs) {
    const Eigen::Vector3d oc = ray.origin - blob.position;
    const double a = ray.dir.squaredNorm();
    const double b = 2.0 * ray.dir.dot(oc);
    const double c = oc.squaredNorm() - blob.radius * blob.radius;
    const double disc = b * b - 4 * a * c;
    if (disc < 0) continue;
    const double lambda = (-b - std::sqrt(disc)) / (2 * a);
    if (!(lambda > 1e-6) || lambda >= hit.depth) continue;
    hit.depth = lambda;
    hit.luminance = blob.intensity;
  }
  return hit;
}

Ray camera_ray(const Pose& camera_to_world, const Eigen::Vector3d& offset, const PinholeIntrinsics& k,
               double u, double v) {
  Ray r;
  r.origin = camera_to_world * offset;
  r.dir = camera_to_world.rotation() * Eigen::Vector3d((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
  return r;
}

GrayImage render_view(const SyntheticScene& scene, const std::vector<PreparedPlane>& planes,
                      const Pose& camera_to_world, const Eigen::Vector3d& offset, Rng& noise) {
  const auto& k = scene.rig.intrinsics;
  const int ss = std::max(scene.supersample, 1);
  GrayImage img(scene.width, scene.height);
  auto pixels = img.mutable_pixels();
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      double acc = 0.0;
      for (int j = 0; j < ss; ++j) {
        for (int i = 0; i < ss; ++i) {
          const double u = x + (i + 0.5) / ss - 0.5;
          const double v = y + (j + 0.5) / ss - 0.5;
          const Hit h = trace(scene, planes, camera_ray(camera_to_world, offset, k, u, v), true);
          acc += std::isfinite(h.depth) ? h.luminance : scene.sky;
        }
      }
      double value = 255.0 * acc / (ss * ss);
      if (scene.noise_sigma > 0) value += scene.noise_sigma * normal_real(noise);
      pixels[static_cast<std::size_t>(y) * scene.width + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
    }
  }
  return img;
}

}  // namespace

bool SyntheticScene::operator==(const SyntheticScene& other) const {
  if (seed != other.seed || width != other.width || height != other.height ||
      rig.baseline != other.rig.baseline || rig.intrinsics.fx != other.rig.intrinsics.fx ||
      rig.intrinsics.fy != other.rig.intrinsics.fy || rig.intrinsics.cx != other.rig.intrinsics.cx ||
      rig.intrinsics.cy != other.rig.intrinsics.cy || noise_sigma != other.noise_sigma ||
      supersample != other.supersample || sky != other.sky || planes != other.planes ||
      blobs != other.blobs || poses.size() != other.poses.size()) {
    return false;
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (poses[i].matrix34() != other.poses[i].matrix34()) return false;
  }
  return true;
}

double texture_value(const TexturedPlane& plane, double s, double t) {
  return shade(plane, octave_frames(plane), s, t);
}

StereoFrame render(const SyntheticScene& scene, std::size_t pose_index) {
  if (pose_index >= scene.poses.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "pose index " + std::to_string(pose_index) + " out of range");
  }
  const auto planes = prepare(scene);
  const Pose& pose = scene.poses[pose_index];
  Rng noise_left(derive_seed(scene.seed, "render-noise", 2 * pose_index));
  Rng noise_right(derive_seed(scene.seed, "render-noise", 2 * pose_index + 1));
  StereoFrame frame;
  frame.left = render_view(scene, planes, pose, Eigen::Vector3d::Zero(), noise_left);
  frame.right = render_view(scene, planes, pose, Eigen::Vector3d(scene.rig.baseline, 0, 0), noise_right);
  return frame;
}

std::optional<double> depth_at(const SyntheticScene& scene, std::size_t pose_index, double u, double v) {
  if (pose_index >= scene.poses.size()) throw Error(ErrorCode::IndexOutOfRange, "pose index out of range");
  const auto planes = prepare(scene);
  const Hit h = trace(scene, planes,
                      camera_ray(scene.poses[pose_index], Eigen::Vector3d::Zero(), scene.rig.intrinsics, u, v),
                      false);
  if (!std::isfinite(h.depth)) return std::nullopt;
  return h.depth;
}

GroundTruthProjection project_ground_truth(const SyntheticScene& scene, std::size_t pose_index,
                                           const Point3& world) {
  if (pose_index >= scene.poses.size()) throw Error(ErrorCode::IndexOutOfRange, "pose index out of range");
  GroundTruthProjection out;
  const Point3 cam = scene.poses[pose_index].inverse() * world;
  out.depth = cam.z();
  if (!(cam.z() > 1e-6)) return out;
  out.left = project(cam, scene.rig.intrinsics);
  out.right = project_right(cam, scene.rig);
  auto inside = [&](const Pixel& p) {
    return p.x() >= -0.5 && p.y() >= -0.5 && p.x() <= scene.width - 0.5 && p.y() <= scene.height - 0.5;
  };
  if (!inside(out.left) || !inside(out.right)) return out;
  const auto d = depth_at(scene, pose_index, out.left.x(), out.left.y());
  out.visible = d && *d > cam.z() * (1.0 - 1e-6);
  return out;
}

std::string serialize_scene(const SyntheticScene& scene) {
  std::ostringstream out;
  char buf[512];
  auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out << buf;
  };
  const auto& k = scene.rig.intrinsics;
  line("svo-synthetic-scene %d\n", SyntheticScene::kVersion);
  line("seed %llu\n", static_cast<unsigned long long>(scene.seed));
  line("image %d %d\n", scene.width, scene.height);
  line("rig %.17g %.17g %.17g %.17g %.17g\n", k.fx, k.fy, k.cx, k.cy, scene.rig.baseline);
  line("noise %.17g\n", scene.noise_sigma);
  line("supersample %d\n", scene.supersample);
  line("sky %.17g\n", scene.sky);
  line("planes %zu\n", scene.planes.size());
  for (const auto& p : scene.planes) {
    line("PLANE %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %llu %.17g %d %.17g %.17g\n",
         p.origin.x(), p.origin.y(), p.origin.z(), p.axis_u.x(), p.axis_u.y(), p.axis_u.z(),
         p.axis_v.x(), p.axis_v.y(), p.axis_v.z(), p.extent_u, p.extent_v,
         static_cast<unsigned long long>(p.texture_seed), p.base_cell, p.octaves, p.albedo, p.contrast);
  }
  line("blobs %zu\n", scene.blobs.size());
  for (const auto& b : scene.blobs) {
    line("BLOB %.17g %.17g %.17g %.17g %.17g\n", b.position.x(), b.position.y(), b.position.z(),
         b.radius, b.intensity);
  }
  line("poses %zu\n", scene.poses.size());
  for (const auto& pose : scene.poses) {
    const auto m = pose.matrix34();
    out << "POSE";
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) line(" %.17g", m(r, c));
    }
    out << "\n";
  }
  return out.str();
}

SyntheticScene parse_scene(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& what) {
    return Error(ErrorCode::ConfigError, "malformed synthetic scene: " + what);
  };
  auto expect = [&](const char* tag) {
    std::string got;
    if (!(in >> got) || got != tag) throw fail(std::string("expected ") + tag);
  };
  SyntheticScene scene;
  int version = 0;
  expect("svo-synthetic-scene");
  if (!(in >> version) || version != SyntheticScene::kVersion) throw fail("unsupported version");
  auto& k = scene.rig.intrinsics;
  std::size_t n = 0;
  expect("seed");
  in >> scene.seed;
  expect("image");
  in >> scene.width >> scene.height;
  expect("rig");
  in >> k.fx >> k.fy >> k.cx >> k.cy >> scene.rig.baseline;
  expect("noise");
  in >> scene.noise_sigma;
  expect("supersample");
  in >> scene.supersample;
  expect("sky");
  in >> scene.sky;
  expect("planes");
  in >> n;
  for (std::size_t i = 0; i < n && in; ++i) {
    TexturedPlane p;
    expect("PLANE");
    in >> p.origin.x() >> p.origin.y() >> p.origin.z() >> p.axis_u.x() >> p.axis_u.y() >>
        p.axis_u.z() >> p.axis_v.x() >> p.axis_v.y() >> p.axis_v.z() >> p.extent_u >> p.extent_v >>
        p.texture_seed >> p.base_cell >> p.octaves >> p.albedo >> p.contrast;
    scene.planes.push_back(p);
  }
  expect("blobs");
  in >> n;
  for (std::size_t i = 0; i < n && in; ++i) {
    SceneBlob b;
    expect("BLOB");
    in >> b.position.x() >> b.position.y() >> b.position.z() >> b.radius >> b.intensity;
    scene.blobs.push_back(b);
  }
  expect("poses");
  in >> n;
  for (std::size_t i = 0; i < n && in; ++i) {
    expect("POSE");
    Eigen::Matrix<double, 3, 4> m;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) in >> m(r, c);
    }
    scene.poses.push_back(Pose::from_matrix34(m));
  }
  if (!in) throw fail("truncated");
  if (!scene.rig.valid() || scene.width <= 0 || scene.height <= 0) throw fail("invalid camera");
  return scene;
}

SyntheticScene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scene file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

SyntheticScene make_corridor_scene(const CorridorOptions& o) {
  SyntheticScene scene;
  scene.seed = o.seed;
  scene.width = o.width;
  scene.height = o.height;
  scene.rig.intrinsics = {o.fx, o.fx, (o.width - 1) / 2.0, (o.height - 1) / 2.0};
  scene.rig.baseline = o.baseline;
  scene.noise_sigma = o.noise_sigma;
  scene.supersample = o.supersample;

  Rng rng(derive_seed(o.seed, "corridor-layout"));
  const double travel = o.static_camera ? 0.0 : o.speed * std::max(o.frames - 1, 0);
  const double z0 = -10.0;
  const double length = travel + 150.0;
  auto texture_seed = [&](int i) { return derive_seed(o.seed, "texture", static_cast<std::uint64_t>(i)); };

  TexturedPlane ground;
  ground.origin = Point3(-o.half_width - 2.0, o.camera_height, z0);
  ground.axis_u = Eigen::Vector3d::UnitX();
  ground.axis_v = Eigen::Vector3d::UnitZ();
  ground.extent_u = 2.0 * o.half_width + 4.0;
  ground.extent_v = length;
  ground.texture_seed = texture_seed(0);
  ground.base_cell = 0.8;
  ground.octaves = 4;
  ground.albedo = 0.4;
  ground.contrast = 0.6;
  scene.planes.push_back(ground);

  for (int side = 0; side < 2; ++side) {
    TexturedPlane wall;
    const double x = side == 0 ? -o.half_width : o.half_width;
    wall.origin = Point3(x, o.camera_height, z0);
    wall.axis_u = Eigen::Vector3d::UnitZ();
    wall.axis_v = -Eigen::Vector3d::UnitY();
    wall.extent_u = length;
    wall.extent_v = o.wall_height;
    wall.texture_seed = texture_seed(1 + side);
    wall.base_cell = 1.2;
    wall.octaves = 5;
    wall.albedo = 0.5;
    wall.contrast = 0.85;
    scene.planes.push_back(wall);
  }

  if (o.obstacles) {
    // Fronto-parallel boards standing beside the road.
    int id = 3;
    for (double z = 12.0; z < z0 + length - 20.0; z += 6.0 + 6.0 * uniform_real(rng)) {
      TexturedPlane board;
      const bool left = uniform_real(rng) < 0.5;
      const double w = 1.0 + 1.5 * uniform_real(rng);
      const double h = 1.5 + 2.5 * uniform_real(rng);
      const double inner = 2.2 + 1.5 * uniform_real(rng);
      const double x0 = left ? -inner - w : inner;
      board.origin = Point3(x0, o.camera_height - h, z);
      board.axis_u = Eigen::Vector3d::UnitX();
      board.axis_v = Eigen::Vector3d::UnitY();
      board.extent_u = w;
      board.extent_v = h;
      board.texture_seed = texture_seed(id++);
      board.base_cell = 0.6;
      board.octaves = 4;
      board.albedo = 0.45 + 0.2 * uniform_real(rng);
      board.contrast = 0.9;
      scene.planes.push_back(board);
    }
  }

  for (int i = 0; i < o.frames; ++i) {
    if (o.static_camera) {
      scene.poses.push_back(Pose::identity());
      continue;
    }
    const double x = o.lateral_sway * std::sin(2.0 * std::numbers::pi * i / 60.0);
    const double yaw = o.yaw_sway * std::sin(2.0 * std::numbers::pi * i / 80.0);
    scene.poses.emplace_back(rotation_y(yaw), Eigen::Vector3d(x, 0.0, o.speed * i));
  }
  return scene;
}

SyntheticScene make_plane_scene(std::uint64_t seed, double depth, int width, int height, double fx,
                                double baseline) {
  SyntheticScene scene;
  scene.seed = seed;
  scene.width = width;
  scene.height = height;
  scene.rig.intrinsics = {fx, fx, (width - 1) / 2.0, (height - 1) / 2.0};
  scene.rig.baseline = baseline;
  TexturedPlane plane;
  const double half = 4.0 * depth * std::max(width, height) / fx;
  plane.origin = Point3(-half, -half, depth);
  plane.axis_u = Eigen::Vector3d::UnitX();
  plane.axis_v = Eigen::Vector3d::UnitY();
  plane.extent_u = 2.0 * half;
  plane.extent_v = 2.0 * half;
  plane.texture_seed = derive_seed(seed, "texture");
  plane.base_cell = 0.5;
  plane.octaves = 4;
  plane.albedo = 0.5;
  plane.contrast = 0.9;
  scene.planes.push_back(plane);
  scene.poses.push_back(Pose::identity());
  return scene;
}

SyntheticSequence::SyntheticSequence(SyntheticScene scene) : scene_(std::move(scene)) {}

StereoFrame SyntheticSequence::frame(std::size_t index) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(index);
  if (it == cache_.end()) it = cache_.emplace(index, render(scene_, index)).first;
  return it->second;
}

std::string SyntheticSequence::name() const {
  return "synthetic(seed=" + std::to_string(scene_.seed) + ")";
}

}  // namespace svo
