#include "svo/error.hpp"
#include "svo/odometry.hpp"
#include "svo/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace svo;

namespace {

// Intensity-weighted centroid of pixels brighter than the background.
Pixel bright_centroid(const GrayImage& img, int background) {
  double sx = 0, sy = 0, sw = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double w = img.at(x, y) - background;
      if (w <= 0) continue;
      sx += w * x;
      sy += w * y;
      sw += w;
    }
  }
  return {sx / sw, sy / sw};
}

}  // namespace

TEST(Render, OnAxisPointShiftsByDisparity) {
  SyntheticScene scene;
  scene.width = 641;
  scene.height = 361;
  scene.rig.intrinsics = {700.0, 700.0, 320.0, 180.0};
  scene.rig.baseline = 0.5;
  scene.sky = 0.0;
  scene.supersample = 4;
  scene.blobs.push_back({Point3(0, 0, 10), 0.05, 1.0});
  scene.poses.push_back(Pose::identity());
  const auto f = render(scene, 0);
  const Pixel l = bright_centroid(f.left, 0);
  const Pixel r = bright_centroid(f.right, 0);
  EXPECT_NEAR(l.x(), 320.0, 0.05);
  EXPECT_NEAR(l.y(), 180.0, 0.05);
  EXPECT_NEAR(l.x() - r.x(), 35.0, 0.05);
  EXPECT_NEAR(r.y(), 180.0, 0.05);
}

TEST(Render, Deterministic) {
  CorridorOptions o;
  o.frames = 2;
  o.noise_sigma = 2.0;
  const auto scene = make_corridor_scene(o);
  const auto a = render(scene, 1);
  const auto b = render(scene, 1);
  EXPECT_EQ(a.left, b.left);
  EXPECT_EQ(a.right, b.right);
}

TEST(Render, NoiseStreamsDifferPerFrame) {
  CorridorOptions o;
  o.frames = 2;
  o.noise_sigma = 2.0;
  o.static_camera = true;
  const auto scene = make_corridor_scene(o);
  EXPECT_NE(render(scene, 0).left, render(scene, 1).left);
}

TEST(Render, PoseIndexOutOfRange) {
  const auto scene = make_plane_scene(1, 10.0, 64, 48, 100.0, 0.5);
  try {
    render(scene, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(Render, MeasuredDisparitiesMatchAnalytic) {
  for (double z : {6.0, 12.0}) {
    const auto scene = make_plane_scene(3, z, 640, 360, 500.0, 0.54);
    const auto f = render(scene, 0);
    const auto corr = extract_stereo_features(f.left, f.right, scene.rig, PipelineConfig{});
    ASSERT_GT(corr.size(), 100u);
    const double expected = 500.0 * 0.54 / z;
    double worst = 0.0;
    for (const auto& c : corr) worst = std::max(worst, std::abs(c.disparity - expected));
    EXPECT_LT(worst, 0.5) << "depth " << z;
  }
}

TEST(Render, DepthAtMatchesPlaneGeometry) {
  const auto scene = make_plane_scene(3, 7.5, 640, 360, 500.0, 0.54);
  for (double u : {0.0, 100.5, 639.0}) {
    const auto d = depth_at(scene, 0, u, 200.0);
    ASSERT_TRUE(d.has_value());
    EXPECT_NEAR(*d, 7.5, 1e-9);
  }
}

TEST(Render, GroundTruthProjectionOfPlanePoint) {
  const auto scene = make_plane_scene(3, 10.0, 640, 360, 500.0, 0.54);
  const auto g = project_ground_truth(scene, 0, Point3(1.0, -0.5, 10.0));
  ASSERT_TRUE(g.visible);
  EXPECT_NEAR(g.left.x(), 319.5 + 50.0, 1e-9);
  EXPECT_NEAR(g.left.y(), 179.5 - 25.0, 1e-9);
  EXPECT_NEAR(g.left.x() - g.right.x(), 27.0, 1e-9);
  EXPECT_NEAR(g.depth, 10.0, 1e-12);
  // Behind the plane: occluded.
  EXPECT_FALSE(project_ground_truth(scene, 0, Point3(0, 0, 20.0)).visible);
}

TEST(Scene, SerializationRoundTrip) {
  CorridorOptions o;
  o.frames = 5;
  o.lateral_sway = 0.3;
  o.yaw_sway = 0.02;
  const auto scene = make_corridor_scene(o);
  const auto text = serialize_scene(scene);
  const auto back = parse_scene(text);
  EXPECT_TRUE(back == scene);
  EXPECT_EQ(serialize_scene(back), text);
}

TEST(Scene, SameSeedSameScene) {
  CorridorOptions o;
  o.frames = 3;
  EXPECT_EQ(serialize_scene(make_corridor_scene(o)), serialize_scene(make_corridor_scene(o)));
  CorridorOptions other = o;
  other.seed = 8;
  EXPECT_NE(serialize_scene(make_corridor_scene(o)), serialize_scene(make_corridor_scene(other)));
}

TEST(Scene, MalformedTextRejected) {
  EXPECT_THROW(parse_scene("not a scene"), Error);
}

TEST(Scene, TextureWithinUnitRange) {
  TexturedPlane p;
  p.contrast = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const double v = texture_value(p, 0.37 * i, 0.11 * i);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Scene, CorridorMovesForward) {
  CorridorOptions o;
  o.frames = 4;
  const auto scene = make_corridor_scene(o);
  ASSERT_EQ(scene.poses.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(scene.poses[i].translation().z(), i * o.speed, 1e-12);
}
