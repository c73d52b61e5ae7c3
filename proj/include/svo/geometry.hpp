#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace svo {

// Camera frame convention: z forward, x right, y down.
using Point3 = Eigen::Vector3d;
using Pixel = Eigen::Vector2d;

struct PinholeIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  bool valid() const;
};

// Rectified stereo pair sharing one set of intrinsics. The right camera sits
// `baseline` meters along +x of the left camera.
struct StereoRig {
  PinholeIntrinsics intrinsics;
  double baseline = 1.0;

  bool valid() const;
  // Expected disparity of a point at depth z.
  double disparity_at(double z) const { return intrinsics.fx * baseline / z; }
};

// Depth-driven support radius. `enabled` is the scale estimation flag; when it
// is false features keep their detector size.
struct ScaleConfig {
  bool enabled = false;
  double metric_radius = 0.5;  // meters
  double r_min = 8.0;          // pixels
  double r_max = 64.0;         // pixels

  bool valid() const;
};

// Rigid transform p -> R p + t.
class Pose {
 public:
  Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static Pose identity() { return {}; }
  // Exponential map of a twist (rho, phi): translation part first.
  static Pose exp(const Eigen::Matrix<double, 6, 1>& twist);
  static Pose from_matrix34(const Eigen::Matrix<double, 3, 4>& m);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Point3 operator*(const Point3& p) const { return rotation_ * p + translation_; }
  // (a * b)(p) == a(b(p)). The rotation is re-orthonormalized after every
  // composition so long chains keep det(R) == +1.
  Pose operator*(const Pose& other) const;
  Pose inverse() const;

  Eigen::Matrix<double, 3, 4> matrix34() const;
  // Rotation angle of R in radians.
  double rotation_angle() const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

using Trajectory = std::vector<Pose>;

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r);
Eigen::Matrix3d skew(const Eigen::Vector3d& v);
// Rotation about the camera y axis (yaw for a y-down camera).
Eigen::Matrix3d rotation_y(double angle);

Pixel project(const Point3& p, const PinholeIntrinsics& k);
// Projection into the right camera of a rectified rig.
Pixel project_right(const Point3& p, const StereoRig& rig);

struct TriangulationOptions {
  double epipolar_tolerance = 2.0;  // pixels
};

Point3 triangulate(const Pixel& left_px, const Pixel& right_px, const StereoRig& rig,
                   const TriangulationOptions& options = {});

double depth_to_radius(double z, const StereoRig& rig, const ScaleConfig& cfg);

inline Point3 transform(const Pose& pose, const Point3& p) { return pose * p; }

}  // namespace svo
