#include "svo/geometry.hpp"

#include "svo/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace svo {

bool PinholeIntrinsics::valid() const {
  return fx > 0 && fy > 0 && std::isfinite(cx) && std::isfinite(cy) && std::isfinite(fx) &&
         std::isfinite(fy);
}

bool StereoRig::valid() const { return intrinsics.valid() && baseline > 0; }

bool ScaleConfig::valid() const { return r_min > 0 && r_min <= r_max && metric_radius > 0; }

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {}

Pose Pose::exp(const Eigen::Matrix<double, 6, 1>& twist) {
  const Eigen::Vector3d rho = twist.head<3>();
  const Eigen::Vector3d phi = twist.tail<3>();
  const double theta = phi.norm();
  const Eigen::Matrix3d phi_hat = skew(phi);
  Eigen::Matrix3d rot;
  Eigen::Matrix3d v;
  if (theta < 1e-10) {
    rot = Eigen::Matrix3d::Identity() + phi_hat;
    v = Eigen::Matrix3d::Identity() + 0.5 * phi_hat;
  } else {
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    const double c = (1.0 - a) / (theta * theta);
    rot = Eigen::Matrix3d::Identity() + a * phi_hat + b * phi_hat * phi_hat;
    v = Eigen::Matrix3d::Identity() + b * phi_hat + c * phi_hat * phi_hat;
  }
  return {orthonormalize(rot), v * rho};
}

Pose Pose::from_matrix34(const Eigen::Matrix<double, 3, 4>& m) {
  return {m.leftCols<3>(), m.col(3)};
}

Pose Pose::operator*(const Pose& other) const {
  return {orthonormalize(rotation_ * other.rotation_), rotation_ * other.translation_ + translation_};
}

Pose Pose::inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return {rt, -rt * translation_};
}

Eigen::Matrix<double, 3, 4> Pose::matrix34() const {
  Eigen::Matrix<double, 3, 4> m;
  m.leftCols<3>() = rotation_;
  m.col(3) = translation_;
  return m;
}

double Pose::rotation_angle() const {
  const double c = std::clamp((rotation_.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    out = u * svd.matrixV().transpose();
  }
  return out;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Eigen::Matrix3d rotation_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

Pixel project(const Point3& p, const PinholeIntrinsics& k) {
  if (!(p.z() > 0)) throw Error(ErrorCode::NonPositiveDepth, "cannot project point with z <= 0");
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

Pixel project_right(const Point3& p, const StereoRig& rig) {
  return project(Point3(p.x() - rig.baseline, p.y(), p.z()), rig.intrinsics);
}

Point3 triangulate(const Pixel& left_px, const Pixel& right_px, const StereoRig& rig,
                   const TriangulationOptions& options) {
  const double d = left_px.x() - right_px.x();
  if (!(d > 0)) throw Error(ErrorCode::NonPositiveDisparity, "disparity must be positive");
  if (std::abs(left_px.y() - right_px.y()) > options.epipolar_tolerance) {
    throw Error(ErrorCode::EpipolarViolation, "rows differ by more than the epipolar tolerance");
  }
  const auto& k = rig.intrinsics;
  const double z = k.fx * rig.baseline / d;
  return {(left_px.x() - k.cx) * z / k.fx, (left_px.y() - k.cy) * z / k.fy, z};
}

double depth_to_radius(double z, const StereoRig& rig, const ScaleConfig& cfg) {
  if (!(z > 0)) throw Error(ErrorCode::NonPositiveDepth, "depth must be positive");
  const double r = rig.intrinsics.fx * cfg.metric_radius / z;
  return std::clamp(r, cfg.r_min, cfg.r_max);
}

}  // namespace svo
