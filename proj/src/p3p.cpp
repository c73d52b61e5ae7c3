#include "svo/p3p.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>

namespace svo {
namespace {

using Poly = std::vector<double>;  // ascending powers

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly add(Poly a, const Poly& b, double scale = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
  return a;
}

double eval(const Poly& p, double x) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<double>(i));
  return d;
}

}  // namespace

std::vector<double> real_polynomial_roots(const std::vector<double>& coeffs) {
  Poly p = coeffs;
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  while (!p.empty() && std::abs(p.back()) <= 1e-14 * scale) p.pop_back();
  const int degree = static_cast<int>(p.size()) - 1;
  if (degree < 1) return {};
  std::vector<double> roots;
  if (degree == 1) {
    roots.push_back(-p[0] / p[1]);
    return roots;
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -p[i] / p[degree];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const Poly dp = derivative(p);
  for (int i = 0; i < degree; ++i) {
    const std::complex<double> z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-4 * std::max(1.0, std::abs(z.real()))) continue;
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
      const double d = eval(dp, x);
      if (d == 0.0) break;
      const double step = eval(p, x) / d;
      x -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    roots.push_back(x);
  }
  return roots;
}

Pose align_points(const std::vector<Point3>& src, const std::vector<Point3>& dst) {
  Eigen::Vector3d cs = Eigen::Vector3d::Zero();
  Eigen::Vector3d cd = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(src.size());
  cd /= static_cast<double>(dst.size());
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - cs) * (dst[i] - cd).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) d(2, 2) = -1.0;
  const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
  return {r, cd - r * cs};
}

// Distances s_i along the bearings satisfy the law of cosines for each side
// of the world triangle. With s2 = u s1 and s3 = v s1, u is a rational
// function of v and substituting back yields a quartic in v.
std::vector<Pose> solve_p3p(const std::array<Eigen::Vector3d, 3>& bearings,
                            const std::array<Point3, 3>& world) {
  const Eigen::Vector3d j1 = bearings[0].normalized();
  const Eigen::Vector3d j2 = bearings[1].normalized();
  const Eigen::Vector3d j3 = bearings[2].normalized();
  const double a2 = (world[1] - world[2]).squaredNorm();
  const double b2 = (world[0] - world[2]).squaredNorm();
  const double c2 = (world[0] - world[1]).squaredNorm();
  if (a2 < 1e-18 || b2 < 1e-18 || c2 < 1e-18) return {};
  if ((world[1] - world[0]).cross(world[2] - world[0]).norm() < 1e-12) return {};

  const double cos_a = j2.dot(j3);
  const double cos_b = j1.dot(j3);
  const double cos_g = j1.dot(j2);
  const double k_ac = (a2 - c2) / b2;
  const double k_c = c2 / b2;

  const Poly q = {1.0, -2.0 * cos_b, 1.0};                          // 1 + v^2 - 2 v cos_b
  const Poly n = add(mul({k_ac}, q), Poly{1.0, 0.0, -1.0});          // numerator of u
  const Poly d = {2.0 * cos_g, -2.0 * cos_a};                        // denominator of u
  // D^2 + N^2 - 2 cos_g N D - k_c q D^2 = 0
  Poly quartic = add(mul(d, d), mul(n, n));
  quartic = add(quartic, mul(n, d), -2.0 * cos_g);
  quartic = add(quartic, mul(mul(q, d), d), -k_c);

  std::vector<Pose> out;
  const double b = std::sqrt(b2);
  for (double v : real_polynomial_roots(quartic)) {
    const double den = eval(d, v);
    if (std::abs(den) < 1e-12) continue;
    const double u = eval(n, v) / den;
    const double qv = eval(q, v);
    if (!(qv > 0) || !(u > 0) || !(v > 0)) continue;
    const double s1 = b / std::sqrt(qv);
    const double s2 = u * s1;
    const double s3 = v * s1;
    if (!std::isfinite(s1) || !std::isfinite(s2) || !std::isfinite(s3)) continue;
    const std::vector<Point3> cam = {s1 * j1, s2 * j2, s3 * j3};
    const std::vector<Point3> src = {world[0], world[1], world[2]};
    out.push_back(align_points(src, cam));
  }
  return out;
}

}  // namespace svo
