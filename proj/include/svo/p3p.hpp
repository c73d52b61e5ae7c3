#pragma once

#include "svo/geometry.hpp"

#include <array>
#include <vector>

namespace svo {

// Real roots of sum_i coeffs[i] x^i, via companion-matrix eigenvalues and
// Newton polishing. Leading zero coefficients are trimmed.
std::vector<double> real_polynomial_roots(const std::vector<double>& coeffs);

// Perspective-three-point: all poses T (world -> camera) such that
// T * world[i] lies along bearings[i] (unit vectors, camera frame).
// Returns up to four candidates; empty for degenerate input.
std::vector<Pose> solve_p3p(const std::array<Eigen::Vector3d, 3>& bearings,
                            const std::array<Point3, 3>& world);

// Least-squares rigid alignment dst ~ R src + t (Kabsch).
Pose align_points(const std::vector<Point3>& src, const std::vector<Point3>& dst);

}  // namespace svo
