#pragma once

#include "svo/image.hpp"

#include <optional>
#include <vector>

namespace svo {

struct Feature {
  double x = 0.0;
  double y = 0.0;
  double response = 0.0;
  double size = 7.0;  // support radius in pixels
  std::optional<double> depth;  // meters, set after triangulation

  bool operator==(const Feature&) const = default;
};

struct DetectorConfig {
  int border = 8;
  double nms_radius = 4.0;
  int max_features = 1350;
  double response_min = 0.0;
  double default_size = 7.0;
  double harris_k = 0.04;
  double window_sigma = 1.0;
};

// Harris corners: 3x3 Sobel gradients, Gaussian-weighted structure tensor,
// greedy non-maximum suppression and sub-pixel refinement by per-axis
// parabola fits. Output is sorted by descending response, ties broken by
// row-major pixel position.
std::vector<Feature> detect(const GrayImage& img, const DetectorConfig& cfg);

// Dense Harris response map (row-major, same size as the image).
std::vector<float> harris_response(const GrayImage& img, const DetectorConfig& cfg);

std::vector<Feature> threshold_features(const std::vector<Feature>& features, double response_min);

}  // namespace svo
