#include "svo/detector.hpp"

#include "svo/error.hpp"

#include <algorithm>
#include <cmath>

namespace svo {
namespace {

std::vector<float> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    k[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

// Separable blur with clamped borders.
void blur(std::vector<float>& data, int w, int h, const std::vector<float>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  std::vector<float> tmp(data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.f;
      for (int i = -r; i <= r; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + r] * data[y * w + xx];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.f;
      for (int i = -r; i <= r; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + r] * tmp[yy * w + x];
      }
      data[y * w + x] = acc;
    }
  }
}

double parabola_offset(double left, double centre, double right) {
  const double denom = left - 2.0 * centre + right;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

std::vector<float> harris_response(const GrayImage& img, const DetectorConfig& cfg) {
  const int w = img.width();
  const int h = img.height();
  std::vector<float> ixx(static_cast<std::size_t>(w) * h, 0.f);
  std::vector<float> iyy(ixx.size(), 0.f);
  std::vector<float> ixy(ixx.size(), 0.f);
  auto px = [&](int x, int y) {
    return static_cast<float>(img.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float gx = (px(x + 1, y - 1) + 2.f * px(x + 1, y) + px(x + 1, y + 1)) -
                       (px(x - 1, y - 1) + 2.f * px(x - 1, y) + px(x - 1, y + 1));
      const float gy = (px(x - 1, y + 1) + 2.f * px(x, y + 1) + px(x + 1, y + 1)) -
                       (px(x - 1, y - 1) + 2.f * px(x, y - 1) + px(x + 1, y - 1));
      // Sobel gain is 8; normalise so responses are in intensity units.
      const float nx = gx / 8.f;
      const float ny = gy / 8.f;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ixx[i] = nx * nx;
      iyy[i] = ny * ny;
      ixy[i] = nx * ny;
    }
  }
  const auto kernel = gaussian_kernel(cfg.window_sigma);
  blur(ixx, w, h, kernel);
  blur(iyy, w, h, kernel);
  blur(ixy, w, h, kernel);
  std::vector<float> response(ixx.size());
  const float k = static_cast<float>(cfg.harris_k);
  for (std::size_t i = 0; i < response.size(); ++i) {
    const float det = ixx[i] * iyy[i] - ixy[i] * ixy[i];
    const float tr = ixx[i] + iyy[i];
    response[i] = det - k * tr * tr;
  }
  return response;
}

std::vector<Feature> detect(const GrayImage& img, const DetectorConfig& cfg) {
  const int w = img.width();
  const int h = img.height();
  const int border = std::max(cfg.border, 1);
  if (w < 2 * border + 1 || h < 2 * border + 1) {
    throw Error(ErrorCode::ImageTooSmall, "image smaller than twice the detector border");
  }
  const auto response = harris_response(img, cfg);
  auto r = [&](int x, int y) { return response[static_cast<std::size_t>(y) * w + x]; };

  struct Candidate {
    float score;
    int x;
    int y;
  };
  std::vector<Candidate> candidates;
  const float floor = static_cast<float>(std::max(cfg.response_min, 0.0));
  for (int y = border; y < h - border; ++y) {
    for (int x = border; x < w - border; ++x) {
      const float v = r(x, y);
      if (!(v > 0.f) || v < floor) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx || dy) && r(x + dx, y + dy) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) candidates.push_back({v, x, y});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  // Greedy suppression over a bucket grid of accepted positions.
  const double radius = std::max(cfg.nms_radius, 0.0);
  const double cell = std::max(radius, 1.0);
  const int gw = static_cast<int>(std::ceil(w / cell)) + 1;
  const int gh = static_cast<int>(std::ceil(h / cell)) + 1;
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(gw) * gh);

  std::vector<Feature> out;
  const std::size_t cap = cfg.max_features > 0 ? static_cast<std::size_t>(cfg.max_features) : 0;
  for (const auto& c : candidates) {
    if (out.size() >= cap) break;
    Feature f;
    f.x = c.x + parabola_offset(r(c.x - 1, c.y), c.score, r(c.x + 1, c.y));
    f.y = c.y + parabola_offset(r(c.x, c.y - 1), c.score, r(c.x, c.y + 1));
    f.response = c.score;
    f.size = cfg.default_size;

    const int gx = static_cast<int>(f.x / cell);
    const int gy = static_cast<int>(f.y / cell);
    bool suppressed = false;
    for (int yy = std::max(gy - 1, 0); yy <= std::min(gy + 1, gh - 1) && !suppressed; ++yy) {
      for (int xx = std::max(gx - 1, 0); xx <= std::min(gx + 1, gw - 1); ++xx) {
        for (int idx : grid[static_cast<std::size_t>(yy) * gw + xx]) {
          const double dx = out[idx].x - f.x;
          const double dy = out[idx].y - f.y;
          if (dx * dx + dy * dy <= radius * radius) {
            suppressed = true;
            break;
          }
        }
        if (suppressed) break;
      }
    }
    if (suppressed) continue;
    grid[static_cast<std::size_t>(gy) * gw + gx].push_back(static_cast<int>(out.size()));
    out.push_back(f);
  }
  return out;
}

std::vector<Feature> threshold_features(const std::vector<Feature>& features, double response_min) {
  std::vector<Feature> out;
  for (const auto& f : features) {
    if (f.response >= response_min) out.push_back(f);
  }
  return out;
}

}  // namespace svo
