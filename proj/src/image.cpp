#include "svo/image.hpp"

#include "svo/error.hpp"

#include <algorithm>
#include <cmath>

namespace svo {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill) {
  if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "pixel count does not match image size");
  }
}

void GrayImage::set(int x, int y, std::uint8_t v) {
  integral_.clear();
  pixels_[static_cast<std::size_t>(y) * width_ + x] = v;
}

std::span<std::uint8_t> GrayImage::mutable_pixels() {
  integral_.clear();
  return pixels_;
}

void GrayImage::build_integral() {
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  integral_.assign(stride * (static_cast<std::size_t>(height_) + 1), 0);
  for (int y = 0; y < height_; ++y) {
    std::uint32_t row = 0;
    for (int x = 0; x < width_; ++x) {
      row += at(x, y);
      integral_[(y + 1) * stride + x + 1] = integral_[y * stride + x + 1] + row;
    }
  }
}

// ex, ey are edge coordinates: ex = 0 is the left border of column 0.
double GrayImage::integral_at(double ex, double ey) const {
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  const int x0 = std::clamp(static_cast<int>(std::floor(ex)), 0, width_ - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(ey)), 0, height_ - 1);
  const double fx = ex - x0;
  const double fy = ey - y0;
  const double i00 = integral_[y0 * stride + x0];
  const double i10 = integral_[y0 * stride + x0 + 1];
  const double i01 = integral_[(y0 + 1) * stride + x0];
  const double i11 = integral_[(y0 + 1) * stride + x0 + 1];
  return i00 * (1 - fx) * (1 - fy) + i10 * fx * (1 - fy) + i01 * (1 - fx) * fy + i11 * fx * fy;
}

bool GrayImage::box_inside(double x, double y, double half_side) const {
  return x - half_side >= -0.5 && y - half_side >= -0.5 && x + half_side <= width_ - 0.5 &&
         y + half_side <= height_ - 0.5;
}

double GrayImage::box_mean(double x, double y, double half_side) const {
  const double h = std::max(half_side, 0.5);
  const double ex0 = x + 0.5 - h;
  const double ex1 = x + 0.5 + h;
  const double ey0 = y + 0.5 - h;
  const double ey1 = y + 0.5 + h;
  const double sum = integral_at(ex1, ey1) - integral_at(ex0, ey1) - integral_at(ex1, ey0) +
                     integral_at(ex0, ey0);
  return sum / ((ex1 - ex0) * (ey1 - ey0));
}

double GrayImage::bilinear(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const int x0 = std::min(static_cast<int>(x), width_ - 2 < 0 ? 0 : width_ - 2);
  const int y0 = std::min(static_cast<int>(y), height_ - 2 < 0 ? 0 : height_ - 2);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return at(x0, y0) * (1 - fx) * (1 - fy) + at(x1, y0) * fx * (1 - fy) +
         at(x0, y1) * (1 - fx) * fy + at(x1, y1) * fx * fy;
}

}  // namespace svo
