#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace svo {

// Row-major 8-bit luminance image. Pixel (x, y) covers the unit square
// centred on integer coordinates, i.e. [x - 0.5, x + 0.5) horizontally.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  // Writes drop any cached summed-area table.
  void set(int x, int y, std::uint8_t v);
  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> mutable_pixels();

  // Summed-area table of size (width + 1) * (height + 1).
  void build_integral();
  bool has_integral() const { return !integral_.empty(); }
  const std::vector<std::uint32_t>& integral() const { return integral_; }

  // Mean intensity of the axis-aligned box centred on (x, y) with the given
  // half side. Fractional boxes are integrated exactly by interpolating the
  // summed-area table. Requires build_integral() and a box inside the image.
  double box_mean(double x, double y, double half_side) const;
  bool box_inside(double x, double y, double half_side) const;

  double bilinear(double x, double y) const;

  bool operator==(const GrayImage& other) const {
    return width_ == other.width_ && height_ == other.height_ && pixels_ == other.pixels_;
  }

 private:
  double integral_at(double ex, double ey) const;

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
  std::vector<std::uint32_t> integral_;
};

}  // namespace svo
