#pragma once

#include "svo/detector.hpp"
#include "svo/geometry.hpp"
#include "svo/image.hpp"
#include "svo/retina_pattern.hpp"

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace svo {

// 512 bits per section; a stereo descriptor holds two sections (left, right).
struct BinaryDescriptor {
  static constexpr int kSectionBits = 512;
  static constexpr int kSectionWords = kSectionBits / 64;

  std::vector<std::uint64_t> words;

  int bits() const { return static_cast<int>(words.size()) * 64; }
  int sections() const { return static_cast<int>(words.size()) / kSectionWords; }
  bool bit(int i) const { return (words[i / 64] >> (i % 64)) & 1u; }
  void set_bit(int i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }

  bool operator==(const BinaryDescriptor&) const = default;
};

// 128 values per section, each section L2-normalised (or all zero).
struct FloatDescriptor {
  static constexpr int kSectionSize = 128;

  std::vector<float> values;

  int sections() const { return static_cast<int>(values.size()) / kSectionSize; }

  bool operator==(const FloatDescriptor&) const = default;
};

using Descriptor = std::variant<BinaryDescriptor, FloatDescriptor>;

enum class DescriptorBackend { Retina, GradHist };

std::string_view to_string(DescriptorBackend backend);
DescriptorBackend parse_backend(std::string_view name);

// Sets each feature's size from its depth when cfg.enabled; otherwise returns
// the input unchanged.
std::vector<Feature> normalize_scale(const std::vector<Feature>& features, const StereoRig& rig,
                                     const ScaleConfig& cfg);

// Radius (pixels) of image support a descriptor reads around the feature.
double binary_support_radius(const Feature& f, const RetinaPattern& pattern);
double float_support_radius(const Feature& f);
bool support_inside(const GrayImage& img, const Feature& f, double radius);

// Retina-pattern intensity-test descriptor. Requires img.has_integral().
BinaryDescriptor describe_binary(const GrayImage& img, const Feature& feature,
                                 const RetinaPattern& pattern);
// Orientation (radians) estimated from the symmetric orientation pairs.
double retina_orientation(const GrayImage& img, const Feature& feature, const RetinaPattern& pattern);

// 4x4 cells x 8 orientation bins of gradient magnitude over a window of
// 2 * size pixels per side, rotated to the dominant gradient orientation.
// Requires img.has_integral().
FloatDescriptor describe_float(const GrayImage& img, const Feature& feature);
double gradient_orientation(const GrayImage& img, const Feature& feature);

// Describe with either backend. The stereo form concatenates the left-view
// and right-view descriptors, always in that order.
Descriptor describe(const GrayImage& img, const Feature& feature, DescriptorBackend backend,
                    const RetinaPattern& pattern);
Descriptor describe_stereo(const GrayImage& left, const GrayImage& right, const Feature& feat_left,
                           const Feature& feat_right, DescriptorBackend backend,
                           const RetinaPattern& pattern);
bool describable(const GrayImage& img, const Feature& feature, DescriptorBackend backend,
                 const RetinaPattern& pattern);

// Hamming distance for binary, summed per-section L2 for float descriptors.
double distance(const BinaryDescriptor& a, const BinaryDescriptor& b);
double distance(const FloatDescriptor& a, const FloatDescriptor& b);
double distance(const Descriptor& a, const Descriptor& b);

int descriptor_sections(const Descriptor& d);

}  // namespace svo
