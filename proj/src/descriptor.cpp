#include "svo/descriptor.hpp"

#include "svo/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>

namespace svo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kGridSamples = 16;  // gradient samples per window side
constexpr int kCells = 4;
constexpr int kOrientationBins = 8;
constexpr int kHistogramBins = 36;

// Smoothed intensities come from interpolated summed-area tables and carry
// rounding noise far below one grey level; differences under this are zero.
constexpr double kIntensityEps = 1e-6;

double intensity_diff(double a, double b) {
  const double d = a - b;
  return std::abs(d) < kIntensityEps ? 0.0 : d;
}

void require_integral(const GrayImage& img) {
  if (!img.has_integral()) {
    throw Error(ErrorCode::InvalidArgument, "descriptor requires an image with a summed-area table");
  }
}

void require_size(const Feature& f) {
  if (!(f.size > 0)) throw Error(ErrorCode::InvalidArgument, "feature size must be positive");
}

// Smoothed intensities of all pattern points at the given orientation.
std::array<double, RetinaPattern::kNumPoints> sample_pattern(const GrayImage& img, const Feature& f,
                                                             const RetinaPattern& pattern,
                                                             double angle) {
  std::array<double, RetinaPattern::kNumPoints> values{};
  const double unit = f.size * pattern.unit_scale;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (std::size_t i = 0; i < pattern.points.size(); ++i) {
    const auto& p = pattern.points[i];
    const double ox = p.radius * unit * std::cos(p.angle);
    const double oy = p.radius * unit * std::sin(p.angle);
    values[i] = img.box_mean(f.x + c * ox - s * oy, f.y + s * ox + c * oy, p.sigma * unit);
  }
  return values;
}

double orientation_from_samples(const std::array<double, RetinaPattern::kNumPoints>& values,
                                const RetinaPattern& pattern) {
  double ox = 0.0;
  double oy = 0.0;
  for (auto [a, b] : pattern.orientation_pairs) {
    const auto& pa = pattern.points[a];
    const auto& pb = pattern.points[b];
    const double dx = pa.radius * std::cos(pa.angle) - pb.radius * std::cos(pb.angle);
    const double dy = pa.radius * std::sin(pa.angle) - pb.radius * std::sin(pb.angle);
    const double norm = std::hypot(dx, dy);
    const double diff = intensity_diff(values[a], values[b]);
    ox += diff * dx / norm;
    oy += diff * dy / norm;
  }
  if (std::hypot(ox, oy) < 1e-9) return 0.0;
  return std::atan2(oy, ox);
}

// Gradient along two orthogonal image directions, by box-filtered central
// differences at step `step`.
std::pair<double, double> box_gradient(const GrayImage& img, double x, double y, double ux,
                                       double uy, double step) {
  const double vx = -uy;
  const double vy = ux;
  const double gx = intensity_diff(img.box_mean(x + step * ux, y + step * uy, step),
                                   img.box_mean(x - step * ux, y - step * uy, step)) /
                    (2.0 * step);
  const double gy = intensity_diff(img.box_mean(x + step * vx, y + step * vy, step),
                                   img.box_mean(x - step * vx, y - step * vy, step)) /
                    (2.0 * step);
  return {gx, gy};
}

double grid_spacing(const Feature& f) { return 2.0 * f.size / kGridSamples; }

}  // namespace

std::string_view to_string(DescriptorBackend backend) {
  return backend == DescriptorBackend::Retina ? "retina" : "gradhist";
}

DescriptorBackend parse_backend(std::string_view name) {
  if (name == "retina") return DescriptorBackend::Retina;
  if (name == "gradhist") return DescriptorBackend::GradHist;
  throw Error(ErrorCode::InvalidArgument, "unknown descriptor backend '" + std::string(name) + "'");
}

std::vector<Feature> normalize_scale(const std::vector<Feature>& features, const StereoRig& rig,
                                     const ScaleConfig& cfg) {
  if (!cfg.enabled) return features;
  std::vector<Feature> out = features;
  for (auto& f : out) {
    if (!f.depth) throw Error(ErrorCode::MissingDepth, "scale normalisation needs triangulated depth");
    f.size = depth_to_radius(*f.depth, rig, cfg);
  }
  return out;
}

double binary_support_radius(const Feature& f, const RetinaPattern& pattern) {
  const double unit = f.size * pattern.unit_scale;
  double r = 0.0;
  for (const auto& p : pattern.points) r = std::max(r, p.radius * unit + std::max(p.sigma * unit, 0.5));
  return r;
}

double float_support_radius(const Feature& f) {
  const double step = grid_spacing(f);
  return std::numbers::sqrt2 * f.size + 2.0 * std::max(step, 0.5);
}

bool support_inside(const GrayImage& img, const Feature& f, double radius) {
  return img.box_inside(f.x, f.y, radius);
}

double retina_orientation(const GrayImage& img, const Feature& feature, const RetinaPattern& pattern) {
  require_integral(img);
  require_size(feature);
  if (!support_inside(img, feature, binary_support_radius(feature, pattern))) {
    throw Error(ErrorCode::SupportOutOfBounds, "retina support leaves the image");
  }
  return orientation_from_samples(sample_pattern(img, feature, pattern, 0.0), pattern);
}

BinaryDescriptor describe_binary(const GrayImage& img, const Feature& feature,
                                 const RetinaPattern& pattern) {
  const double angle = retina_orientation(img, feature, pattern);
  const auto values = sample_pattern(img, feature, pattern, angle);
  BinaryDescriptor d;
  d.words.assign(BinaryDescriptor::kSectionWords, 0);
  for (std::size_t i = 0; i < pattern.pairs.size(); ++i) {
    const auto [a, b] = pattern.pairs[i];
    if (intensity_diff(values[a], values[b]) > 0.0) d.set_bit(static_cast<int>(i));
  }
  return d;
}

double gradient_orientation(const GrayImage& img, const Feature& feature) {
  require_integral(img);
  require_size(feature);
  if (!support_inside(img, feature, float_support_radius(feature))) {
    throw Error(ErrorCode::SupportOutOfBounds, "gradient support leaves the image");
  }
  const double half = feature.size;
  const double step = grid_spacing(feature);
  const double sigma = 0.75 * half;
  std::array<double, kHistogramBins> hist{};
  for (int j = 0; j < kGridSamples; ++j) {
    const double b = (j + 0.5) * step - half;
    for (int i = 0; i < kGridSamples; ++i) {
      const double a = (i + 0.5) * step - half;
      if (a * a + b * b > half * half) continue;
      const auto [gx, gy] = box_gradient(img, feature.x + a, feature.y + b, 1.0, 0.0, 0.5 * step);
      const double mag = std::hypot(gx, gy);
      if (mag <= 0.0) continue;
      const double w = std::exp(-(a * a + b * b) / (2.0 * sigma * sigma));
      double bin = std::atan2(gy, gx) / kTwoPi * kHistogramBins;
      if (bin < 0) bin += kHistogramBins;
      const int b0 = static_cast<int>(std::floor(bin)) % kHistogramBins;
      const double frac = bin - std::floor(bin);
      hist[b0] += w * mag * (1.0 - frac);
      hist[(b0 + 1) % kHistogramBins] += w * mag * frac;
    }
  }
  std::array<double, kHistogramBins> smooth{};
  for (int i = 0; i < kHistogramBins; ++i) {
    smooth[i] = 0.25 * hist[(i + kHistogramBins - 1) % kHistogramBins] + 0.5 * hist[i] +
                0.25 * hist[(i + 1) % kHistogramBins];
  }
  int peak = 0;
  for (int i = 1; i < kHistogramBins; ++i) {
    if (smooth[i] > smooth[peak]) peak = i;
  }
  if (smooth[peak] <= 1e-12) return 0.0;
  const double l = smooth[(peak + kHistogramBins - 1) % kHistogramBins];
  const double r = smooth[(peak + 1) % kHistogramBins];
  const double denom = l - 2.0 * smooth[peak] + r;
  const double offset = denom < 0 ? 0.5 * (l - r) / denom : 0.0;
  // Bin i is centred on angle i * 2pi / bins (linear binning above).
  return std::remainder((peak + offset) / kHistogramBins * kTwoPi, kTwoPi);
}

FloatDescriptor describe_float(const GrayImage& img, const Feature& feature) {
  const double angle = gradient_orientation(img, feature);
  const double half = feature.size;
  const double step = grid_spacing(feature);
  const double ux = std::cos(angle);
  const double uy = std::sin(angle);
  const double sigma = half;

  std::array<double, FloatDescriptor::kSectionSize> hist{};
  auto add = [&](int cx, int cy, int ob, double w) {
    if (cx < 0 || cx >= kCells || cy < 0 || cy >= kCells) return;
    hist[(cy * kCells + cx) * kOrientationBins + (ob % kOrientationBins)] += w;
  };
  for (int j = 0; j < kGridSamples; ++j) {
    const double b = (j + 0.5) * step - half;
    for (int i = 0; i < kGridSamples; ++i) {
      const double a = (i + 0.5) * step - half;
      const double x = feature.x + a * ux - b * uy;
      const double y = feature.y + a * uy + b * ux;
      const auto [gx, gy] = box_gradient(img, x, y, ux, uy, 0.5 * step);
      const double mag = std::hypot(gx, gy);
      if (mag <= 0.0) continue;
      const double w = mag * std::exp(-(a * a + b * b) / (2.0 * sigma * sigma));
      // Continuous cell coordinates; cell centres sit on integers.
      const double cx = (a + half) / (2.0 * half) * kCells - 0.5;
      const double cy = (b + half) / (2.0 * half) * kCells - 0.5;
      double ob = std::atan2(gy, gx) / kTwoPi * kOrientationBins;
      if (ob < 0) ob += kOrientationBins;
      const int x0 = static_cast<int>(std::floor(cx));
      const int y0 = static_cast<int>(std::floor(cy));
      const int o0 = static_cast<int>(std::floor(ob));
      const double fx = cx - x0;
      const double fy = cy - y0;
      const double fo = ob - o0;
      for (int dy = 0; dy <= 1; ++dy) {
        const double wy = dy ? fy : 1.0 - fy;
        for (int dx = 0; dx <= 1; ++dx) {
          const double wx = dx ? fx : 1.0 - fx;
          add(x0 + dx, y0 + dy, o0, w * wx * wy * (1.0 - fo));
          add(x0 + dx, y0 + dy, o0 + 1, w * wx * wy * fo);
        }
      }
    }
  }

  auto normalise = [&hist] {
    double norm = 0.0;
    for (double v : hist) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      hist.fill(0.0);
      return false;
    }
    for (double& v : hist) v /= norm;
    return true;
  };
  FloatDescriptor d;
  d.values.assign(FloatDescriptor::kSectionSize, 0.f);
  if (!normalise()) return d;
  for (double& v : hist) v = std::min(v, 0.2);
  normalise();
  for (int i = 0; i < FloatDescriptor::kSectionSize; ++i) d.values[i] = static_cast<float>(hist[i]);
  return d;
}

Descriptor describe(const GrayImage& img, const Feature& feature, DescriptorBackend backend,
                    const RetinaPattern& pattern) {
  if (backend == DescriptorBackend::Retina) return describe_binary(img, feature, pattern);
  return describe_float(img, feature);
}

Descriptor describe_stereo(const GrayImage& left, const GrayImage& right, const Feature& feat_left,
                           const Feature& feat_right, DescriptorBackend backend,
                           const RetinaPattern& pattern) {
  if (backend == DescriptorBackend::Retina) {
    BinaryDescriptor out = describe_binary(left, feat_left, pattern);
    const BinaryDescriptor r = describe_binary(right, feat_right, pattern);
    out.words.insert(out.words.end(), r.words.begin(), r.words.end());
    return out;
  }
  FloatDescriptor out = describe_float(left, feat_left);
  const FloatDescriptor r = describe_float(right, feat_right);
  out.values.insert(out.values.end(), r.values.begin(), r.values.end());
  return out;
}

bool describable(const GrayImage& img, const Feature& feature, DescriptorBackend backend,
                 const RetinaPattern& pattern) {
  if (!(feature.size > 0)) return false;
  const double radius = backend == DescriptorBackend::Retina ? binary_support_radius(feature, pattern)
                                                             : float_support_radius(feature);
  return support_inside(img, feature, radius);
}

double distance(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  if (a.words.size() != b.words.size()) {
    throw Error(ErrorCode::LengthMismatch, "binary descriptors differ in length");
  }
  int d = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) d += std::popcount(a.words[i] ^ b.words[i]);
  return d;
}

double distance(const FloatDescriptor& a, const FloatDescriptor& b) {
  if (a.values.size() != b.values.size() || a.values.size() % FloatDescriptor::kSectionSize != 0) {
    throw Error(ErrorCode::LengthMismatch, "float descriptors differ in length");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < a.values.size(); s += FloatDescriptor::kSectionSize) {
    double acc = 0.0;
    for (std::size_t i = s; i < s + FloatDescriptor::kSectionSize; ++i) {
      const double d = static_cast<double>(a.values[i]) - b.values[i];
      acc += d * d;
    }
    total += std::sqrt(acc);
  }
  return total;
}

double distance(const Descriptor& a, const Descriptor& b) {
  if (a.index() != b.index()) throw Error(ErrorCode::LengthMismatch, "descriptor kinds differ");
  return std::visit(
      [&b](const auto& lhs) { return distance(lhs, std::get<std::decay_t<decltype(lhs)>>(b)); }, a);
}

int descriptor_sections(const Descriptor& d) {
  return std::visit([](const auto& v) { return v.sections(); }, d);
}

}  // namespace svo
