#include "svo/matching.hpp"

#include "svo/error.hpp"
#include "svo/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace svo {
namespace {

struct Patch {
  std::vector<double> values;  // zero-mean
  double norm = 0.0;
};

std::optional<Patch> extract_patch(const GrayImage& img, int cx, int cy, int h) {
  if (cx - h < 0 || cy - h < 0 || cx + h >= img.width() || cy + h >= img.height()) return std::nullopt;
  Patch p;
  p.values.reserve((2 * h + 1) * (2 * h + 1));
  double sum = 0.0;
  for (int y = cy - h; y <= cy + h; ++y) {
    for (int x = cx - h; x <= cx + h; ++x) {
      p.values.push_back(img.at(x, y));
      sum += img.at(x, y);
    }
  }
  const double mean = sum / p.values.size();
  double ss = 0.0;
  for (double& v : p.values) {
    v -= mean;
    ss += v * v;
  }
  p.norm = std::sqrt(ss);
  return p;
}

// ZNCC of the zero-mean template against the window centred on (cx, cy).
double zncc(const Patch& tpl, const GrayImage& img, int cx, int cy, int h) {
  double sum = 0.0;
  double sum_sq = 0.0;
  double cross = 0.0;
  std::size_t i = 0;
  for (int y = cy - h; y <= cy + h; ++y) {
    for (int x = cx - h; x <= cx + h; ++x, ++i) {
      const double v = img.at(x, y);
      sum += v;
      sum_sq += v * v;
      cross += tpl.values[i] * v;
    }
  }
  const double n = static_cast<double>(tpl.values.size());
  const double var = sum_sq - sum * sum / n;
  if (var <= 1e-9) return -1.0;
  // sum(tpl) == 0, so the window mean drops out of the cross term.
  return cross / (tpl.norm * std::sqrt(var));
}

double parabola_offset(double l, double c, double r) {
  const double denom = l - 2.0 * c + r;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

}  // namespace

std::optional<EpipolarHit> epipolar_search(const GrayImage& src, const GrayImage& dst, double x,
                                           double y, double d_min, double d_max,
                                           const StereoTrackConfig& cfg) {
  const int h = cfg.half_window;
  const int cx = static_cast<int>(std::lround(x));
  const int cy = static_cast<int>(std::lround(y));
  const auto tpl = extract_patch(src, cx, cy, h);
  if (!tpl || tpl->norm < 1e-6) return std::nullopt;

  const int dlo = static_cast<int>(std::ceil(d_min));
  const int dhi = static_cast<int>(std::floor(d_max));
  if (dhi < dlo) return std::nullopt;
  const int rows = 2 * cfg.epipolar_search + 1;
  const int cols = dhi - dlo + 1;
  constexpr double kInvalid = -2.0;
  std::vector<double> scores(static_cast<std::size_t>(rows) * cols, kInvalid);
  double best = kInvalid;
  int best_r = -1;
  int best_c = -1;
  for (int r = 0; r < rows; ++r) {
    const int yy = cy + r - cfg.epipolar_search;
    if (yy - h < 0 || yy + h >= dst.height()) continue;
    for (int c = 0; c < cols; ++c) {
      const int xx = cx - (dlo + c);
      if (xx - h < 0 || xx + h >= dst.width()) continue;
      const double s = zncc(*tpl, dst, xx, yy, h);
      scores[static_cast<std::size_t>(r) * cols + c] = s;
      // Exact ties keep the first candidate in scan order.
      if (s > best) {
        best = s;
        best_r = r;
        best_c = c;
      }
    }
  }
  auto at = [&](int r, int c) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) return kInvalid;
    return scores[static_cast<std::size_t>(r) * cols + c];
  };
  // Along slanted edges a neighbouring row can score almost as well as the
  // true one; on a rectified rig the feature's own row wins such near ties.
  const int centre = cfg.epipolar_search;
  if (best_r != centre) {
    int centre_c = -1;
    for (int c = 0; c < cols; ++c) {
      if (at(centre, c) > kInvalid && (centre_c < 0 || at(centre, c) > at(centre, centre_c))) centre_c = c;
    }
    if (centre_c >= 0 && best - at(centre, centre_c) < cfg.off_row_margin) {
      best = at(centre, centre_c);
      best_r = centre;
      best_c = centre_c;
    }
  }
  if (best_r < 0 || best < cfg.zncc_min) return std::nullopt;

  // A best score on the edge of the searchable range is not a verified peak.
  if (at(best_r, best_c - 1) <= kInvalid || at(best_r, best_c + 1) <= kInvalid) return std::nullopt;
  const double dd = parabola_offset(at(best_r, best_c - 1), best, at(best_r, best_c + 1));
  double dy = 0.0;
  if (at(best_r - 1, best_c) > kInvalid && at(best_r + 1, best_c) > kInvalid) {
    dy = parabola_offset(at(best_r - 1, best_c), best, at(best_r + 1, best_c));
  }
  const double disparity = dlo + best_c + dd;
  EpipolarHit hit;
  hit.x = x - disparity;
  hit.y = y + (best_r - cfg.epipolar_search) + dy;
  hit.score = best;
  return hit;
}

std::vector<std::optional<EpipolarHit>> track_epipolar(const GrayImage& src, const GrayImage& dst,
                                                       const std::vector<Feature>& features,
                                                       double d_min, double d_max,
                                                       const StereoTrackConfig& cfg) {
  std::vector<std::optional<EpipolarHit>> out(features.size());
  parallel_for(features.size(), cfg.threads, [&](std::size_t i) {
    const auto& f = features[i];
    auto hit = epipolar_search(src, dst, f.x, f.y, d_min, d_max, cfg);
    if (!hit) return;
    const auto back = epipolar_search(dst, src, hit->x, hit->y, -d_max, -d_min, cfg);
    if (!back || std::abs(back->x - f.x) > cfg.lr_tolerance ||
        std::abs(back->y - f.y) > cfg.lr_tolerance) {
      return;
    }
    out[i] = hit;
  });
  return out;
}

std::vector<StereoCorrespondence> stereo_track(const GrayImage& left, const GrayImage& right,
                                               const std::vector<Feature>& features,
                                               const StereoRig& rig, const StereoTrackConfig& cfg) {
  const double d_min = std::max(cfg.d_min, 1e-3);
  const auto hits = track_epipolar(left, right, features, d_min, cfg.d_max, cfg);
  std::vector<StereoCorrespondence> out;
  TriangulationOptions tri;
  tri.epipolar_tolerance = cfg.epipolar_tolerance;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!hits[i]) continue;
    const Pixel lp(features[i].x, features[i].y);
    const Pixel rp(hits[i]->x, hits[i]->y);
    if (!(lp.x() - rp.x() > 0) || std::abs(lp.y() - rp.y()) > cfg.epipolar_tolerance) continue;
    const Point3 p = triangulate(lp, rp, rig, tri);
    StereoCorrespondence c;
    c.left_feature = features[i];
    c.left_feature.depth = p.z();
    c.right_feature = c.left_feature;
    c.right_feature.x = rp.x();
    c.right_feature.y = rp.y();
    c.disparity = lp.x() - rp.x();
    c.depth = p.z();
    out.push_back(c);
  }
  return out;
}

namespace {

struct FlatDescriptors {
  bool binary = true;
  std::size_t stride = 0;
  int sections = 0;
  std::vector<std::uint64_t> words;
  std::vector<float> values;
};

FlatDescriptors flatten(const std::vector<Descriptor>& list, std::optional<FlatDescriptors> like) {
  FlatDescriptors flat;
  if (like) {
    flat.binary = like->binary;
    flat.stride = like->stride;
    flat.sections = like->sections;
  } else if (!list.empty()) {
    flat.binary = std::holds_alternative<BinaryDescriptor>(list.front());
    flat.stride = flat.binary ? std::get<BinaryDescriptor>(list.front()).words.size()
                              : std::get<FloatDescriptor>(list.front()).values.size();
    flat.sections = descriptor_sections(list.front());
  }
  for (const auto& d : list) {
    if (flat.binary) {
      const auto* b = std::get_if<BinaryDescriptor>(&d);
      if (!b || b->words.size() != flat.stride) throw Error(ErrorCode::LengthMismatch, "mixed descriptors");
      flat.words.insert(flat.words.end(), b->words.begin(), b->words.end());
    } else {
      const auto* f = std::get_if<FloatDescriptor>(&d);
      if (!f || f->values.size() != flat.stride) throw Error(ErrorCode::LengthMismatch, "mixed descriptors");
      flat.values.insert(flat.values.end(), f->values.begin(), f->values.end());
    }
  }
  return flat;
}

}  // namespace

std::vector<Match> match_descriptors(const std::vector<Descriptor>& query,
                                     const std::vector<Descriptor>& train, const MatchConfig& cfg) {
  if (query.empty() || train.empty()) {
    // Still validate kinds so mismatched inputs fail consistently.
    if (!query.empty()) flatten(query, std::nullopt);
    if (!train.empty()) flatten(train, std::nullopt);
    return {};
  }
  const FlatDescriptors q = flatten(query, std::nullopt);
  const FlatDescriptors t = flatten(train, q);
  const std::size_t nq = query.size();
  const std::size_t nt = train.size();

  // With the section check a pair is unmatchable when any single section
  // exceeds the per-section threshold.
  const bool section_check = cfg.section_check && q.sections > 1;
  constexpr float kVetoed = std::numeric_limits<float>::infinity();
  std::vector<float> dist(nq * nt);
  parallel_for(nq, cfg.threads, [&](std::size_t i) {
    float* row = dist.data() + i * nt;
    if (q.binary) {
      const std::uint64_t* a = q.words.data() + i * q.stride;
      constexpr std::size_t kWords = BinaryDescriptor::kSectionWords;
      for (std::size_t j = 0; j < nt; ++j) {
        const std::uint64_t* b = t.words.data() + j * t.stride;
        int d = 0;
        bool vetoed = false;
        for (std::size_t s = 0; s < q.stride; s += kWords) {
          int ds = 0;
          for (std::size_t w = s; w < s + kWords && w < q.stride; ++w) ds += std::popcount(a[w] ^ b[w]);
          vetoed = vetoed || (section_check && ds > cfg.binary_abs_threshold);
          d += ds;
        }
        row[j] = vetoed ? kVetoed : static_cast<float>(d);
      }
    } else {
      const float* a = q.values.data() + i * q.stride;
      for (std::size_t j = 0; j < nt; ++j) {
        const float* b = t.values.data() + j * t.stride;
        double total = 0.0;
        bool vetoed = false;
        for (std::size_t s = 0; s < q.stride; s += FloatDescriptor::kSectionSize) {
          float acc = 0.f;
          for (std::size_t k = s; k < s + FloatDescriptor::kSectionSize; ++k) {
            const float d = a[k] - b[k];
            acc += d * d;
          }
          const double ds = std::sqrt(static_cast<double>(acc));
          vetoed = vetoed || (section_check && ds > cfg.float_abs_threshold);
          total += ds;
        }
        row[j] = vetoed ? kVetoed : static_cast<float>(total);
      }
    }
  });

  std::vector<int> best_query_for_train(nt, -1);
  if (cfg.mutual) {
    std::vector<float> best(nt, std::numeric_limits<float>::infinity());
    for (std::size_t i = 0; i < nq; ++i) {
      const float* row = dist.data() + i * nt;
      for (std::size_t j = 0; j < nt; ++j) {
        if (row[j] < best[j]) {
          best[j] = row[j];
          best_query_for_train[j] = static_cast<int>(i);
        }
      }
    }
  }

  const double abs_threshold =
      (q.binary ? cfg.binary_abs_threshold : cfg.float_abs_threshold) * std::max(q.sections, 1);
  const double ratio = q.binary ? cfg.binary_ratio : cfg.float_ratio;
  std::vector<Match> out;
  std::vector<char> used(nt, 0);
  for (std::size_t i = 0; i < nq; ++i) {
    const float* row = dist.data() + i * nt;
    int best_j = -1;
    float best = std::numeric_limits<float>::infinity();
    float second = std::numeric_limits<float>::infinity();
    for (std::size_t j = 0; j < nt; ++j) {
      if (row[j] < best) {
        second = best;
        best = row[j];
        best_j = static_cast<int>(j);
      } else if (row[j] < second) {
        second = row[j];
      }
    }
    if (best_j < 0 || best > abs_threshold) continue;
    if (std::isfinite(second) && best > ratio * second) continue;
    if (cfg.mutual && best_query_for_train[best_j] != static_cast<int>(i)) continue;
    if (used[best_j]) continue;
    used[best_j] = 1;
    out.push_back({static_cast<int>(i), best_j, best});
  }
  return out;
}

void write_matches_csv(std::ostream& out, const std::vector<Match>& matches) {
  out << "query_idx,train_idx,dist\n";
  for (const auto& m : matches) out << m.query_index << ',' << m.train_index << ',' << m.dist << '\n';
}

}  // namespace svo
