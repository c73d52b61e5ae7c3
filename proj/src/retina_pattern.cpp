#include "svo/retina_pattern.hpp"

#include "svo/error.hpp"
#include "svo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace svo {

double RetinaPattern::support_factor() const {
  double f = 0.0;
  for (const auto& p : points) f = std::max(f, (p.radius + p.sigma) * unit_scale);
  return f;
}

RetinaPattern make_retina_pattern(const RetinaPatternConfig& cfg) {
  if (cfg.rings * cfg.points_per_ring + 1 != RetinaPattern::kNumPoints ||
      cfg.num_pairs != RetinaPattern::kNumPairs) {
    throw Error(ErrorCode::InvalidArgument, "retina pattern must have 43 points and 512 pairs");
  }
  RetinaPattern pattern;
  pattern.unit_scale = cfg.unit_scale;

  // Rings ordered outermost first; radii geometrically spaced.
  const double ratio = std::pow(cfg.outer_radius / cfg.inner_radius, 1.0 / (cfg.rings - 1));
  for (int ring = 0; ring < cfg.rings; ++ring) {
    const double radius = cfg.outer_radius / std::pow(ratio, ring);
    const double offset = (ring % 2) ? std::numbers::pi / cfg.points_per_ring : 0.0;
    for (int k = 0; k < cfg.points_per_ring; ++k) {
      RetinaPoint p;
      p.angle = offset + 2.0 * std::numbers::pi * k / cfg.points_per_ring;
      p.radius = radius;
      p.sigma = cfg.sigma_ratio * radius;
      p.ring = ring;
      pattern.points.push_back(p);
    }
  }
  RetinaPoint centre;
  centre.sigma = 0.5 * cfg.sigma_ratio * cfg.inner_radius;
  pattern.points.push_back(centre);

  // Candidate pairs ranked coarse to fine by the finer of the two points,
  // shuffled within a tier by a seeded key.
  struct Candidate {
    int coarse_rank;
    std::uint64_t key;
    int a;
    int b;
  };
  auto rank_of = [&](int i) {
    const int ring = pattern.points[i].ring;
    return ring < 0 ? cfg.rings : ring;
  };
  std::vector<Candidate> candidates;
  const int n = static_cast<int>(pattern.points.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const std::uint64_t key = derive_seed(cfg.seed, "retina-pairs", static_cast<std::uint64_t>(a) * n + b);
      candidates.push_back({std::max(rank_of(a), rank_of(b)), key, a, b});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
    if (l.coarse_rank != r.coarse_rank) return l.coarse_rank < r.coarse_rank;
    if (l.key != r.key) return l.key < r.key;
    return std::pair(l.a, l.b) < std::pair(r.a, r.b);
  });
  for (int i = 0; i < cfg.num_pairs; ++i) {
    const auto& c = candidates[i];
    // Alternate the operand order so bits are not biased by ring index.
    if (c.key & 1) {
      pattern.pairs.emplace_back(c.b, c.a);
    } else {
      pattern.pairs.emplace_back(c.a, c.b);
    }
  }

  // Orientation pairs: diametrically opposite points on every ring, plus
  // points two apart on the four outer rings.
  const int m = cfg.points_per_ring;
  for (int ring = 0; ring < cfg.rings; ++ring) {
    for (int k = 0; k < m / 2; ++k) {
      pattern.orientation_pairs.emplace_back(ring * m + k, ring * m + k + m / 2);
    }
  }
  for (int ring = 0; ring < 4; ++ring) {
    for (int k = 0; k < m; ++k) {
      pattern.orientation_pairs.emplace_back(ring * m + k, ring * m + (k + 2) % m);
    }
  }
  return pattern;
}

std::string serialize_pattern(const RetinaPattern& pattern) {
  std::ostringstream out;
  char buf[128];
  out << "svo-retina-pattern " << RetinaPattern::kVersion << "\n";
  std::snprintf(buf, sizeof(buf), "unit_scale %.17g\n", pattern.unit_scale);
  out << buf;
  out << "points " << pattern.points.size() << "\n";
  for (const auto& p : pattern.points) {
    std::snprintf(buf, sizeof(buf), "POINT %d %.17g %.17g %.17g\n", p.ring, p.angle, p.radius, p.sigma);
    out << buf;
  }
  out << "pairs " << pattern.pairs.size() << "\n";
  for (const auto& [a, b] : pattern.pairs) out << "PAIR " << a << ' ' << b << "\n";
  out << "orientation_pairs " << pattern.orientation_pairs.size() << "\n";
  for (const auto& [a, b] : pattern.orientation_pairs) out << "ORIENT " << a << ' ' << b << "\n";
  return out.str();
}

RetinaPattern parse_pattern(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& what) {
    return Error(ErrorCode::ConfigError, "malformed retina pattern: " + what);
  };
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "svo-retina-pattern") throw fail("missing header");
  if (version != RetinaPattern::kVersion) throw fail("unsupported version " + std::to_string(version));

  RetinaPattern pattern;
  std::size_t count = 0;
  if (!(in >> tag >> pattern.unit_scale) || tag != "unit_scale") throw fail("unit_scale");
  if (!(in >> tag >> count) || tag != "points") throw fail("points header");
  for (std::size_t i = 0; i < count; ++i) {
    RetinaPoint p;
    if (!(in >> tag >> p.ring >> p.angle >> p.radius >> p.sigma) || tag != "POINT") throw fail("point");
    pattern.points.push_back(p);
  }
  auto read_pairs = [&](const char* header, const char* record, auto& dst) {
    if (!(in >> tag >> count) || tag != header) throw fail(header);
    for (std::size_t i = 0; i < count; ++i) {
      int a = 0;
      int b = 0;
      if (!(in >> tag >> a >> b) || tag != record) throw fail(record);
      if (a < 0 || b < 0 || a >= static_cast<int>(pattern.points.size()) ||
          b >= static_cast<int>(pattern.points.size()) || a == b) {
        throw fail("pair index out of range");
      }
      dst.emplace_back(a, b);
    }
  };
  read_pairs("pairs", "PAIR", pattern.pairs);
  read_pairs("orientation_pairs", "ORIENT", pattern.orientation_pairs);

  if (pattern.points.size() != RetinaPattern::kNumPoints ||
      pattern.pairs.size() != RetinaPattern::kNumPairs ||
      pattern.orientation_pairs.size() != RetinaPattern::kNumOrientationPairs) {
    throw fail("unexpected table sizes");
  }
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : pattern.pairs) {
    if (!seen.insert(std::minmax(a, b)).second) throw fail("duplicate pair");
  }
  return pattern;
}

RetinaPattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open pattern file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pattern(ss.str());
}

}  // namespace svo
