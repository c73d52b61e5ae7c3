#include "svo/detector.hpp"
#include "svo/error.hpp"
#include "svo/matching.hpp"
#include "svo/rng.hpp"
#include "svo/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace svo;

namespace {

GrayImage random_blocks(int w, int h, std::uint64_t seed, int cell = 3) {
  Rng rng(seed);
  const int cw = w / cell + 2;
  const int ch = h / cell + 2;
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(cw * ch));
  for (auto& c : cells) c = static_cast<std::uint8_t>(uniform_index(rng, 256));
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.set(x, y, cells[(y / cell) * cw + x / cell]);
  }
  return img;
}

GrayImage shift_left(const GrayImage& src, int dx) {
  GrayImage out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) out.set(x, y, src.at(std::min(x + dx, src.width() - 1), y));
  }
  return out;
}

BinaryDescriptor random_binary(Rng& rng) {
  BinaryDescriptor d{std::vector<std::uint64_t>(8)};
  for (auto& w : d.words) w = rng();
  return d;
}

const SyntheticScene& corridor() {
  static const SyntheticScene scene = [] {
    CorridorOptions o;
    o.frames = 2;
    return make_corridor_scene(o);
  }();
  return scene;
}

}  // namespace

TEST(StereoTrack, HorizontalShiftOracle) {
  const auto left = random_blocks(240, 120, 1);
  const auto right = shift_left(left, 8);
  StereoRig rig{{500, 500, 120, 60}, 0.5};
  const auto features = detect(left, {});
  const auto corrs = stereo_track(left, right, features, rig, {});
  ASSERT_GT(corrs.size(), features.size() / 2);
  for (const auto& c : corrs) {
    EXPECT_NEAR(c.disparity, 8.0, 0.5);
    EXPECT_NEAR(c.right_feature.y, c.left_feature.y, 0.5);
    ASSERT_TRUE(c.left_feature.depth.has_value());
    EXPECT_NEAR(*c.left_feature.depth, 500 * 0.5 / c.disparity, 1e-9);
    EXPECT_DOUBLE_EQ(c.depth, *c.left_feature.depth);
  }
}

TEST(StereoTrack, TexturelessFeatureIsDiscarded) {
  GrayImage flat(100, 100, 77);
  Feature f;
  f.x = 50;
  f.y = 50;
  EXPECT_TRUE(stereo_track(flat, flat, {f}, StereoRig{{500, 500, 50, 50}, 0.5}, {}).empty());
}

TEST(StereoTrack, RenderedDepthAccuracy) {
  const auto& scene = corridor();
  const auto frame = render(scene, 0);
  const auto features = detect(frame.left, {});
  const auto corrs = stereo_track(frame.left, frame.right, features, scene.rig, {});
  ASSERT_GT(corrs.size(), 300u);
  std::vector<double> rel;
  for (const auto& c : corrs) {
    const auto gt = depth_at(scene, 0, c.left_feature.x, c.left_feature.y);
    ASSERT_TRUE(gt.has_value());
    rel.push_back(std::abs(c.depth - *gt) / *gt);
  }
  std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
  EXPECT_LT(rel[rel.size() / 2], 0.02);
}

TEST(StereoTrack, SwappedImagesReproduceCorrespondences) {
  const auto& scene = corridor();
  const auto frame = render(scene, 0);
  const auto corrs = stereo_track(frame.left, frame.right, detect(frame.left, {}), scene.rig, {});
  std::vector<Feature> rights;
  for (const auto& c : corrs) rights.push_back(c.right_feature);
  const StereoTrackConfig cfg;
  const auto back = track_epipolar(frame.right, frame.left, rights, -cfg.d_max, -cfg.d_min, cfg);
  int agree = 0;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (back[i] && std::hypot(back[i]->x - corrs[i].left_feature.x, back[i]->y - corrs[i].left_feature.y) <= 1.0) {
      ++agree;
    }
  }
  EXPECT_GE(agree, static_cast<int>(0.95 * corrs.size()));
}

TEST(EpipolarSearch, SubpixelShift) {
  // Smooth ramp texture shifted by a fractional amount.
  GrayImage left(200, 60);
  GrayImage right(200, 60);
  auto tex = [](double x, double y) { return 128 + 60 * std::sin(x * 0.31) * std::cos(y * 0.23) + 40 * std::sin(x * 0.11 + y * 0.07); };
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 200; ++x) {
      left.set(x, y, static_cast<std::uint8_t>(std::lround(tex(x, y))));
      right.set(x, y, static_cast<std::uint8_t>(std::lround(tex(x + 10.3, y))));
    }
  }
  const auto hit = epipolar_search(left, right, 100, 30, 1, 40, {});
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(100 - hit->x, 10.3, 0.15);
  EXPECT_NEAR(hit->y, 30, 0.15);
  EXPECT_GT(hit->score, 0.95);
}

TEST(Match, IdentityOnDistinctDescriptors) {
  Rng rng(3);
  std::vector<Descriptor> ds;
  for (int i = 0; i < 50; ++i) ds.emplace_back(random_binary(rng));
  const auto matches = match_descriptors(ds, ds, {});
  ASSERT_EQ(matches.size(), ds.size());
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(matches[i].query_index, i);
    EXPECT_EQ(matches[i].train_index, i);
    EXPECT_EQ(matches[i].dist, 0.0);
  }
}

TEST(Match, EmptyInputs) {
  Rng rng(4);
  std::vector<Descriptor> ds = {random_binary(rng)};
  EXPECT_TRUE(match_descriptors({}, ds, {}).empty());
  EXPECT_TRUE(match_descriptors(ds, {}, {}).empty());
}

TEST(Match, PerturbedCopies) {
  Rng rng(5);
  std::vector<Descriptor> query;
  std::vector<Descriptor> train;
  for (int i = 0; i < 100; ++i) {
    auto d = random_binary(rng);
    query.emplace_back(d);
    const int flips = static_cast<int>(uniform_index(rng, 26));  // up to 5% of 512
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < flips) chosen.insert(static_cast<int>(uniform_index(rng, 512)));
    for (int b : chosen) d.words[b / 64] ^= std::uint64_t{1} << (b % 64);
    train.emplace_back(d);
  }
  // Shuffle the train side so identity order is not a shortcut.
  std::vector<int> perm(100);
  for (int i = 0; i < 100; ++i) perm[i] = i;
  for (int i = 99; i > 0; --i) std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
  std::vector<Descriptor> shuffled(100);
  for (int i = 0; i < 100; ++i) shuffled[perm[i]] = train[i];
  const auto matches = match_descriptors(query, shuffled, {});
  int correct = 0;
  for (const auto& m : matches) correct += perm[m.query_index] == m.train_index;
  EXPECT_GE(correct, 99);
}

TEST(Match, InjectiveAndThresholded) {
  Rng rng(6);
  std::vector<Descriptor> a;
  std::vector<Descriptor> b;
  // Near-duplicates with some shared neighbours.
  for (int i = 0; i < 200; ++i) {
    auto d = random_binary(rng);
    a.emplace_back(d);
    for (int k = 0; k < 100; ++k) {
      const int bit = static_cast<int>(uniform_index(rng, 512));
      d.words[bit / 64] ^= std::uint64_t{1} << (bit % 64);
    }
    b.emplace_back(d);
  }
  MatchConfig cfg;
  const auto matches = match_descriptors(a, b, cfg);
  std::set<int> qs;
  std::set<int> ts;
  for (const auto& m : matches) {
    EXPECT_TRUE(qs.insert(m.query_index).second);
    EXPECT_TRUE(ts.insert(m.train_index).second);
    EXPECT_LE(m.dist, cfg.binary_abs_threshold);
  }
}

TEST(Match, TiesGoToLowerIndex) {
  Rng rng(7);
  const auto d = random_binary(rng);
  std::vector<Descriptor> query = {d};
  std::vector<Descriptor> train = {random_binary(rng), d, d};
  MatchConfig cfg;
  cfg.binary_ratio = 1.0;
  cfg.mutual = false;
  const auto matches = match_descriptors(query, train, cfg);
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_EQ(matches[0].train_index, 1);
  EXPECT_EQ(match_descriptors(query, train, cfg), matches);
}

TEST(Match, RatioTestRejectsAmbiguity) {
  Rng rng(8);
  auto d = random_binary(rng);
  auto near1 = d;
  auto near2 = d;
  near1.words[0] ^= 0x3FF;  // 10 bits
  near2.words[1] ^= 0x3FF;  // 10 bits
  auto far = d;
  far.words[2] ^= 0xFFFFFFFF;  // 32 bits
  MatchConfig cfg;
  cfg.mutual = false;
  EXPECT_TRUE(match_descriptors({d}, {near1, near2}, cfg).empty());
  const auto clear = match_descriptors({d}, {far, near1}, cfg);
  ASSERT_EQ(clear.size(), 1u);
  EXPECT_EQ(clear[0].train_index, 1);
  // 9 vs 10 bits: 9 <= 0.9 * 10 passes, 0.85 does not.
  near1.words[0] ^= 0x1;
  EXPECT_EQ(match_descriptors({d}, {near1, near2}, cfg).size(), 1u);
  cfg.binary_ratio = 0.85;
  EXPECT_TRUE(match_descriptors({d}, {near1, near2}, cfg).empty());
}

TEST(Match, StereoThresholdScalesWithSections) {
  Rng rng(9);
  BinaryDescriptor a{std::vector<std::uint64_t>(16)};
  for (auto& w : a.words) w = rng();
  auto b = a;
  // 200 differing bits: beyond one section's threshold, within two.
  for (int bit = 0; bit < 200; ++bit) b.words[(bit * 5) / 64] ^= std::uint64_t{1} << ((bit * 5) % 64);
  EXPECT_EQ(distance(a, b), 200.0);
  EXPECT_EQ(match_descriptors({a}, {b}, {}).size(), 1u);
}

TEST(Match, SectionCheckVetoesOneSidedDrift) {
  Rng rng(12);
  BinaryDescriptor a{std::vector<std::uint64_t>(16)};
  for (auto& w : a.words) w = rng();
  auto one_sided = a;
  for (int bit = 0; bit < 150; ++bit) one_sided.words[(bit * 3) / 64] ^= std::uint64_t{1} << ((bit * 3) % 64);
  auto balanced = a;
  for (int bit = 0; bit < 150; ++bit) balanced.words[(bit * 6) / 64] ^= std::uint64_t{1} << ((bit * 6) % 64);
  MatchConfig checked;
  checked.section_check = true;
  // 150 bits all in the left section: within the summed threshold only.
  EXPECT_EQ(match_descriptors({a}, {one_sided}, {}).size(), 1u);
  EXPECT_TRUE(match_descriptors({a}, {one_sided}, checked).empty());
  // Split across both sections (86 + 64 bits) it passes both rules.
  EXPECT_EQ(match_descriptors({a}, {balanced}, checked).size(), 1u);
  // Mono descriptors are unaffected.
  const BinaryDescriptor mono{std::vector<std::uint64_t>(a.words.begin(), a.words.begin() + 8)};
  const BinaryDescriptor mono_b{std::vector<std::uint64_t>(balanced.words.begin(), balanced.words.begin() + 8)};
  EXPECT_EQ(match_descriptors({mono}, {mono_b}, checked).size(), 1u);
}

TEST(Match, MixedLengthsRejected) {
  Rng rng(10);
  BinaryDescriptor st{std::vector<std::uint64_t>(16)};
  try {
    match_descriptors({random_binary(rng)}, {st}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(Match, CsvOutput) {
  std::ostringstream out;
  write_matches_csv(out, {{0, 3, 12.0}, {2, 1, 0.5}});
  EXPECT_EQ(out.str(), "query_idx,train_idx,dist\n0,3,12\n2,1,0.5\n");
}
