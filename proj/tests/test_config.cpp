#include "svo/config.hpp"
#include "svo/error.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace svo;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig def;
  const auto text = serialize_config(def);
  EXPECT_EQ(serialize_config(parse_config(text)), text);
  EXPECT_EQ(config_entries(parse_config(text)), config_entries(def));
}

TEST(Config, EveryKeyIsSerialized) {
  const auto entries = config_entries(RunConfig{});
  const auto keys = config_keys();
  EXPECT_EQ(entries.size(), keys.size());
  for (const auto& k : keys) EXPECT_EQ(entries.count(k), 1u) << k;
}

TEST(Config, ValuesCommentsAndWhitespace) {
  const auto cfg = parse_config(
      "# experiment\n"
      "  detector.max_features = 300   # budget\n"
      "\n"
      "descriptor.backend=gradhist\n"
      "descriptor.stereo = true\n"
      "scale.enabled = 0\n"
      "match.binary_ratio = 0.75\n"
      "eval.max_step = 5\n");
  EXPECT_EQ(cfg.pipeline.detector.max_features, 300);
  EXPECT_EQ(cfg.pipeline.backend, DescriptorBackend::GradHist);
  EXPECT_TRUE(cfg.pipeline.stereo_descriptor);
  EXPECT_FALSE(cfg.pipeline.scale.enabled);
  EXPECT_DOUBLE_EQ(cfg.pipeline.match.binary_ratio, 0.75);
  EXPECT_EQ(cfg.eval.max_step, 5);
}

TEST(Config, NonDefaultRoundTripIsExact) {
  RunConfig cfg;
  set_config_value(cfg, "ransac.reproj_tol", "1.2345678901234567");
  set_config_value(cfg, "stereo.zncc_min", "0.1");
  set_config_value(cfg, "match.mutual", "false");
  set_config_value(cfg, "match.section_check", "true");
  set_config_value(cfg, "stereo.off_row_margin", "0.125");
  const auto back = parse_config(serialize_config(cfg));
  EXPECT_EQ(back.pipeline.ransac.reproj_tol, cfg.pipeline.ransac.reproj_tol);
  EXPECT_EQ(back.pipeline.stereo.zncc_min, 0.1);
  EXPECT_FALSE(back.pipeline.match.mutual);
  EXPECT_TRUE(back.pipeline.match.section_check);
  EXPECT_EQ(back.pipeline.stereo.off_row_margin, 0.125);
}

TEST(Config, UnknownKeyRejectedWithLine) {
  try {
    parse_config("detector.max_features = 10\ndetector.max_feature = 20\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("detector.max_feature"), std::string::npos);
  }
}

TEST(Config, MalformedValuesRejected) {
  EXPECT_EQ(code_of("detector.max_features = many\n"), ErrorCode::ConfigError);
  EXPECT_EQ(code_of("detector.max_features = 3.5\n"), ErrorCode::ConfigError);
  EXPECT_EQ(code_of("scale.enabled = yes\n"), ErrorCode::ConfigError);
  EXPECT_EQ(code_of("descriptor.backend = orb\n"), ErrorCode::ConfigError);
  EXPECT_EQ(code_of("no equals sign\n"), ErrorCode::ConfigError);
}

TEST(Config, BaseIsPreservedForUnsetKeys) {
  RunConfig base;
  base.pipeline.detector.max_features = 77;
  const auto cfg = parse_config("eval.frame_stride = 3\n", base);
  EXPECT_EQ(cfg.pipeline.detector.max_features, 77);
  EXPECT_EQ(cfg.eval.frame_stride, 3);
}

TEST(Config, ShippedExperimentFilesParse) {
  const std::filesystem::path dir = std::filesystem::path(SVO_SOURCE_DIR) / "configs";
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".cfg") continue;
    ++files;
    std::ifstream in(e.path());
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_NO_THROW(parse_config(text.str())) << e.path();
    if (e.path().filename() == "default.cfg") {
      EXPECT_EQ(config_entries(parse_config(text.str())), config_entries(RunConfig{}));
    }
  }
  EXPECT_GE(files, 2);
}
