#include "svo/config.hpp"

#include "svo/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace svo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::ConfigError, "key '" + key + "' expects true or false, got '" + v + "'");
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <typename Access>
Field double_field(Access access) {
  return {[access](const RunConfig& c) { return format_double(access(const_cast<RunConfig&>(c))); },
          [access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = to_double(k, v); }};
}

template <typename Access>
Field int_field(Access access) {
  return {[access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
          [access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = to_int(k, v); }};
}

template <typename Access>
Field bool_field(Access access) {
  return {[access](const RunConfig& c) { return std::string(access(const_cast<RunConfig&>(c)) ? "true" : "false"); },
          [access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = to_bool(k, v); }};
}

#define SVO_D(key, member) {key, double_field([](RunConfig& c) -> double& { return c.member; })}
#define SVO_I(key, member) {key, int_field([](RunConfig& c) -> int& { return c.member; })}
#define SVO_B(key, member) {key, bool_field([](RunConfig& c) -> bool& { return c.member; })}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      SVO_I("detector.border", pipeline.detector.border),
      SVO_D("detector.nms_radius", pipeline.detector.nms_radius),
      SVO_I("detector.max_features", pipeline.detector.max_features),
      SVO_D("detector.response_min", pipeline.detector.response_min),
      SVO_D("detector.default_size", pipeline.detector.default_size),
      SVO_D("detector.harris_k", pipeline.detector.harris_k),
      SVO_D("detector.window_sigma", pipeline.detector.window_sigma),
      SVO_I("stereo.half_window", pipeline.stereo.half_window),
      SVO_I("stereo.epipolar_search", pipeline.stereo.epipolar_search),
      SVO_D("stereo.d_min", pipeline.stereo.d_min),
      SVO_D("stereo.d_max", pipeline.stereo.d_max),
      SVO_D("stereo.zncc_min", pipeline.stereo.zncc_min),
      SVO_D("stereo.lr_tolerance", pipeline.stereo.lr_tolerance),
      SVO_D("stereo.epipolar_tolerance", pipeline.stereo.epipolar_tolerance),
      SVO_D("stereo.off_row_margin", pipeline.stereo.off_row_margin),
      SVO_B("scale.enabled", pipeline.scale.enabled),
      SVO_D("scale.metric_radius", pipeline.scale.metric_radius),
      SVO_D("scale.r_min", pipeline.scale.r_min),
      SVO_D("scale.r_max", pipeline.scale.r_max),
      {"descriptor.backend",
       {[](const RunConfig& c) { return std::string(to_string(c.pipeline.backend)); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
          try {
            c.pipeline.backend = parse_backend(v);
          } catch (const Error&) {
            throw Error(ErrorCode::ConfigError, "key '" + k + "' expects retina or gradhist, got '" + v + "'");
          }
        }}},
      SVO_B("descriptor.stereo", pipeline.stereo_descriptor),
      SVO_D("match.binary_abs_threshold", pipeline.match.binary_abs_threshold),
      SVO_D("match.float_abs_threshold", pipeline.match.float_abs_threshold),
      SVO_D("match.binary_ratio", pipeline.match.binary_ratio),
      SVO_D("match.float_ratio", pipeline.match.float_ratio),
      SVO_B("match.mutual", pipeline.match.mutual),
      SVO_B("match.section_check", pipeline.match.section_check),
      SVO_I("ransac.max_iterations", pipeline.ransac.max_iterations),
      SVO_D("ransac.confidence", pipeline.ransac.confidence),
      SVO_D("ransac.reproj_tol", pipeline.ransac.reproj_tol),
      SVO_I("ransac.min_inliers", pipeline.ransac.min_inliers),
      SVO_I("ransac.refine_iterations", pipeline.ransac.refine_iterations),
      SVO_D("ransac.refine_epsilon", pipeline.ransac.refine_epsilon),
      SVO_I("odometry.max_fallbacks", pipeline.max_fallbacks),
      SVO_I("eval.frame_stride", eval.frame_stride),
      SVO_I("eval.max_step", eval.max_step),
      SVO_D("eval.correctness_tol", eval.correctness_tol),
  };
  return table;
}

#undef SVO_D
#undef SVO_I
#undef SVO_B

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
  it->second.set(cfg, key, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : fields()) keys.push_back(k);
  return keys;
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(base, key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": " + e.detail());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::map<std::string, std::string> config_entries(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [k, f] : fields()) out[k] = f.get(cfg);
  return out;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace svo
