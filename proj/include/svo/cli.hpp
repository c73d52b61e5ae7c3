#pragma once

#include "svo/config.hpp"

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace svo::cli {

// Everything a command needs besides the resolved configuration. Paths are
// stored absolute so a manifest can be replayed from any directory.
struct RunOptions {
  std::string command;
  std::string dataset;
  std::string sequence = "00";
  std::string synthetic;  // scene fixture file, alternative to dataset
  std::string frames;     // "a..b", half-open; empty = whole sequence
  std::string config_file;
  std::uint64_t seed = 7;
  std::vector<std::uint64_t> seeds;  // repeat-vo, resolved before running
  int runs = 5;
  std::vector<int> feature_budgets;  // track-eval sweep
  std::vector<std::string> backends = {"retina", "gradhist"};
  std::vector<int> steps = {1, 2, 3, 4, 5};
  int threads = 1;
  std::string out;
  // synth
  std::string kind = "corridor";
  int length = 100;
  int width = 640;
  int height = 360;
  double fx = 500.0;
  double noise = 0.0;
  bool kitti = false;
};

std::string code_version();

std::string serialize_manifest(const RunOptions& options, const RunConfig& config);
void parse_manifest(const std::string& text, RunOptions& options, RunConfig& config);

// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Half-open "a..b" frame range.
std::pair<std::size_t, std::size_t> parse_frame_range(const std::string& text);

// Runs a resolved command: writes the manifest, then the outputs.
int execute(RunOptions options, const RunConfig& config, std::ostream& out, std::ostream& err);

// Entry point of the executable. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 estimation failure beyond the fallback budget.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svo::cli
