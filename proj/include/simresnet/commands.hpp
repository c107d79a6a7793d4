#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simresnet/dataset.hpp"

namespace simresnet::cli {

// Every command resolves its options, runs, and writes one manifest JSON
// beside its primary output (also on failure). Runs with identical
// manifest inputs reproduce identical data artifacts; only the manifest's
// timing fields may differ.

struct GenOptions {
  Group group = Group::V;
  std::size_t pictures = 70;
  std::size_t measurements = 150;
  std::uint64_t seed = 0;
  std::filesystem::path output;
};

struct TrainOptions {
  std::filesystem::path data;
  std::filesystem::path model_output;
  std::vector<std::string> features = {feature::kFeret};
  std::size_t depth = 4;
  double learning_rate = 0.1;
  std::size_t iterations = 10000;
  std::size_t averaging = 1;
  std::uint64_t seed = 0;
  std::size_t width_multiplier = 1;
  std::optional<std::string> picture_id;  // default: seeded random selection
};

struct EvalOptions {
  std::filesystem::path model;
  std::filesystem::path data;
  std::filesystem::path output_prefix;
  std::size_t bins = 30;
};

struct PredictOptions {
  std::filesystem::path model;  // ignored in per_picture mode
  std::filesystem::path data;
  std::filesystem::path output_prefix;
  bool per_picture = false;     // retrain one net per picture (comp_shk style)
  TrainOptions train;           // training settings for per_picture mode
};

struct BenchOptions {
  std::filesystem::path data;
  std::filesystem::path output;
  std::vector<std::size_t> multipliers = {1, 2, 4};
  std::size_t iterations = 2000;
  std::size_t repeats = 1;
  std::vector<std::string> features = {feature::kFeret};
  std::size_t depth = 4;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  std::optional<std::string> picture_id;
};

struct ShakedownOptions {
  std::filesystem::path instance;
  std::filesystem::path output;
  bool oracle = false;
  double grid_step = 5.0;  // MPa, oracle resolution
  double tol_bisect = 1e-3;
  std::size_t max_iter = 10000;
};

void run_gen(const GenOptions& opt);
void run_train(const TrainOptions& opt);
void run_eval(const EvalOptions& opt);
void run_predict(const PredictOptions& opt);
void run_bench(const BenchOptions& opt);
void run_shakedown(const ShakedownOptions& opt);

// FNV-1a 64 of a file's bytes, as hex; used for manifest checksums.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace simresnet::cli
