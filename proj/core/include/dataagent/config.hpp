#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataagent/selection.hpp"

namespace da {

// configuration problem -> CLI exit 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// data / IO problem -> CLI exit 3
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetConfig {
  std::string generator = "mixture";  // mixture | rings | file
  std::string path;                   // required when generator = file
  std::uint64_t seed = 7;
  double noise_rate = 0.0;
};

struct BenchConfig {
  std::vector<std::string> strategies{"agent"};
  std::vector<std::uint64_t> seeds{0};
};

// Full run configuration, parsed from flat `section.key = value` text.
// Unknown keys are rejected; every key has a documented default.
struct RunConfig {
  DatasetConfig dataset;
  ModelConfig model;
  LoopConfig loop;
  AgentConfig agent;
  RewardConfig reward;
  BenchConfig bench;
  std::string output_dir;  // default: $DATA_AGENT_OUT or ./out

  static RunConfig defaults();
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text);

  // materializes dataset per the dataset.* keys (generation or load + noise)
  Dataset make_dataset() const;
};

}  // namespace da
