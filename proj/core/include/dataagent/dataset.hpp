#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dataagent/matrix.hpp"

namespace da {

struct Dataset {
  Matrix features;                     // N x d
  std::vector<std::size_t> labels;     // N, in [0, C)
  std::size_t class_count = 0;
  std::optional<std::vector<double>> consistency;  // N, in [0,1]
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
  std::string source;

  std::size_t size() const { return features.rows; }
  std::size_t dim() const { return features.cols; }

  // row-gathered views of one split
  Matrix gather_features(const std::vector<std::size_t>& ids) const;
  std::vector<std::size_t> gather_labels(const std::vector<std::size_t>& ids) const;
};

bool operator==(const Dataset& a, const Dataset& b);

struct MixtureComponent {
  std::size_t label = 0;
  std::vector<double> center;
  double std_dev = 1.0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

struct MixtureSpec {
  std::vector<MixtureComponent> components;
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double flip_rate = 0.0;  // in [0, 1)
  std::uint64_t seed = 0;
  double consistency_noise_std = 0.05;
};

Dataset gen_mixture(const MixtureSpec& spec);

// 8 classes on a circle, 2-D, 8000 train / 2000 test with alternating
// common (1700) and rare (300) train classes; test balanced at 250 each
MixtureSpec default_benchmark_spec(std::uint64_t seed);

// two-class concentric rings, for non-linear boundaries
Dataset gen_rings(std::size_t train_per_class, std::size_t test_per_class, std::uint64_t seed);

// Flips exactly round(rate * N_train) train labels to a uniformly resampled
// other class; fills the consistency channel (clean ~1, flipped ~0). Test
// labels untouched. Returns the flipped ids.
std::vector<std::size_t> inject_label_noise(Dataset& dataset, const NoiseSpec& noise);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

struct CsvLoadOptions {
  std::string label_column;
  double split_fraction = 0.8;  // train share
  std::uint64_t seed = 0;
  bool zscore = false;  // per-column, statistics fit on the train split
};
Dataset load_csv(const std::string& path, const CsvLoadOptions& opts);

}  // namespace da
