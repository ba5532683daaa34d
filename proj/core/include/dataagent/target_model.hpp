#pragma once

#include <cstdint>
#include <vector>

#include "dataagent/nn.hpp"

namespace da {

// Per-sample outputs of one scoring pass over a pool: penultimate-layer
// features (the agent's states), class probabilities and cross-entropy losses.
struct ForwardRecord {
  Matrix features;               // N x D
  Matrix probs;                  // N x C
  std::vector<double> losses;    // N
  std::vector<std::size_t> sample_ids;
};

// Trainee classifier: a relu trunk producing the feature embedding, plus a
// linear head to C logits.
class TargetModel {
 public:
  TargetModel(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
              std::size_t class_count, std::uint64_t seed);

  ForwardRecord forward_pool(const Matrix& features, const std::vector<std::size_t>& labels,
                             const std::vector<std::size_t>& sample_ids = {});

  // one forward + backward + sgd update on the batch; returns pre-update mean loss
  double train_step(const Matrix& batch_features, const std::vector<std::size_t>& batch_labels,
                    const SgdConfig& sgd);

  double evaluate(const Matrix& features, const std::vector<std::size_t>& labels);

  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t class_count() const { return class_count_; }
  double checksum() const;

  Network trunk;     // feature extractor
  DenseLayer head;   // feature_dim -> C, identity activation

 private:
  std::size_t feature_dim_;
  std::size_t class_count_;
};

// argmax with ties broken toward the lower index
std::size_t argmax_row(const double* row, std::size_t n);

}  // namespace da
