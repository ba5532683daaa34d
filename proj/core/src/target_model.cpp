#include "dataagent/target_model.hpp"

#include <numeric>
#include <stdexcept>

#include "dataagent/rng.hpp"

namespace da {

TargetModel::TargetModel(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                         std::size_t class_count, std::uint64_t seed)
    : feature_dim_(hidden_dims.empty() ? input_dim : hidden_dims.back()),
      class_count_(class_count) {
  if (class_count < 2) throw std::invalid_argument("TargetModel: class_count must be >= 2");
  std::size_t in = input_dim;
  for (std::size_t li = 0; li < hidden_dims.size(); ++li) {
    trunk.emplace_back(in, hidden_dims[li], Activation::Relu, mix_seed(seed, li));
    in = hidden_dims[li];
  }
  head = DenseLayer(in, class_count, Activation::Identity, mix_seed(seed, hidden_dims.size()));
}

ForwardRecord TargetModel::forward_pool(const Matrix& features,
                                        const std::vector<std::size_t>& labels,
                                        const std::vector<std::size_t>& sample_ids) {
  if (labels.size() != features.rows) {
    throw std::invalid_argument("forward_pool: label count != row count");
  }
  ForwardRecord rec;
  rec.features = network_forward(trunk, features);
  rec.probs = softmax_rows(head.forward(rec.features));
  rec.losses = cross_entropy_per_row(rec.probs, labels);
  if (sample_ids.empty()) {
    rec.sample_ids.resize(features.rows);
    std::iota(rec.sample_ids.begin(), rec.sample_ids.end(), 0);
  } else {
    if (sample_ids.size() != features.rows) {
      throw std::invalid_argument("forward_pool: sample_id count != row count");
    }
    rec.sample_ids = sample_ids;
  }
  require_finite(rec.features, "forward_pool features");
  require_finite(rec.probs, "forward_pool probs");
  return rec;
}

double TargetModel::train_step(const Matrix& batch_features,
                               const std::vector<std::size_t>& batch_labels,
                               const SgdConfig& sgd) {
  if (batch_features.rows == 0) throw std::invalid_argument("train_step: empty batch");
  Matrix feat = network_forward(trunk, batch_features);
  Matrix probs = softmax_rows(head.forward(feat));
  std::vector<double> losses = cross_entropy_per_row(probs, batch_labels);
  const double mean_loss =
      std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());

  Matrix grad_logits = cross_entropy_softmax_grad(probs, batch_labels);
  Matrix grad_feat = head.backward(grad_logits);
  network_backward(trunk, grad_feat);
  head.sgd_step(sgd);
  network_sgd_step(trunk, sgd);
  return mean_loss;
}

double TargetModel::evaluate(const Matrix& features, const std::vector<std::size_t>& labels) {
  if (features.rows == 0) throw std::invalid_argument("evaluate: empty set");
  Matrix feat = network_forward(trunk, features);
  Matrix logits = head.forward(feat);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    if (argmax_row(logits.row(i), logits.cols) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows);
}

double TargetModel::checksum() const {
  double s = network_checksum(trunk);
  for (double v : head.weight.data) s += v;
  for (double v : head.bias) s += v;
  return s;
}

std::size_t argmax_row(const double* row, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

}  // namespace da
