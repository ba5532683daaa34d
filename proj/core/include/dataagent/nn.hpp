#pragma once

#include <cstdint>
#include <vector>

#include "dataagent/matrix.hpp"

namespace da {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

struct SgdConfig {
  double learning_rate = 0.01;
  double momentum = 0.0;  // in [0, 1)
};

// Fully connected layer, y = act(x . W^T + b). Forward caches the input and
// pre-activation so backward() can produce exact analytic gradients.
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act, std::uint64_t seed);

  // one row per input row; caches for backward
  Matrix forward(const Matrix& input);

  // grad_out = dL/d(output); accumulates into weight_grad/bias_grad and
  // returns dL/d(input). Requires a prior forward() on the same input.
  Matrix backward(const Matrix& grad_out);

  void sgd_step(const SgdConfig& cfg);
  void zero_grad();

  std::size_t in_dim() const { return weight.cols; }
  std::size_t out_dim() const { return weight.rows; }

  Matrix weight;               // out x in
  std::vector<double> bias;    // out
  Matrix weight_grad;          // out x in
  std::vector<double> bias_grad;
  Activation activation = Activation::Identity;

 private:
  Matrix cached_input_;   // N x in
  Matrix cached_preact_;  // N x out
  bool has_cache_ = false;
  Matrix weight_vel_;  // momentum buffers, allocated lazily
  std::vector<double> bias_vel_;
};

using Network = std::vector<DenseLayer>;

Matrix network_forward(Network& net, const Matrix& input);
// pushes grad_wrt_output back through all layers, filling gradient buffers
void network_backward(Network& net, const Matrix& grad_wrt_output);
void network_sgd_step(Network& net, const SgdConfig& cfg);
void network_zero_grad(Network& net);
// sum of all parameters; cheap mutation detector for tests
double network_checksum(const Network& net);
std::size_t network_param_count(const Network& net);

// max-subtracted stabilized softmax, row-wise
Matrix softmax_rows(const Matrix& logits);

// element i = -log(max(probs[i][labels[i]], 1e-12))
std::vector<double> cross_entropy_per_row(const Matrix& probs,
                                          const std::vector<std::size_t>& labels);

// d(mean CE)/d(logits) = (probs - onehot) / N
Matrix cross_entropy_softmax_grad(const Matrix& probs,
                                  const std::vector<std::size_t>& labels);

// uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], deterministic in (shape, seed)
Matrix seeded_init(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace da
