#include "dataagent/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dataagent/rng.hpp"

namespace da {

namespace {

double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::Identity: return z;
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

double act_derivative(Activation a, double z) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

}  // namespace

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act, std::uint64_t seed)
    : weight(seeded_init(out, in, seed)),
      bias(out, 0.0),
      weight_grad(out, in, 0.0),
      bias_grad(out, 0.0),
      activation(act) {}

Matrix DenseLayer::forward(const Matrix& input) {
  if (input.cols != weight.cols) {
    throw std::invalid_argument("dense_forward: input width " + std::to_string(input.cols) +
                                " != layer input width " + std::to_string(weight.cols));
  }
  Matrix z = matmul_nt(input, weight);
  for (std::size_t i = 0; i < z.rows; ++i) {
    double* zi = z.row(i);
    for (std::size_t j = 0; j < z.cols; ++j) zi[j] += bias[j];
  }
  cached_input_ = input;
  cached_preact_ = z;
  has_cache_ = true;

  Matrix out = z;
  for (double& v : out.data) v = apply_act(activation, v);
  return out;
}

Matrix DenseLayer::backward(const Matrix& grad_out) {
  if (!has_cache_) {
    throw std::logic_error("dense backward before forward");
  }
  if (grad_out.rows != cached_preact_.rows || grad_out.cols != cached_preact_.cols) {
    throw std::invalid_argument("dense backward: grad shape " + std::to_string(grad_out.rows) +
                                "x" + std::to_string(grad_out.cols) + " != output shape " +
                                std::to_string(cached_preact_.rows) + "x" +
                                std::to_string(cached_preact_.cols));
  }
  const std::size_t n = grad_out.rows;
  const std::size_t out_d = weight.rows;
  const std::size_t in_d = weight.cols;

  Matrix grad_z = grad_out;
  for (std::size_t i = 0; i < n * out_d; ++i) {
    grad_z.data[i] *= act_derivative(activation, cached_preact_.data[i]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = grad_z.row(i);
    const double* xi = cached_input_.row(i);
    for (std::size_t o = 0; o < out_d; ++o) {
      const double g = gi[o];
      bias_grad[o] += g;
      double* wg = weight_grad.row(o);
      for (std::size_t k = 0; k < in_d; ++k) wg[k] += g * xi[k];
    }
  }

  Matrix grad_in(n, in_d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = grad_z.row(i);
    double* out = grad_in.row(i);
    for (std::size_t o = 0; o < out_d; ++o) {
      const double g = gi[o];
      const double* wo = weight.row(o);
      for (std::size_t k = 0; k < in_d; ++k) out[k] += g * wo[k];
    }
  }
  return grad_in;
}

void DenseLayer::sgd_step(const SgdConfig& cfg) {
  if (cfg.learning_rate <= 0.0) {
    throw std::invalid_argument("sgd_step: learning_rate must be > 0");
  }
  if (cfg.momentum != 0.0) {
    if (weight_vel_.data.empty()) {
      weight_vel_ = Matrix(weight.rows, weight.cols, 0.0);
      bias_vel_.assign(bias.size(), 0.0);
    }
    for (std::size_t i = 0; i < weight.data.size(); ++i) {
      weight_vel_.data[i] = cfg.momentum * weight_vel_.data[i] + weight_grad.data[i];
      weight.data[i] -= cfg.learning_rate * weight_vel_.data[i];
    }
    for (std::size_t i = 0; i < bias.size(); ++i) {
      bias_vel_[i] = cfg.momentum * bias_vel_[i] + bias_grad[i];
      bias[i] -= cfg.learning_rate * bias_vel_[i];
    }
  } else {
    for (std::size_t i = 0; i < weight.data.size(); ++i) {
      weight.data[i] -= cfg.learning_rate * weight_grad.data[i];
    }
    for (std::size_t i = 0; i < bias.size(); ++i) {
      bias[i] -= cfg.learning_rate * bias_grad[i];
    }
  }
  zero_grad();
}

void DenseLayer::zero_grad() {
  weight_grad.fill(0.0);
  std::fill(bias_grad.begin(), bias_grad.end(), 0.0);
}

Matrix network_forward(Network& net, const Matrix& input) {
  Matrix x = input;
  for (auto& layer : net) x = layer.forward(x);
  return x;
}

void network_backward(Network& net, const Matrix& grad_wrt_output) {
  Matrix g = grad_wrt_output;
  for (auto it = net.rbegin(); it != net.rend(); ++it) g = it->backward(g);
}

void network_sgd_step(Network& net, const SgdConfig& cfg) {
  for (auto& layer : net) layer.sgd_step(cfg);
}

void network_zero_grad(Network& net) {
  for (auto& layer : net) layer.zero_grad();
}

double network_checksum(const Network& net) {
  double s = 0.0;
  for (const auto& layer : net) {
    for (double v : layer.weight.data) s += v;
    for (double v : layer.bias) s += v;
  }
  return s;
}

std::size_t network_param_count(const Network& net) {
  std::size_t n = 0;
  for (const auto& layer : net) n += layer.weight.data.size() + layer.bias.size();
  return n;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* zi = logits.row(i);
    double* oi = out.row(i);
    double mx = zi[0];
    for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, zi[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      oi[j] = std::exp(zi[j] - mx);
      sum += oi[j];
    }
    for (std::size_t j = 0; j < logits.cols; ++j) oi[j] /= sum;
  }
  return out;
}

std::vector<double> cross_entropy_per_row(const Matrix& probs,
                                          const std::vector<std::size_t>& labels) {
  if (labels.size() != probs.rows) {
    throw std::invalid_argument("cross_entropy_per_row: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(probs.rows) + " rows");
  }
  std::vector<double> out(probs.rows);
  for (std::size_t i = 0; i < probs.rows; ++i) {
    if (labels[i] >= probs.cols) {
      throw std::invalid_argument("cross_entropy_per_row: label " + std::to_string(labels[i]) +
                                  " out of range at row " + std::to_string(i));
    }
    out[i] = -std::log(std::max(probs.at(i, labels[i]), 1e-12));
  }
  return out;
}

Matrix cross_entropy_softmax_grad(const Matrix& probs,
                                  const std::vector<std::size_t>& labels) {
  if (labels.size() != probs.rows) {
    throw std::invalid_argument("cross_entropy_softmax_grad: label count mismatch");
  }
  Matrix g = probs;
  const double inv_n = 1.0 / static_cast<double>(probs.rows);
  for (std::size_t i = 0; i < probs.rows; ++i) {
    g.at(i, labels[i]) -= 1.0;
    double* gi = g.row(i);
    for (std::size_t j = 0; j < probs.cols; ++j) gi[j] *= inv_n;
  }
  return g;
}

Matrix seeded_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols > 0 ? cols : 1));
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(-bound, bound);
  return m;
}

}  // namespace da
