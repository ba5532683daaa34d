#include "dataagent/propcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dataagent/nn.hpp"
#include "dataagent/rng.hpp"

namespace da {

namespace {

std::vector<double> rank(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank for ties
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

// suite (a): CE logit-gradient identity and gradient-norm monotonicity
void check_gradient_identity(PropcheckResult& res) {
  Rng rng(101);
  double max_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t classes = 2 + rng.below(9);
    Matrix logits(1, classes);
    for (double& z : logits.data) z = rng.uniform(-4.0, 4.0);
    const std::size_t y = rng.below(classes);
    Matrix probs = softmax_rows(logits);
    Matrix grad = cross_entropy_softmax_grad(probs, {y});
    double l1 = 0.0;
    for (double g : grad.data) l1 += std::abs(g);
    max_err = std::max(max_err, std::abs(l1 - 2.0 * (1.0 - probs.at(0, y))));
  }
  res.gradient_identity_max_err = max_err;

  // sweep the true-class bias of a random 1-layer softmax model; full
  // parameter gradient norm must rank exactly with 1 - p_y
  const std::size_t dim = 6, classes = 5, y = 2;
  DenseLayer layer(dim, classes, Activation::Identity, 555);
  Matrix x(1, dim);
  for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
  std::vector<double> norms, one_minus_py;
  for (int step = 0; step <= 20; ++step) {
    layer.bias[y] = -4.0 + 0.4 * step;
    layer.zero_grad();
    Matrix probs = softmax_rows(layer.forward(x));
    layer.backward(cross_entropy_softmax_grad(probs, {y}));
    double sq = 0.0;
    for (double g : layer.weight_grad.data) sq += g * g;
    for (double g : layer.bias_grad) sq += g * g;
    norms.push_back(std::sqrt(sq));
    one_minus_py.push_back(1.0 - probs.at(0, y));
  }
  res.gradient_identity_rank_corr = spearman(norms, one_minus_py);
  res.gradient_identity_ok = max_err <= 1e-9 && res.gradient_identity_rank_corr == 1.0;
}

// suite (b): brute-force expected KL after one SGD step vs predictive entropy.
// Binary head at a fixed input scale: there both the expected KL and the
// entropy are monotone in the logit margin, so the ranks must agree exactly.
// (With C > 2 and free input norms the relation is only approximate and the
// update magnitude factor (|x|^2 + 1)^2 swamps it.)
void check_entropy_kl(PropcheckResult& res) {
  const std::size_t dim = 8, classes = 2;
  const double eta = 1e-3;
  Matrix w = seeded_init(classes, dim, 777);
  std::vector<double> bias(classes, 0.0);
  Rng rng(202);

  auto softmax_at = [&](const Matrix& wm, const std::vector<double>& bm,
                        const std::vector<double>& x) {
    std::vector<double> z(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      double acc = bm[c];
      for (std::size_t k = 0; k < dim; ++k) acc += wm.at(c, k) * x[k];
      z[c] = acc;
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
  };

  std::vector<double> expected_kl, entropies;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(dim);
    double nrm = 0.0;
    for (double& v : x) {
      v = rng.uniform(-1.0, 1.0);
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    for (double& v : x) v = 3.0 * v / nrm;  // fixed logit scale across the sweep

    const std::vector<double> p = softmax_at(w, bias, x);
    double ekl = 0.0;
    for (std::size_t y = 0; y < classes; ++y) {
      // theta' = theta - eta * (p - e_y) x^T for the CE loss
      Matrix w2 = w;
      std::vector<double> b2 = bias;
      for (std::size_t c = 0; c < classes; ++c) {
        const double g = p[c] - (c == y ? 1.0 : 0.0);
        for (std::size_t k = 0; k < dim; ++k) w2.at(c, k) -= eta * g * x[k];
        b2[c] -= eta * g;
      }
      const std::vector<double> p2 = softmax_at(w2, b2, x);
      double kl = 0.0;
      for (std::size_t c = 0; c < classes; ++c) {
        if (p2[c] > 0.0) kl += p2[c] * std::log(p2[c] / p[c]);
      }
      ekl += p[y] * kl;
    }
    expected_kl.push_back(ekl);
    entropies.push_back(entropy(p));
  }
  res.entropy_kl_spearman = spearman(expected_kl, entropies);
  res.entropy_kl_ok = res.entropy_kl_spearman >= 0.9;
}

// suite (c): analytic gradients vs central finite differences
void check_finite_difference(PropcheckResult& res) {
  Rng rng(303);
  const double step = 1e-4;
  double max_rel = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t depth = 1 + rng.below(3);
    const std::size_t input_dim = 2 + rng.below(6);
    const std::size_t classes = 2 + rng.below(4);
    Network net;
    std::size_t in = input_dim;
    for (std::size_t li = 0; li < depth; ++li) {
      const std::size_t width = li + 1 == depth ? classes : 2 + rng.below(31);
      const Activation act = li + 1 == depth
                                 ? Activation::Identity
                                 : (rng.below(2) == 0 ? Activation::Tanh : Activation::Sigmoid);
      net.emplace_back(in, width, act, rng.next_u64());
      in = width;
    }
    const std::size_t n = 1 + rng.below(4);
    Matrix x(n, input_dim);
    for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = rng.below(classes);

    auto loss_at = [&]() {
      Matrix probs = softmax_rows(network_forward(net, x));
      const auto losses = cross_entropy_per_row(probs, labels);
      return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(n);
    };

    network_zero_grad(net);
    Matrix probs = softmax_rows(network_forward(net, x));
    network_backward(net, cross_entropy_softmax_grad(probs, labels));

    for (auto& layer : net) {
      auto probe = [&](double* param, double analytic) {
        const double keep = *param;
        *param = keep + step;
        const double hi = loss_at();
        *param = keep - step;
        const double lo = loss_at();
        *param = keep;
        const double numeric = (hi - lo) / (2.0 * step);
        const double rel = std::abs(analytic - numeric) / std::max(std::abs(numeric), 1e-4);
        max_rel = std::max(max_rel, rel);
      };
      for (std::size_t i = 0; i < layer.weight.data.size(); ++i) {
        probe(&layer.weight.data[i], layer.weight_grad.data[i]);
      }
      for (std::size_t i = 0; i < layer.bias.size(); ++i) {
        probe(&layer.bias[i], layer.bias_grad[i]);
      }
    }
  }
  res.finite_difference_max_rel_err = max_rel;
  res.finite_difference_ok = max_rel <= 1e-4;
}

}  // namespace

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(rank(a), rank(b));
}

PropcheckResult run_propcheck() {
  PropcheckResult res;
  check_gradient_identity(res);
  check_entropy_kl(res);
  check_finite_difference(res);
  std::ostringstream d;
  d << "gradient-identity: max_err=" << res.gradient_identity_max_err
    << " rank_corr=" << res.gradient_identity_rank_corr << '\n'
    << "entropy-kl: spearman=" << res.entropy_kl_spearman << '\n'
    << "finite-difference: max_rel_err=" << res.finite_difference_max_rel_err;
  res.detail = d.str();
  return res;
}

}  // namespace da
