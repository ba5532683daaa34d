#include "dataagent/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace da {

std::vector<double> difficulty_reward(const ForwardRecord& record) { return record.losses; }

std::vector<double> uncertainty_reward(const ForwardRecord& record) {
  std::vector<double> out(record.probs.rows);
  for (std::size_t i = 0; i < record.probs.rows; ++i) {
    const double* pi = record.probs.row(i);
    double h = 0.0;
    for (std::size_t c = 0; c < record.probs.cols; ++c) {
      if (pi[c] > 0.0) h -= pi[c] * std::log(pi[c]);
    }
    out[i] = h;
  }
  return out;
}

double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return var / static_cast<double>(v.size());
}

double adaptive_weight(const std::vector<double>& diff, const std::vector<double>& conf,
                       double epsilon) {
  if (diff.size() != conf.size() || diff.empty()) {
    throw std::invalid_argument("adaptive_weight: channel lengths differ or empty");
  }
  const double vd = population_variance(diff);
  const double vc = population_variance(conf);
  if (vd < epsilon && vc < epsilon) return 0.5;  // both channels degenerate
  return vd / (vd + vc + epsilon);
}

RewardBundle composite_reward(std::vector<double> diff, std::vector<double> conf,
                              std::vector<std::pair<std::string, std::vector<double>>> extras,
                              double epsilon) {
  const std::size_t n = diff.size();
  if (conf.size() != n || n == 0) {
    throw std::invalid_argument("composite_reward: channel lengths differ or empty");
  }
  for (const auto& [name, v] : extras) {
    if (v.size() != n) {
      throw std::invalid_argument("composite_reward: extra channel '" + name +
                                  "' length mismatch");
    }
  }

  RewardBundle b;
  b.epsilon = epsilon;
  b.weight_r = adaptive_weight(diff, conf, epsilon);
  b.composite.assign(n, 0.0);

  if (extras.empty()) {
    b.channel_weights = {b.weight_r, 1.0 - b.weight_r};
    for (std::size_t i = 0; i < n; ++i) {
      b.composite[i] = b.weight_r * diff[i] + (1.0 - b.weight_r) * conf[i];
    }
  } else {
    std::vector<const std::vector<double>*> channels{&diff, &conf};
    for (const auto& [name, v] : extras) channels.push_back(&v);
    std::vector<double> vars(channels.size());
    double total = epsilon;
    bool any = false;
    for (std::size_t k = 0; k < channels.size(); ++k) {
      vars[k] = population_variance(*channels[k]);
      total += vars[k];
      any = any || vars[k] >= epsilon;
    }
    b.channel_weights.resize(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k) {
      // all channels degenerate: split equally, mirroring the two-channel fallback
      b.channel_weights[k] = any ? vars[k] / total : 1.0 / static_cast<double>(channels.size());
    }
    for (std::size_t k = 0; k < channels.size(); ++k) {
      const auto& ch = *channels[k];
      for (std::size_t i = 0; i < n; ++i) b.composite[i] += b.channel_weights[k] * ch[i];
    }
  }

  b.diff = std::move(diff);
  b.conf = std::move(conf);
  b.extras = std::move(extras);
  return b;
}

std::vector<double> normalize_composite(const std::vector<double>& composite) {
  const std::size_t n = composite.size();
  if (n < 2) throw std::invalid_argument("normalize_composite: need length >= 2");
  double mean = 0.0;
  for (double x : composite) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : composite) var += (x - mean) * (x - mean);
  const double std_dev = std::sqrt(var / static_cast<double>(n));
  std::vector<double> out(n, 0.0);
  if (std_dev < 1e-12) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (composite[i] - mean) / std_dev;
  return out;
}

}  // namespace da
