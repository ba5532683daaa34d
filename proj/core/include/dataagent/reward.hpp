#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dataagent/target_model.hpp"

namespace da {

// Per-sample reward channels plus the adaptive weight and composite reward.
struct RewardBundle {
  std::vector<double> diff;   // loss-based difficulty channel
  std::vector<double> conf;   // entropy-based uncertainty channel
  std::vector<std::pair<std::string, std::vector<double>>> extras;
  double weight_r = 0.5;      // weight on diff in the two-channel case
  std::vector<double> channel_weights;  // all channels, diff/conf/extras order
  std::vector<double> composite;
  double epsilon = 1e-8;
};

// the per-sample losses, verbatim
std::vector<double> difficulty_reward(const ForwardRecord& record);

// predictive entropy per sample, 0*log 0 treated as 0
std::vector<double> uncertainty_reward(const ForwardRecord& record);

// population variance
double population_variance(const std::vector<double>& v);

// Var(diff) / (Var(diff) + Var(conf) + eps); 0.5 when both variances < eps
double adaptive_weight(const std::vector<double>& diff, const std::vector<double>& conf,
                       double epsilon = 1e-8);

// Two channels: r*diff + (1-r)*conf. With extras, every channel gets a
// variance-proportional weight w_k = Var(R_k) / (sum_j Var(R_j) + eps).
RewardBundle composite_reward(
    std::vector<double> diff, std::vector<double> conf,
    std::vector<std::pair<std::string, std::vector<double>>> extras = {},
    double epsilon = 1e-8);

// z-score to mean 0 / population std 1; all zeros when std < 1e-12
std::vector<double> normalize_composite(const std::vector<double>& composite);

}  // namespace da
