#include "dataagent/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace da {

namespace {
constexpr double kLogStdFloor = -5.0;
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)
}  // namespace

ActorCritic::ActorCritic(std::size_t state_dim, std::size_t hidden, std::uint64_t seed,
                         double log_std_init)
    : log_std_(std::max(log_std_init, kLogStdFloor)), state_dim_(state_dim) {
  trunk.emplace_back(state_dim, hidden, Activation::Tanh, mix_seed(seed, 0));
  trunk.emplace_back(hidden, hidden, Activation::Tanh, mix_seed(seed, 1));
  actor_head = DenseLayer(hidden, 1, Activation::Sigmoid, mix_seed(seed, 2));
  critic_head = DenseLayer(hidden, 1, Activation::Identity, mix_seed(seed, 3));
}

void ActorCritic::policy_forward(const Matrix& states, std::vector<double>& mean_out,
                                 double& std_out, std::vector<double>& value_out) {
  if (states.cols != state_dim_) {
    throw std::invalid_argument("policy_forward: state width " + std::to_string(states.cols) +
                                " != " + std::to_string(state_dim_));
  }
  Matrix phi = network_forward(trunk, states);
  Matrix mu = actor_head.forward(phi);
  Matrix v = critic_head.forward(phi);
  mean_out = mu.data;
  value_out = v.data;
  std_out = action_std();
}

double ActorCritic::action_std() const { return std::exp(std::max(log_std_, kLogStdFloor)); }

double ActorCritic::checksum() const {
  double s = network_checksum(trunk) + log_std_;
  for (const auto* layer : {&actor_head, &critic_head}) {
    for (double v : layer->weight.data) s += v;
    for (double v : layer->bias) s += v;
  }
  return s;
}

ActionSample sample_action(double mean, double std, Rng& rng, bool deterministic) {
  ActionSample s;
  s.raw = deterministic ? mean : rng.normal(mean, std);
  s.action = std::clamp(s.raw, 0.0, 1.0);
  s.logprob = gaussian_logprob(s.raw, mean, std);
  return s;
}

double gaussian_logprob(double x, double mean, double std) {
  const double d = (x - mean) / std;
  return -0.5 * d * d - std::log(std) - kHalfLog2Pi;
}

double td_residual(double reward, double value_s, double value_s_next, double gamma) {
  return reward + gamma * value_s_next - value_s;
}

std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        double gamma, double lambda) {
  if (values.size() != rewards.size() + 1) {
    throw std::invalid_argument("gae: values must have exactly one more element than rewards");
  }
  const std::size_t t_len = rewards.size();
  std::vector<double> adv(t_len, 0.0);
  double acc = 0.0;
  for (std::size_t i = t_len; i-- > 0;) {
    const double delta = td_residual(rewards[i], values[i], values[i + 1], gamma);
    acc = delta + gamma * lambda * acc;
    adv[i] = acc;
  }
  return adv;
}

double actor_surrogate(double logprob_new, double logprob_old, double advantage,
                       double clip_eps) {
  const double rho = std::exp(logprob_new - logprob_old);
  const double clipped = std::clamp(rho, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(rho * advantage, clipped * advantage);
}

double critic_loss(double value_new, double advantage, double value_old) {
  const double resid = value_new - (advantage + value_old);
  return resid * resid;
}

PpoStats ActorCritic::update(const std::vector<Trajectory>& trajectories, const PpoConfig& cfg,
                             std::uint64_t seed) {
  if (trajectories.empty()) throw std::invalid_argument("ppo update: empty trajectory set");

  // flatten transitions, computing GAE per trajectory with terminal bootstrap 0
  struct Item {
    const Transition* tr;
    double adv_raw;
    double adv_norm;
    double target;  // adv_raw + value_old
  };
  std::vector<Item> items;
  for (const auto& traj : trajectories) {
    if (traj.transitions.empty()) {
      throw std::invalid_argument("ppo update: empty trajectory");
    }
    std::vector<double> rewards, values;
    for (const auto& tr : traj.transitions) {
      rewards.push_back(tr.reward);
      values.push_back(tr.value_old);
    }
    values.push_back(0.0);
    std::vector<double> adv = gae(rewards, values, cfg.gamma, cfg.lambda);
    for (std::size_t t = 0; t < traj.transitions.size(); ++t) {
      const Transition* tr = &traj.transitions[t];
      items.push_back({tr, adv[t], 0.0, adv[t] + tr->value_old});
    }
  }

  // z-normalize advantages over the whole batch
  {
    const std::size_t n = items.size();
    double mean = 0.0;
    for (const auto& it : items) mean += it.adv_raw;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& it : items) var += (it.adv_raw - mean) * (it.adv_raw - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (auto& it : items) it.adv_norm = sd < 1e-12 ? 0.0 : (it.adv_raw - mean) / sd;
  }

  const std::size_t n = items.size();
  const std::size_t state_d = state_dim_;
  const SgdConfig sgd{cfg.agent_lr, 0.0};
  PpoStats stats;
  double loss_actor_sum = 0.0, loss_critic_sum = 0.0, ratio_sum = 0.0;
  std::size_t count = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.update_epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(seed, 7, epoch));
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    for (std::size_t start = 0; start < n; start += cfg.minibatch) {
      const std::size_t b = std::min(cfg.minibatch, n - start);
      Matrix states(b, state_d);
      for (std::size_t i = 0; i < b; ++i) {
        const auto& st = items[order[start + i]].tr->state;
        std::copy(st.begin(), st.end(), states.row(i));
      }
      Matrix phi = network_forward(trunk, states);
      Matrix mu = actor_head.forward(phi);
      Matrix val = critic_head.forward(phi);

      const double sigma = action_std();
      Matrix grad_mu(b, 1);
      Matrix grad_v(b, 1);
      double surr_sum = 0.0, crit_sum = 0.0;
      const double inv_b = 1.0 / static_cast<double>(b);
      for (std::size_t i = 0; i < b; ++i) {
        const Item& it = items[order[start + i]];
        const double u = it.tr->raw_action;
        const double m = mu.data[i];
        const double lpn = gaussian_logprob(u, m, sigma);
        const double rho = std::exp(lpn - it.tr->logprob_old);
        const double adv = it.adv_norm;
        const double clipped = std::clamp(rho, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
        const double s_unclipped = rho * adv;
        const double s_clipped = clipped * adv;
        surr_sum += std::min(s_unclipped, s_clipped);
        ratio_sum += rho;

        // the clipped branch has zero derivative once it is the active minimum
        const double dsurr_drho = s_unclipped <= s_clipped ? adv : 0.0;
        const double dloss_dlpn = -inv_b * dsurr_drho * rho;
        const double d = u - m;
        grad_mu.data[i] = dloss_dlpn * (d / (sigma * sigma));  // d lpn / d mu = (u-mu)/sigma^2
        log_std_grad_ += dloss_dlpn * (d * d / (sigma * sigma) - 1.0);

        const double resid = val.data[i] - it.target;
        crit_sum += resid * resid;
        grad_v.data[i] = cfg.value_coeff * 2.0 * resid * inv_b;
      }
      loss_actor_sum += -surr_sum * inv_b;
      loss_critic_sum += crit_sum * inv_b;
      count += b;
      stats.forward_count += b;

      Matrix grad_phi = actor_head.backward(grad_mu);
      Matrix grad_phi_v = critic_head.backward(grad_v);
      for (std::size_t i = 0; i < grad_phi.data.size(); ++i) grad_phi.data[i] += grad_phi_v.data[i];
      network_backward(trunk, grad_phi);

      actor_head.sgd_step(sgd);
      critic_head.sgd_step(sgd);
      network_sgd_step(trunk, sgd);
      log_std_ = std::max(log_std_ - cfg.agent_lr * log_std_grad_, kLogStdFloor);
      log_std_grad_ = 0.0;
    }
  }

  const double passes = static_cast<double>(cfg.update_epochs) *
                        std::ceil(static_cast<double>(n) / static_cast<double>(cfg.minibatch));
  stats.mean_actor_loss = loss_actor_sum / passes;
  stats.mean_critic_loss = loss_critic_sum / passes;
  stats.mean_ratio = ratio_sum / static_cast<double>(count);
  return stats;
}

}  // namespace da
