#pragma once

#include <cstdint>
#include <vector>

#include "dataagent/nn.hpp"
#include "dataagent/rng.hpp"

namespace da {

struct PpoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_eps = 0.2;
  std::size_t update_epochs = 4;
  std::size_t minibatch = 256;
  double agent_lr = 3e-4;
  double value_coeff = 0.5;
};

// One per-sample step: state seen at a scoring round, the action taken, the
// collection-time log-probability and value, and the composite reward.
struct Transition {
  std::vector<double> state;
  double action = 0.0;      // clamped to [0, 1]
  double raw_action = 0.0;  // pre-clamp Gaussian draw; the point the ratio is evaluated at
  double logprob_old = 0.0;
  double reward = 0.0;
  double value_old = 0.0;
};

struct Trajectory {
  std::size_t sample_id = 0;
  std::vector<Transition> transitions;
};

struct PpoStats {
  double mean_actor_loss = 0.0;
  double mean_critic_loss = 0.0;
  double mean_ratio = 1.0;
  std::size_t forward_count = 0;  // states pushed through the agent during the update
};

// Actor-critic over trainee features: shared tanh trunk, sigmoid actor head
// emitting the Gaussian mean in (0,1), identity critic head, one shared
// learnable log-std (floored at -5).
class ActorCritic {
 public:
  ActorCritic(std::size_t state_dim, std::size_t hidden, std::uint64_t seed,
              double log_std_init = -1.0);

  // per-state action mean and value estimate, shared std; no mutation
  void policy_forward(const Matrix& states, std::vector<double>& mean_out,
                      double& std_out, std::vector<double>& value_out);

  double action_std() const;
  double log_std() const { return log_std_; }
  double checksum() const;
  std::size_t state_dim() const { return state_dim_; }

  PpoStats update(const std::vector<Trajectory>& trajectories, const PpoConfig& cfg,
                  std::uint64_t seed);

  Network trunk;
  DenseLayer actor_head;
  DenseLayer critic_head;

 private:
  double log_std_;
  double log_std_grad_ = 0.0;
  std::size_t state_dim_;
};

// u ~ Normal(mean, std) clamped to [0,1]; logprob is the density at the
// pre-clamp u. deterministic=true short-circuits to u = mean.
struct ActionSample {
  double action;
  double raw;
  double logprob;
};
ActionSample sample_action(double mean, double std, Rng& rng, bool deterministic = false);

double gaussian_logprob(double x, double mean, double std);

// delta = r + gamma * V(s') - V(s)
double td_residual(double reward, double value_s, double value_s_next, double gamma);

// values carries one trailing bootstrap element (0 at episode end)
std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        double gamma, double lambda);

// clipped surrogate min(rho*A, clip(rho, 1-eps, 1+eps)*A); the optimized loss
// negates the minibatch mean
double actor_surrogate(double logprob_new, double logprob_old, double advantage,
                       double clip_eps);

// (V_new - (advantage + V_old))^2
double critic_loss(double value_new, double advantage, double value_old);

}  // namespace da
