#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dataagent/dataset.hpp"
#include "dataagent/ppo.hpp"
#include "dataagent/reward.hpp"
#include "dataagent/target_model.hpp"

namespace da {

enum class Strategy { Full, RandomEpoch, StaticLoss, Agent };
Strategy strategy_from_string(const std::string& name);
std::string strategy_name(Strategy s);

struct ModelConfig {
  std::vector<std::size_t> hidden_dims{64, 64};
  double lr = 0.05;
  double momentum = 0.0;
  std::size_t batch = 64;
};

struct LoopConfig {
  double ratio = 0.5;             // selection ratio, in (0, 1]
  std::size_t epochs = 30;
  std::size_t warmup_epochs = 1;  // full-data epochs before the agent acts
  std::size_t score_period = 1;   // pool re-scoring cadence, in epochs
  std::size_t agent_update_period = 4;  // in scoring rounds
  std::size_t horizon_w = 4;      // trajectory window length
  std::uint64_t seed = 0;
};

struct AgentConfig {
  PpoConfig ppo;
  std::size_t hidden = 64;
  double log_std_init = -1.0;
};

struct RewardConfig {
  double epsilon = 1e-8;
  bool use_consistency = false;
};

struct SelectionDecision {
  std::size_t epoch = 0;
  std::vector<std::size_t> selected_ids;  // pool positions, ascending
  std::vector<double> actions;            // one per pool sample
  double weight_r = 0.0;
};

struct MetricsRecord {
  std::size_t epoch = 0;
  std::size_t selected_count = 0;
  double weight_r = 0.0;
  double mean_reward = 0.0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  std::uint64_t train_forwards = 0;  // cumulative counters
  std::uint64_t score_forwards = 0;
  std::uint64_t agent_forwards = 0;
  std::uint64_t wallclock_ms = 0;
};

// top-k by action weight at the given ratio; ties toward the lower index,
// result sorted ascending
std::vector<std::size_t> select_top(const std::vector<double>& actions, double ratio);

std::vector<std::size_t> baseline_select(Strategy strategy, std::size_t pool_size, double ratio,
                                         const std::vector<double>& losses, Rng& rng);

// One scoring round, assembled for tests and the loop itself.
struct ScoreResult {
  ForwardRecord record;
  RewardBundle bundle;
  std::vector<double> reward_norm;  // z-scored composite, the agent's reward
  std::vector<double> actions;
  std::vector<double> raw_actions;
  std::vector<double> logprobs;
  std::vector<double> values;
};

// Closed-loop trainer: score the pool, act, select, train the trainee,
// periodically update the agent.
class TrainingLoop {
 public:
  TrainingLoop(const Dataset& dataset, Strategy strategy, const ModelConfig& model_cfg,
               const LoopConfig& loop_cfg, const AgentConfig& agent_cfg,
               const RewardConfig& reward_cfg);

  std::vector<MetricsRecord> run();
  MetricsRecord run_epoch(std::size_t epoch);

  ScoreResult score_pool(std::size_t round_index);

  const std::vector<SelectionDecision>& decisions() const { return decisions_; }
  TargetModel& model() { return model_; }
  ActorCritic& agent() { return agent_; }

  // observer for audit tests; called with the pool positions of every
  // training batch
  std::function<void(std::size_t epoch, const std::vector<std::size_t>&)> on_train_batch;

 private:
  void maybe_update_agent();

  const Dataset& dataset_;
  Strategy strategy_;
  ModelConfig model_cfg_;
  LoopConfig loop_cfg_;
  AgentConfig agent_cfg_;
  RewardConfig reward_cfg_;

  Matrix pool_features_;
  std::vector<std::size_t> pool_labels_;
  Matrix test_features_;
  std::vector<std::size_t> test_labels_;

  TargetModel model_;
  ActorCritic agent_;

  std::vector<std::vector<Transition>> traj_buffers_;  // one per pool position
  std::vector<double> last_actions_;
  std::vector<double> last_losses_;
  double last_weight_r_ = 0.0;
  double last_mean_reward_ = 0.0;
  std::size_t round_count_ = 0;
  std::size_t update_count_ = 0;

  std::uint64_t train_forwards_ = 0;
  std::uint64_t score_forwards_ = 0;
  std::uint64_t agent_forwards_ = 0;
  std::uint64_t wallclock_ms_ = 0;

  std::vector<SelectionDecision> decisions_;
};

std::vector<MetricsRecord> run_training(const Dataset& dataset, Strategy strategy,
                                        const ModelConfig& model_cfg, const LoopConfig& loop_cfg,
                                        const AgentConfig& agent_cfg,
                                        const RewardConfig& reward_cfg);

}  // namespace da
