#include "dataagent/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace da {

Strategy strategy_from_string(const std::string& name) {
  if (name == "full") return Strategy::Full;
  if (name == "random_epoch") return Strategy::RandomEpoch;
  if (name == "static_loss") return Strategy::StaticLoss;
  if (name == "agent") return Strategy::Agent;
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Full: return "full";
    case Strategy::RandomEpoch: return "random_epoch";
    case Strategy::StaticLoss: return "static_loss";
    case Strategy::Agent: return "agent";
  }
  return "?";
}

std::vector<std::size_t> select_top(const std::vector<double>& actions, double ratio) {
  if (actions.empty()) throw std::invalid_argument("select_top: empty pool");
  if (ratio <= 0.0 || ratio > 1.0) throw std::invalid_argument("select_top: ratio out of (0,1]");
  const auto n = actions.size();
  const auto k = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (actions[a] != actions[b]) return actions[a] > actions[b];
    return a < b;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::size_t> baseline_select(Strategy strategy, std::size_t pool_size, double ratio,
                                         const std::vector<double>& losses, Rng& rng) {
  if (pool_size == 0) throw std::invalid_argument("baseline_select: empty pool");
  const auto k = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(pool_size)));
  switch (strategy) {
    case Strategy::Full: {
      std::vector<std::size_t> all(pool_size);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    case Strategy::RandomEpoch: {
      std::vector<std::size_t> pool(pool_size);
      std::iota(pool.begin(), pool.end(), 0);
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + rng.below(pool_size - i)]);
      }
      pool.resize(k);
      std::sort(pool.begin(), pool.end());
      return pool;
    }
    case Strategy::StaticLoss:
      return select_top(losses, ratio);
    case Strategy::Agent:
      throw std::invalid_argument("baseline_select: agent is not a baseline");
  }
  throw std::invalid_argument("baseline_select: bad strategy");
}

TrainingLoop::TrainingLoop(const Dataset& dataset, Strategy strategy,
                           const ModelConfig& model_cfg, const LoopConfig& loop_cfg,
                           const AgentConfig& agent_cfg, const RewardConfig& reward_cfg)
    : dataset_(dataset),
      strategy_(strategy),
      model_cfg_(model_cfg),
      loop_cfg_(loop_cfg),
      agent_cfg_(agent_cfg),
      reward_cfg_(reward_cfg),
      pool_features_(dataset.gather_features(dataset.train_ids)),
      pool_labels_(dataset.gather_labels(dataset.train_ids)),
      test_features_(dataset.gather_features(dataset.test_ids)),
      test_labels_(dataset.gather_labels(dataset.test_ids)),
      model_(dataset.dim(), model_cfg.hidden_dims, dataset.class_count,
             mix_seed(loop_cfg.seed, 1)),
      agent_(model_.feature_dim(), agent_cfg.hidden, mix_seed(loop_cfg.seed, 2),
             agent_cfg.log_std_init),
      traj_buffers_(dataset.train_ids.size()) {
  if (loop_cfg.ratio <= 0.0 || loop_cfg.ratio > 1.0) {
    throw std::invalid_argument("LoopConfig: ratio out of (0,1]");
  }
  if (loop_cfg.warmup_epochs >= loop_cfg.epochs) {
    throw std::invalid_argument("LoopConfig: warmup_epochs must be < epochs");
  }
  if (loop_cfg.score_period < 1) throw std::invalid_argument("LoopConfig: score_period >= 1");
}

ScoreResult TrainingLoop::score_pool(std::size_t round_index) {
  ScoreResult r;
  r.record = model_.forward_pool(pool_features_, pool_labels_);
  score_forwards_ += pool_features_.rows;

  std::vector<std::pair<std::string, std::vector<double>>> extras;
  if (reward_cfg_.use_consistency && dataset_.consistency.has_value()) {
    std::vector<double> cons(dataset_.train_ids.size());
    for (std::size_t i = 0; i < cons.size(); ++i) {
      cons[i] = (*dataset_.consistency)[dataset_.train_ids[i]];
    }
    extras.emplace_back("consistency", std::move(cons));
  }
  r.bundle = composite_reward(difficulty_reward(r.record), uncertainty_reward(r.record),
                              std::move(extras), reward_cfg_.epsilon);
  r.reward_norm = normalize_composite(r.bundle.composite);

  double std_out = 0.0;
  agent_.policy_forward(r.record.features, r.actions, std_out, r.values);
  agent_forwards_ += r.record.features.rows;
  r.raw_actions.resize(r.actions.size());
  r.logprobs.resize(r.actions.size());
  Rng act_rng(mix_seed(loop_cfg_.seed, 4, round_index));
  for (std::size_t i = 0; i < r.actions.size(); ++i) {
    const ActionSample s = sample_action(r.actions[i], std_out, act_rng);
    r.raw_actions[i] = s.raw;
    r.logprobs[i] = s.logprob;
    r.actions[i] = s.action;
  }
  return r;
}

void TrainingLoop::maybe_update_agent() {
  if (round_count_ % loop_cfg_.agent_update_period != 0) return;
  std::vector<Trajectory> trajs;
  const std::size_t w = loop_cfg_.horizon_w;
  for (std::size_t pos = 0; pos < traj_buffers_.size(); ++pos) {
    auto& buf = traj_buffers_[pos];
    while (buf.size() >= w) {
      Trajectory t;
      t.sample_id = pos;
      t.transitions.assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(w));
      buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(w));
      trajs.push_back(std::move(t));
    }
  }
  if (trajs.empty()) return;
  const PpoStats stats =
      agent_.update(trajs, agent_cfg_.ppo, mix_seed(loop_cfg_.seed, 5, update_count_));
  agent_forwards_ += stats.forward_count;
  ++update_count_;
}

MetricsRecord TrainingLoop::run_epoch(std::size_t epoch) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = pool_features_.rows;
  const bool warmup = epoch < loop_cfg_.warmup_epochs;
  const bool scoring_epoch =
      !warmup && (epoch - loop_cfg_.warmup_epochs) % loop_cfg_.score_period == 0;

  std::vector<std::size_t> selected;
  if (warmup || strategy_ == Strategy::Full) {
    selected.resize(n);
    std::iota(selected.begin(), selected.end(), 0);
  } else {
    switch (strategy_) {
      case Strategy::RandomEpoch: {
        Rng rng(mix_seed(loop_cfg_.seed, 6, epoch));
        selected = baseline_select(Strategy::RandomEpoch, n, loop_cfg_.ratio, {}, rng);
        break;
      }
      case Strategy::StaticLoss: {
        if (scoring_epoch) {
          ForwardRecord rec = model_.forward_pool(pool_features_, pool_labels_);
          score_forwards_ += n;
          last_losses_ = rec.losses;
        }
        Rng unused(0);
        selected = baseline_select(Strategy::StaticLoss, n, loop_cfg_.ratio, last_losses_, unused);
        break;
      }
      case Strategy::Agent: {
        if (scoring_epoch) {
          ScoreResult r = score_pool(round_count_);
          last_actions_ = r.actions;
          last_weight_r_ = r.bundle.weight_r;
          last_mean_reward_ =
              std::accumulate(r.bundle.composite.begin(), r.bundle.composite.end(), 0.0) /
              static_cast<double>(n);
          // Only the selected samples' transitions are credited. The reward is
          // action-independent, so an unconditional buffer would make the
          // expected actor gradient exactly zero (policy-gradient theorem with
          // a state-only advantage). Conditioning the update batch on the
          // action having made the top-k is what pushes the mean action up for
          // persistently rewarding states and down for the rest.
          selected = select_top(last_actions_, loop_cfg_.ratio);
          for (std::size_t i : selected) {
            Transition tr;
            const double* s = r.record.features.row(i);
            tr.state.assign(s, s + r.record.features.cols);
            tr.action = r.actions[i];
            tr.raw_action = r.raw_actions[i];
            tr.logprob_old = r.logprobs[i];
            tr.reward = r.reward_norm[i];
            tr.value_old = r.values[i];
            traj_buffers_[i].push_back(std::move(tr));
          }
          ++round_count_;
          maybe_update_agent();
        } else {
          selected = select_top(last_actions_, loop_cfg_.ratio);
        }
        break;
      }
      default: break;
    }
  }

  decisions_.push_back({epoch, selected, last_actions_, last_weight_r_});

  // seeded mini-batch training on exactly the selected positions
  std::vector<std::size_t> order = selected;
  Rng shuffle_rng(mix_seed(loop_cfg_.seed, 3, epoch));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[shuffle_rng.below(i)]);
  }
  const SgdConfig sgd{model_cfg_.lr, model_cfg_.momentum};
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < order.size(); start += model_cfg_.batch) {
    const std::size_t b = std::min(model_cfg_.batch, order.size() - start);
    std::vector<std::size_t> batch_pos(order.begin() + static_cast<std::ptrdiff_t>(start),
                                       order.begin() + static_cast<std::ptrdiff_t>(start + b));
    Matrix bf(b, pool_features_.cols);
    std::vector<std::size_t> bl(b);
    for (std::size_t i = 0; i < b; ++i) {
      const double* src = pool_features_.row(batch_pos[i]);
      std::copy(src, src + pool_features_.cols, bf.row(i));
      bl[i] = pool_labels_[batch_pos[i]];
    }
    if (on_train_batch) on_train_batch(epoch, batch_pos);
    loss_sum += model_.train_step(bf, bl, sgd) * static_cast<double>(b);
  }
  train_forwards_ += order.size();

  MetricsRecord m;
  m.epoch = epoch;
  m.selected_count = selected.size();
  m.weight_r = last_weight_r_;
  m.mean_reward = last_mean_reward_;
  m.train_loss = loss_sum / static_cast<double>(order.size());
  m.test_accuracy = model_.evaluate(test_features_, test_labels_);
  m.train_forwards = train_forwards_;
  m.score_forwards = score_forwards_;
  m.agent_forwards = agent_forwards_;
  wallclock_ms_ += static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                  std::chrono::steady_clock::now() - t0)
                                                  .count());
  m.wallclock_ms = wallclock_ms_;
  return m;
}

std::vector<MetricsRecord> TrainingLoop::run() {
  std::vector<MetricsRecord> out;
  out.reserve(loop_cfg_.epochs);
  for (std::size_t e = 0; e < loop_cfg_.epochs; ++e) out.push_back(run_epoch(e));
  return out;
}

std::vector<MetricsRecord> run_training(const Dataset& dataset, Strategy strategy,
                                        const ModelConfig& model_cfg, const LoopConfig& loop_cfg,
                                        const AgentConfig& agent_cfg,
                                        const RewardConfig& reward_cfg) {
  TrainingLoop loop(dataset, strategy, model_cfg, loop_cfg, agent_cfg, reward_cfg);
  return loop.run();
}

}  // namespace da
