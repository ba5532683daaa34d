#include <benchmark/benchmark.h>

#include "dataagent/ppo.hpp"
#include "dataagent/reward.hpp"
#include "dataagent/selection.hpp"
#include "dataagent/target_model.hpp"

namespace {

using namespace da;

Matrix random_features(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, d);
  for (double& v : m.data) v = rng.uniform(-2.0, 2.0);
  return m;
}

std::vector<std::size_t> random_labels(std::size_t n, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> l(n);
  for (auto& y : l) y = rng.below(classes);
  return l;
}

void BM_forward_pool(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  TargetModel model(2, {64, 64}, 8, 1);
  const Matrix x = random_features(n, 2, 2);
  const auto labels = random_labels(n, 8, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward_pool(x, labels));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_forward_pool)->Arg(1000)->Arg(8000);

void BM_train_step(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  TargetModel model(2, {64, 64}, 8, 1);
  const Matrix x = random_features(b, 2, 2);
  const auto labels = random_labels(b, 8, 3);
  const SgdConfig sgd{0.1, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.train_step(x, labels, sgd));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(b));
}
BENCHMARK(BM_train_step)->Arg(64)->Arg(256);

void BM_composite_reward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  TargetModel model(2, {64, 64}, 8, 1);
  const Matrix x = random_features(n, 2, 2);
  const auto labels = random_labels(n, 8, 3);
  const ForwardRecord rec = model.forward_pool(x, labels);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        composite_reward(difficulty_reward(rec), uncertainty_reward(rec), {}, 1e-8));
  }
}
BENCHMARK(BM_composite_reward)->Arg(8000);

void BM_ppo_update(benchmark::State& state) {
  const auto n_traj = static_cast<std::size_t>(state.range(0));
  ActorCritic agent(64, 64, 5);
  Rng rng(6);
  std::vector<Trajectory> trajs(n_traj);
  for (std::size_t i = 0; i < n_traj; ++i) {
    trajs[i].sample_id = i;
    for (int t = 0; t < 4; ++t) {
      Transition tr;
      tr.state.resize(64);
      for (double& v : tr.state) v = rng.uniform(-1.0, 1.0);
      tr.raw_action = rng.uniform(0.0, 1.0);
      tr.action = tr.raw_action;
      tr.logprob_old = gaussian_logprob(tr.raw_action, 0.5, 0.37);
      tr.reward = rng.uniform(-1.0, 1.0);
      tr.value_old = rng.uniform(-0.5, 0.5);
      trajs[i].transitions.push_back(tr);
    }
  }
  const PpoConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.update(trajs, cfg, seed++));
  }
}
BENCHMARK(BM_ppo_update)->Arg(250)->Arg(1000);

void BM_select_top(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::vector<double> actions(n);
  for (double& a : actions) a = rng.uniform(0.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_top(actions, 0.5));
  }
}
BENCHMARK(BM_select_top)->Arg(8000);

}  // namespace

BENCHMARK_MAIN();
