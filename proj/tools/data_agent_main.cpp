// data_agent: dataset generation, closed-loop training, benchmark matrices,
// result reporting and the numerical verification suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "dataagent/bench.hpp"
#include "dataagent/config.hpp"
#include "dataagent/propcheck.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitPropcheck = 4;

std::string default_out() {
  const char* env = std::getenv("DATA_AGENT_OUT");
  return env != nullptr ? env : "./out";
}

da::RunConfig load_config(const std::string& path) {
  if (path.empty()) return da::RunConfig::defaults();
  return da::RunConfig::parse_file(path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw da::IoError("cannot create output dir " + dir + ": " + ec.message());
}

std::string events_jsonl(const da::RunResult& r) {
  std::string out;
  for (const auto& m : r.metrics) {
    json j{{"event", "epoch"},
           {"strategy", r.strategy},
           {"seed", r.seed},
           {"epoch", m.epoch},
           {"selected_count", m.selected_count},
           {"weight_r", m.weight_r},
           {"mean_reward", m.mean_reward},
           {"train_loss", m.train_loss},
           {"test_acc", m.test_accuracy},
           {"train_forwards", m.train_forwards},
           {"score_forwards", m.score_forwards},
           {"agent_forwards", m.agent_forwards}};
    out += j.dump() + "\n";
  }
  return out;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed, bool seed_set, double noise, bool noise_set) {
  da::RunConfig cfg = load_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed_set) cfg.dataset.seed = seed;
  if (noise_set) cfg.dataset.noise_rate = noise;
  if (cfg.dataset.noise_rate < 0.0 || cfg.dataset.noise_rate >= 1.0) {
    throw da::ConfigError("--noise must be in [0, 1)");
  }
  ensure_dir(cfg.output_dir);
  const da::Dataset ds = cfg.make_dataset();
  const std::string path = cfg.output_dir + "/dataset.txt";
  da::save_dataset(ds, path);
  std::cout << "wrote " << path << " (" << ds.size() << " samples, " << ds.dim() << "-d, "
            << ds.class_count << " classes, " << ds.train_ids.size() << " train)\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
              bool seed_set) {
  da::RunConfig cfg = load_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  ensure_dir(cfg.output_dir);
  const da::Dataset ds = cfg.make_dataset();
  const std::uint64_t run_seed = seed_set ? seed : cfg.bench.seeds.front();
  const da::RunResult r = da::run_one(cfg, ds, "agent", run_seed);
  const std::string run_id = "agent-s" + std::to_string(run_seed);
  da::write_file(cfg.output_dir + "/train_metrics.csv",
                 da::metrics_to_csv(run_id, r.strategy, r.seed, r.metrics));
  da::write_file(cfg.output_dir + "/train_events.jsonl", events_jsonl(r));
  std::cout << "final test accuracy " << r.final_accuracy() << ", metrics in " << cfg.output_dir
            << "/train_metrics.csv\n";
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir, int parallel) {
  da::RunConfig cfg = load_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  ensure_dir(cfg.output_dir);
  const da::Dataset ds = cfg.make_dataset();

  std::vector<std::pair<std::string, std::uint64_t>> cells;
  for (const auto& s : cfg.bench.strategies) {
    for (const auto seed : cfg.bench.seeds) cells.emplace_back(s, seed);
  }
  std::vector<da::RunResult> results(cells.size());
  if (parallel > 1) {
    std::vector<std::thread> workers;
    std::size_t stride = static_cast<std::size_t>(parallel);
    for (std::size_t w = 0; w < stride; ++w) {
      workers.emplace_back([&, w]() {
        for (std::size_t i = w; i < cells.size(); i += stride) {
          results[i] = da::run_one(cfg, ds, cells[i].first, cells[i].second);
        }
      });
    }
    for (auto& t : workers) t.join();
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      results[i] = da::run_one(cfg, ds, cells[i].first, cells[i].second);
    }
  }

  for (const auto& r : results) {
    const std::string run_id = r.strategy + "-s" + std::to_string(r.seed);
    da::write_file(cfg.output_dir + "/run_" + r.strategy + "_" + std::to_string(r.seed) + ".csv",
                   da::metrics_to_csv(run_id, r.strategy, r.seed, r.metrics));
  }
  const auto aggs = da::aggregate(results);
  da::write_file(cfg.output_dir + "/aggregate.csv", da::aggregate_to_csv(aggs));
  std::cout << da::format_report(aggs);
  return kExitOk;
}

int cmd_propcheck() {
  const da::PropcheckResult res = da::run_propcheck();
  auto line = [](const char* name, bool ok, const std::string& extra) {
    std::printf("[%s] %s  %s\n", ok ? "PASS" : "FAIL", name, extra.c_str());
  };
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max_err=%.3g rank_corr=%.3f", res.gradient_identity_max_err,
                res.gradient_identity_rank_corr);
  line("prop-1 gradient identity", res.gradient_identity_ok, buf);
  std::snprintf(buf, sizeof(buf), "spearman=%.4f", res.entropy_kl_spearman);
  line("prop-2 entropy/KL correlation", res.entropy_kl_ok, buf);
  std::snprintf(buf, sizeof(buf), "max_rel_err=%.3g", res.finite_difference_max_rel_err);
  line("finite-difference gradients", res.finite_difference_ok, buf);
  return res.all_ok() ? kExitOk : kExitPropcheck;
}

int cmd_report(const std::string& dir) {
  const auto aggs = da::aggregate_from_csv(da::read_file(dir + "/aggregate.csv"));
  std::cout << da::format_report(aggs);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data_agent: closed-loop dynamic data selection trainer"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  double noise = 0.0;
  int parallel = 1;

  auto* gen = app.add_subcommand("gen-data", "generate and save a benchmark dataset");
  gen->add_option("--config", config_path, "config file");
  gen->add_option("--out", out_dir, "output directory");
  auto* gen_seed = gen->add_option("--seed", seed, "dataset seed");
  auto* gen_noise = gen->add_option("--noise", noise, "label flip rate in [0,1)");

  auto* train = app.add_subcommand("train", "run agent-driven training from a config");
  train->add_option("--config", config_path, "config file");
  train->add_option("--out", out_dir, "output directory");
  auto* train_seed = train->add_option("--seed", seed, "run seed");

  auto* bench = app.add_subcommand("bench", "run the strategy x seed benchmark matrix");
  bench->add_option("--config", config_path, "config file");
  bench->add_option("--out", out_dir, "output directory");
  bench->add_option("--parallel", parallel, "number of concurrent cells");

  auto* prop = app.add_subcommand("propcheck", "run the numerical verification suites");

  std::string report_dir = default_out();
  auto* report = app.add_subcommand("report", "print the summary table for a result directory");
  report->add_option("--out", report_dir, "result directory with aggregate.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_data(config_path, out_dir, seed, !gen_seed->empty(), noise,
                          !gen_noise->empty());
    }
    if (train->parsed()) return cmd_train(config_path, out_dir, seed, !train_seed->empty());
    if (bench->parsed()) return cmd_bench(config_path, out_dir, parallel);
    if (prop->parsed()) return cmd_propcheck();
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const da::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const da::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
