#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "dataagent/bench.hpp"
#include "dataagent/dataset.hpp"

namespace fs = std::filesystem;
using namespace da;

namespace {

std::string bin() {
  const char* b = std::getenv("DATA_AGENT_BIN");
  REQUIRE(b != nullptr);
  return b;
}

struct CmdResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string log =
      (fs::temp_directory_path() / ("da_cli_" + std::to_string(counter++) + ".log")).string();
  const std::string cmd = bin() + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult r;
#ifdef _WIN32
  r.code = status;
#else
  r.code = WEXITSTATUS(status);
#endif
  std::ifstream in(log);
  r.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  std::remove(log.c_str());
  return r;
}

fs::path fresh_dir(const char* name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// writes a small dataset plus a config pointing at it, so CLI runs stay fast
std::string small_run_config(const fs::path& dir, const std::string& extra = "") {
  MixtureSpec spec;
  spec.seed = 21;
  spec.components.push_back({0, {-2.0, 0.0}, 0.6, 80, 20});
  spec.components.push_back({1, {2.0, 0.0}, 0.6, 80, 20});
  spec.components.push_back({2, {0.0, 2.0}, 0.6, 80, 20});
  const Dataset ds = gen_mixture(spec);
  const std::string data_path = (dir / "small.txt").string();
  save_dataset(ds, data_path);
  const std::string cfg_path = (dir / "run.ini").string();
  std::ofstream cfg(cfg_path);
  cfg << "dataset.generator = file\n"
      << "dataset.path = " << data_path << "\n"
      << "model.hidden_dims = 16\n"
      << "model.batch = 32\n"
      << "loop.epochs = 4\n"
      << extra;
  return cfg_path;
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("").code == 2);              // a subcommand is required
  CHECK(run_cli("frobnicate").code == 2);    // unknown subcommand
  CHECK(run_cli("train --bogus 1").code == 2);
}

TEST_CASE("gen-data writes a loadable dataset with the requested noise") {
  const fs::path dir = fresh_dir("da_cli_gen");
  const CmdResult r = run_cli("gen-data --out " + dir.string() + " --seed 5 --noise 0.2");
  CHECK(r.code == 0);
  CHECK(r.output.find("dataset.txt") != std::string::npos);

  const Dataset noisy = load_dataset((dir / "dataset.txt").string());
  const Dataset clean = gen_mixture(default_benchmark_spec(5));
  CHECK(noisy.size() == clean.size());
  CHECK(noisy.features == clean.features);
  CHECK(noisy.consistency.has_value());
  std::size_t flips = 0;
  for (std::size_t i = 0; i < noisy.size(); ++i) flips += noisy.labels[i] != clean.labels[i];
  CHECK(flips == 1600);  // round(0.2 * 8000) train flips, test labels untouched
  fs::remove_all(dir);
}

TEST_CASE("gen-data rejects out-of-range noise") {
  const fs::path dir = fresh_dir("da_cli_gen_bad");
  CHECK(run_cli("gen-data --out " + dir.string() + " --noise 1.0").code == 2);
  fs::remove_all(dir);
}

TEST_CASE("config problems exit 2, io problems exit 3") {
  const fs::path dir = fresh_dir("da_cli_cfgerr");
  CHECK(run_cli("train --config /no/such/file.ini").code == 3);
  const std::string bad_cfg = (dir / "bad.ini").string();
  std::ofstream(bad_cfg) << "loop.episodes = 5\n";
  const CmdResult r = run_cli("train --config " + bad_cfg);
  CHECK(r.code == 2);
  CHECK(r.output.find("loop.episodes") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("train writes metrics and events; reruns are byte-identical") {
  const fs::path dir = fresh_dir("da_cli_train");
  const std::string cfg = small_run_config(dir);
  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  CHECK(run_cli("train --config " + cfg + " --out " + out_a.string() + " --seed 3").code == 0);
  CHECK(run_cli("train --config " + cfg + " --out " + out_b.string() + " --seed 3").code == 0);

  const std::string csv_a = read_file((out_a / "train_metrics.csv").string());
  CHECK(csv_a == read_file((out_b / "train_metrics.csv").string()));
  CHECK(csv_a.find(kMetricsCsvHeader) == 0);
  CHECK(csv_a.find("agent-s3,agent,3,0,") != std::string::npos);
  const std::string events = read_file((out_a / "train_events.jsonl").string());
  CHECK(events.find("\"event\":\"epoch\"") != std::string::npos);

  const fs::path out_c = dir / "c";
  CHECK(run_cli("train --config " + cfg + " --out " + out_c.string() + " --seed 4").code == 0);
  CHECK(csv_a != read_file((out_c / "train_metrics.csv").string()));  // seed matters
  fs::remove_all(dir);
}

TEST_CASE("bench produces one csv per cell plus the aggregate, then report reads it") {
  const fs::path dir = fresh_dir("da_cli_bench");
  const std::string cfg = small_run_config(
      dir, "bench.strategies = full, random_epoch\nbench.seeds = 0, 1, 2\n");
  const fs::path out = dir / "out";
  const CmdResult r = run_cli("bench --config " + cfg + " --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.output.find("full") != std::string::npos);
  CHECK(r.output.find("random_epoch") != std::string::npos);
  for (const char* s : {"full", "random_epoch"}) {
    for (int seed = 0; seed < 3; ++seed) {
      CHECK(fs::exists(out / ("run_" + std::string(s) + "_" + std::to_string(seed) + ".csv")));
    }
  }
  CHECK(fs::exists(out / "aggregate.csv"));

  const CmdResult rep = run_cli("report --out " + out.string());
  CHECK(rep.code == 0);
  CHECK(rep.output.find("full") != std::string::npos);

  // --parallel must not change the results
  const fs::path out_p = dir / "outp";
  CHECK(run_cli("bench --config " + cfg + " --out " + out_p.string() + " --parallel 3").code == 0);
  CHECK(read_file((out / "aggregate.csv").string()) ==
        read_file((out_p / "aggregate.csv").string()));
  CHECK(read_file((out / "run_full_1.csv").string()) ==
        read_file((out_p / "run_full_1.csv").string()));
  fs::remove_all(dir);
}

TEST_CASE("report on a corrupted aggregate exits 3") {
  const fs::path dir = fresh_dir("da_cli_report_bad");
  std::ofstream((dir / "aggregate.csv").string()) << "strategy,oops\n";
  CHECK(run_cli("report --out " + dir.string()).code == 3);
  CHECK(run_cli("report --out /no/such/dir").code == 3);
  fs::remove_all(dir);
}

TEST_CASE("propcheck prints a verdict per suite and exits 0") {
  const CmdResult r = run_cli("propcheck");
  CHECK(r.code == 0);
  CHECK(r.output.find("[PASS] prop-1 gradient identity") != std::string::npos);
  CHECK(r.output.find("[PASS] prop-2 entropy/KL correlation") != std::string::npos);
  CHECK(r.output.find("[PASS] finite-difference gradients") != std::string::npos);
  CHECK(r.output.find("[FAIL]") == std::string::npos);
}
