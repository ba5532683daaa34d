#include "dataagent/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace da {

const char* kMetricsCsvHeader =
    "run_id,strategy,seed,epoch,selected_count,weight_r,mean_reward,train_loss,test_acc,"
    "train_forwards,score_forwards,agent_forwards,wallclock_ms";

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

std::string metrics_to_csv(const std::string& run_id, const std::string& strategy,
                           std::uint64_t seed, const std::vector<MetricsRecord>& metrics) {
  std::ostringstream out;
  out << kMetricsCsvHeader << '\n';
  for (const auto& m : metrics) {
    // wallclock_ms is serialized as 0 so reruns are byte-identical
    out << run_id << ',' << strategy << ',' << seed << ',' << m.epoch << ','
        << m.selected_count << ',' << fmt(m.weight_r) << ',' << fmt(m.mean_reward) << ','
        << fmt(m.train_loss) << ',' << fmt(m.test_accuracy) << ',' << m.train_forwards << ','
        << m.score_forwards << ',' << m.agent_forwards << ',' << 0 << '\n';
  }
  return out.str();
}

RunResult run_one(const RunConfig& cfg, const Dataset& dataset, const std::string& strategy,
                  std::uint64_t seed) {
  LoopConfig loop = cfg.loop;
  loop.seed = seed;
  RunResult r;
  r.strategy = strategy;
  r.seed = seed;
  r.metrics = run_training(dataset, strategy_from_string(strategy), cfg.model, loop, cfg.agent,
                           cfg.reward);
  return r;
}

std::vector<RunResult> run_bench(const RunConfig& cfg, const Dataset& dataset) {
  std::vector<RunResult> out;
  for (const auto& strategy : cfg.bench.strategies) {
    for (const auto seed : cfg.bench.seeds) {
      out.push_back(run_one(cfg, dataset, strategy, seed));
    }
  }
  return out;
}

std::vector<StrategyAggregate> aggregate(const std::vector<RunResult>& results) {
  std::vector<StrategyAggregate> aggs;
  for (const auto& r : results) {
    StrategyAggregate* agg = nullptr;
    for (auto& a : aggs) {
      if (a.strategy == r.strategy) agg = &a;
    }
    if (agg == nullptr) {
      aggs.push_back({r.strategy, 0, 0, 0, 0, 0});
      agg = &aggs.back();
    }
    ++agg->runs;
  }
  for (auto& a : aggs) {
    std::vector<double> accs, train_f, total_f;
    for (const auto& r : results) {
      if (r.strategy != a.strategy) continue;
      accs.push_back(r.final_accuracy());
      train_f.push_back(static_cast<double>(r.metrics.back().train_forwards));
      total_f.push_back(static_cast<double>(r.total_forwards()));
    }
    a.mean_final_acc = mean_of(accs);
    a.std_final_acc = pop_std(accs);
    a.mean_train_forwards = mean_of(train_f);
    a.mean_total_forwards = mean_of(total_f);
  }
  return aggs;
}

std::string aggregate_to_csv(const std::vector<StrategyAggregate>& aggs) {
  std::ostringstream out;
  out << "strategy,runs,mean_final_acc,std_final_acc,mean_train_forwards,mean_total_forwards\n";
  for (const auto& a : aggs) {
    out << a.strategy << ',' << a.runs << ',' << fmt(a.mean_final_acc) << ','
        << fmt(a.std_final_acc) << ',' << fmt(a.mean_train_forwards) << ','
        << fmt(a.mean_total_forwards) << '\n';
  }
  return out.str();
}

std::vector<StrategyAggregate> aggregate_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "strategy,runs,mean_final_acc,std_final_acc,mean_train_forwards,mean_total_forwards") {
    throw IoError("aggregate CSV: bad header at line 1");
  }
  std::vector<StrategyAggregate> aggs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    StrategyAggregate a;
    char c1, c2, c3, c4, c5;
    if (!std::getline(row, a.strategy, ',')) {
      throw IoError("aggregate CSV: parse error at line " + std::to_string(line_no));
    }
    if (!(row >> a.runs >> c1 >> a.mean_final_acc >> c2 >> a.std_final_acc >> c3 >>
          a.mean_train_forwards >> c4 >> a.mean_total_forwards) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      (void)c5;
      throw IoError("aggregate CSV: parse error at line " + std::to_string(line_no));
    }
    aggs.push_back(a);
  }
  return aggs;
}

std::string format_report(const std::vector<StrategyAggregate>& aggs) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-14s %5s %12s %10s %16s %16s\n", "strategy", "runs",
                "mean_acc", "std_acc", "train_forwards", "total_forwards");
  out << buf;
  for (const auto& a : aggs) {
    std::snprintf(buf, sizeof(buf), "%-14s %5zu %12.4f %10.4f %16.0f %16.0f\n",
                  a.strategy.c_str(), a.runs, a.mean_final_acc, a.std_final_acc,
                  a.mean_train_forwards, a.mean_total_forwards);
    out << buf;
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace da
