#pragma once

#include <string>
#include <vector>

#include "dataagent/config.hpp"

namespace da {

struct RunResult {
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> metrics;

  double final_accuracy() const { return metrics.back().test_accuracy; }
  std::uint64_t total_forwards() const {
    const auto& m = metrics.back();
    return m.train_forwards + m.score_forwards + m.agent_forwards;
  }
};

struct StrategyAggregate {
  std::string strategy;
  std::size_t runs = 0;
  double mean_final_acc = 0.0;
  double std_final_acc = 0.0;  // population std over seeds
  double mean_train_forwards = 0.0;
  double mean_total_forwards = 0.0;
};

// normative metrics CSV header
extern const char* kMetricsCsvHeader;

std::string metrics_to_csv(const std::string& run_id, const std::string& strategy,
                           std::uint64_t seed, const std::vector<MetricsRecord>& metrics);

// one run of the configured strategy
RunResult run_one(const RunConfig& cfg, const Dataset& dataset, const std::string& strategy,
                  std::uint64_t seed);

// the full strategy x seed cross product, sequential, deterministic order
std::vector<RunResult> run_bench(const RunConfig& cfg, const Dataset& dataset);

std::vector<StrategyAggregate> aggregate(const std::vector<RunResult>& results);

std::string aggregate_to_csv(const std::vector<StrategyAggregate>& aggs);
std::vector<StrategyAggregate> aggregate_from_csv(const std::string& text);

// strategy x metrics summary table for standard output
std::string format_report(const std::vector<StrategyAggregate>& aggs);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace da
