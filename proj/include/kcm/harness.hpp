#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kcm/bootstrap.hpp"
#include "kcm/dgp.hpp"
#include "kcm/selection.hpp"
#include "kcm/teststats.hpp"

namespace kcm::harness {

struct ExperimentConfig {
  dgp::DgpSpec dgp;
  std::vector<teststats::StatisticKind> kinds;
  selection::SelectionMethod select = selection::SelectionMethod::NonAsymptotic;
  int grid_size = 9;
  double lambda = 0.15;
  double tau = 0.11;
  double split_frac = 0.15;
  int B = 500;
  int replications = 1;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  int threads = 0;                 // 0: hardware concurrency
  std::optional<int> J_override;   // truncation-sweep hook

  void validate() const;
};

struct KindRecord {
  double value = 0.0;
  double p_value = 1.0;
  double gamma = 0.0;
  double J = 0.0;
  bool reject = false;
};

struct ReplicationRecord {
  int rep = 0;
  bool failed = false;
  std::string error;
  std::vector<KindRecord> kinds;
};

struct KindSummary {
  std::string kind;
  double rejection_rate = 0.0;
  double mean_gamma_star = 0.0;
  double mean_J = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<KindSummary> summaries;
  std::vector<ReplicationRecord> records;
  int failure_count = 0;
  double wall_seconds = 0.0;
};

struct SweepReport {
  ExperimentConfig config;
  std::vector<int> J_values;                 // admissible, run order
  std::vector<ExperimentReport> reports;     // one per admissible J
  std::vector<std::string> warnings;         // skipped J values
};

// Full single-dataset pipeline: OLS fit, split, kernel selection on the
// (projected) training kernel, projected testing statistics, multiplier
// bootstrap. Fixed-kernel benchmarks (gp/icm) run on the whole sample
// without splitting. base_seed drives the split and the bootstrap streams.
std::vector<bootstrap::TestOutcome> run_single_test(
    const dgp::Dataset& data, const ExperimentConfig& config,
    std::uint64_t base_seed);

ExperimentReport run_monte_carlo(const ExperimentConfig& config);

SweepReport run_truncation_sweep(const ExperimentConfig& config,
                                 const std::vector<int>& J_values);

enum class TableFormat { Csv, Json };

// Stable column order: statistic, N, q, dgp, rejection_rate,
// mean_gamma_star, mean_J.
std::string emit_table(const std::vector<ExperimentReport>& reports,
                       TableFormat format);
std::string emit_table(const ExperimentReport& report, TableFormat format);

// Per-replication records: rep, statistic, value, p_value, gamma, J, reject.
std::string emit_records(const ExperimentReport& report);

// Wide power table: one row per J, one column per statistic kind.
std::string emit_sweep_table(const SweepReport& sweep);

// Single-test outcomes with full per-direction diagnostics.
std::string outcomes_json(const std::vector<bootstrap::TestOutcome>& outcomes,
                          const ExperimentConfig& config, Eigen::Index n,
                          Eigen::Index q);

std::string report_json(const ExperimentReport& report);

}  // namespace kcm::harness
