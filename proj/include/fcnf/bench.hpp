#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcnf/cii.hpp"
#include "fcnf/exact_solver.hpp"
#include "fcnf/instance.hpp"
#include "fcnf/logit.hpp"

namespace fcnf {

inline constexpr double kTimerResolution = 1e-9;  // floor for measured times

struct CompareOut {
  double z_gap = 0.0;  // (z_rbr - z_x) / |z_x| * 100
  bool gap_defined = true;
  double t_diff = 0.0;  // t_x / t_rbr
  int theta = 0;        // 1 iff z_gap < 0 and t_diff > 1
};

CompareOut compare(double z_rbr, double z_x, double t_rbr, double t_x);

// Difficulty tiers by node count: n <= bounds[k] lands in tier k, anything
// beyond the last bound in the last tier.
struct TierConfig {
  std::vector<int> bounds = {15, 25, 40};
  std::string name(int n) const;
};

struct BenchRecord {
  std::string label;
  int n = 0;
  int m = 0;
  double z_rbr = 0.0, z_lp = 0.0, z_exact = 0.0;
  bool exact_optimal = false;
  double t_rbr = 0.0;        // features + prediction + flow solve
  double t_rbr_solve = 0.0;  // flow solve only; thesis-comparable timing
  double t_lp = 0.0, t_exact = 0.0;
  CompareOut vs_lp;
  CompareOut vs_exact;
};

struct BenchConfig {
  BnBConfig exact;
  TierConfig tiers;
  int workers = 1;
};

struct BenchTierSummary {
  std::string tier;
  int count = 0;
  double theta_lp_frac = 0.0;
  double zgap_lp_min = 0.0, zgap_lp_mean = 0.0, zgap_lp_max = 0.0;
  double tdiff_lp_min = 0.0, tdiff_lp_mean = 0.0, tdiff_lp_max = 0.0;
  double theta_exact_frac = 0.0;         // against incumbents and proven optima
  double theta_exact_proven_frac = 0.0;  // against proven optima only
  int exact_proven = 0;
  double zgap_exact_min = 0.0, zgap_exact_mean = 0.0, zgap_exact_max = 0.0;
  double tdiff_exact_min = 0.0, tdiff_exact_mean = 0.0, tdiff_exact_max = 0.0;
};

struct BenchOutput {
  std::vector<BenchRecord> records;
  std::vector<BenchTierSummary> summary;  // per tier plus an "overall" row
  std::vector<std::string> failed_labels;
};

BenchOutput run_benchmark(std::span<const Instance> corpus, const LogitModel& model,
                          const BenchConfig& config);

void write_bench_csv(const BenchOutput& output, const std::filesystem::path& path);
void write_bench_summary_csv(const BenchOutput& output,
                             const std::filesystem::path& path);

// End-to-end run at desk scale: generate corpora, solve, extract,
// undersample, train stepwise, evaluate, run the criticality experiment and
// the benchmark. Every artifact is reproducible from the seed.
struct PipelineConfig {
  uint64_t seed = 7;
  std::pair<int, int> train_n{5, 15};
  int train_count = 800;
  std::pair<int, int> test_n{15, 25};
  int test_count = 150;
  int cii_count = 100;
  int cii_n = 20;
  int bench_count = 100;
  std::pair<int, int> bench_n{10, 40};
  double label_time_limit = 60.0;  // exact solves that produce labels
  double cii_time_limit = 60.0;
  double bench_exact_time_limit = 60.0;
  TierConfig tiers;
  int workers = 2;
  std::filesystem::path out_dir = "out";
  bool write_instances = false;
  bool skip_cii = false;
  bool skip_bench = false;
};

struct PipelineResult {
  LogitModel model;
  double cutoff = 0.0;
  double cutoff_cost = 0.0;
  double cv_accuracy = 0.0;
  double test_auc = 0.0;
  double stepwise_initial_aic = 0.0;
  double stepwise_final_aic = 0.0;
  int retained_predictors = 0;
  int train_instances_labeled = 0;
  int test_instances_labeled = 0;
  int train_timeouts = 0;
  int test_timeouts = 0;
  CriticalitySummary criticality;
  BenchOutput bench;
};

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

// Deterministic per-concern child seeds for corpus generation.
uint64_t derive_seed(uint64_t base, uint64_t tag, uint64_t index);

}  // namespace fcnf
