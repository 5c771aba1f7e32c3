#include "fcnf/cii.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "fcnf/features.hpp"
#include "fcnf/lp_relaxation.hpp"

namespace fcnf {

namespace {

// Relative slack under which a re-optimized objective counts as unchanged.
constexpr double kEtaZeroRelTol = 1e-9;

double eta_percent(double z_blocked, double z0) {
  double eta = (z_blocked - z0) / z0 * 100.0;
  if (std::abs(eta) <= kEtaZeroRelTol * 100.0) eta = 0.0;
  return eta;
}

}  // namespace

std::vector<double> cii_score(const Instance& instance, const LogitModel& model) {
  const RelaxationResult relaxation = solve_lp(instance);
  const auto features = extract(instance, relaxation);
  std::vector<double> scores;
  scores.reserve(features.size());
  for (const auto& fv : features) scores.push_back(predict(model, fv));
  return scores;
}

std::optional<double> failure_effect(const Instance& instance, double z0,
                                     std::span<const int> arcs_to_block,
                                     const BnBConfig& config) {
  RemovalMask mask;
  for (int a : arcs_to_block) mask.blocked.insert(a);
  const ExactResult blocked = solve_exact(instance, config, &mask);
  if (blocked.status == SolveStatus::kInfeasible) return std::nullopt;
  if (!blocked.solution.optimal) {
    throw std::runtime_error("failure_effect: blocked solve hit limits on " +
                             instance.label);
  }
  return eta_percent(blocked.solution.objective, z0);
}

std::optional<double> failure_effect(const Instance& instance,
                                     std::span<const int> arcs_to_block,
                                     const BnBConfig& config) {
  const ExactResult baseline = solve_exact(instance, config);
  if (!baseline.feasible() || !baseline.solution.optimal) {
    throw std::runtime_error("failure_effect: baseline not proven optimal on " +
                             instance.label);
  }
  return failure_effect(instance, baseline.solution.objective, arcs_to_block, config);
}

CiiReport cii_report(const Instance& instance, const LogitModel& model,
                     bool with_eta, const BnBConfig& config) {
  const std::vector<double> scores = cii_score(instance, model);

  CiiReport report;
  double z0 = 0.0;
  if (with_eta) {
    const ExactResult baseline = solve_exact(instance, config);
    if (!baseline.feasible() || !baseline.solution.optimal) {
      throw std::runtime_error("cii: baseline not proven optimal on " +
                               instance.label);
    }
    z0 = baseline.solution.objective;
  }
  report.z0 = z0;

  for (int a = 0; a < instance.num_arcs(); ++a) {
    CiiRow row;
    row.arc = a;
    row.variable_cost = instance.arcs[a].variable_cost;
    row.fixed_cost = instance.arcs[a].fixed_cost;
    row.pi = scores[a];
    if (with_eta) {
      const int blocked[] = {a};
      row.eta_pct = failure_effect(instance, z0, blocked, config);
    }
    report.rows.push_back(row);
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const CiiRow& a, const CiiRow& b) {
    if (a.pi != b.pi) return a.pi > b.pi;
    return a.arc < b.arc;
  });
  return report;
}

namespace {

// Two extreme arcs by score; ties resolved by arc id so equal scores fall
// back to arc-id order.
std::vector<int> pick_extreme(const std::vector<double>& scores, bool top) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) {
      return top ? scores[a] > scores[b] : scores[a] < scores[b];
    }
    return a < b;
  });
  order.resize(std::min<size_t>(2, order.size()));
  return order;
}

}  // namespace

CriticalitySummary criticality_experiment(std::span<const Instance> corpus,
                                          const LogitModel& model,
                                          const BnBConfig& config, int workers) {
  CriticalitySummary summary;
  summary.outcomes.resize(corpus.size());
  std::vector<int8_t> skipped(corpus.size(), 0);

  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= corpus.size()) return;
      const Instance& instance = corpus[i];
      CriticalityOutcome& outcome = summary.outcomes[i];
      outcome.label = instance.label;
      outcome.n = instance.num_nodes();
      outcome.m = instance.num_arcs();

      const ExactResult baseline = solve_exact(instance, config);
      if (!baseline.feasible() || !baseline.solution.optimal) {
        skipped[i] = 1;
        continue;
      }
      const double z0 = baseline.solution.objective;
      const std::vector<double> scores = cii_score(instance, model);

      const std::vector<int> top = pick_extreme(scores, true);
      const std::vector<int> bot = pick_extreme(scores, false);
      outcome.eta_top_pct = failure_effect(instance, z0, top, config);
      outcome.eta_bot_pct = failure_effect(instance, z0, bot, config);
    }
  };

  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(corpus.size())));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  double sum_top = 0.0, sum_bot = 0.0;
  int count_top = 0, count_bot = 0, zero_bot = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (skipped[i]) {
      ++summary.skipped_unproven;
      continue;
    }
    const CriticalityOutcome& outcome = summary.outcomes[i];
    if (outcome.eta_top_pct) {
      sum_top += *outcome.eta_top_pct;
      summary.max_eta_top = std::max(summary.max_eta_top, *outcome.eta_top_pct);
      ++count_top;
    } else {
      ++summary.infeasible_top;
    }
    if (outcome.eta_bot_pct) {
      sum_bot += *outcome.eta_bot_pct;
      summary.max_eta_bot = std::max(summary.max_eta_bot, *outcome.eta_bot_pct);
      ++count_bot;
      if (*outcome.eta_bot_pct == 0.0) ++zero_bot;
    } else {
      ++summary.infeasible_bot;
    }
  }
  summary.mean_eta_top = count_top > 0 ? sum_top / count_top : 0.0;
  summary.mean_eta_bot = count_bot > 0 ? sum_bot / count_bot : 0.0;
  summary.frac_bot_zero =
      count_bot > 0 ? static_cast<double>(zero_bot) / count_bot : 0.0;
  return summary;
}

}  // namespace fcnf
