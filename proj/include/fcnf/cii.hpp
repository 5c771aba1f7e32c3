#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcnf/exact_solver.hpp"
#include "fcnf/instance.hpp"
#include "fcnf/logit.hpp"

namespace fcnf {

// Arc criticality score pi per arc: the predicted probability of carrying
// flow in the optimal solution. Needs one LP relaxation for the features but
// no exact solve.
std::vector<double> cii_score(const Instance& instance, const LogitModel& model);

// Failure effect of blocking the given arcs, as a percentage increase over
// the unblocked optimum. nullopt means the blocked network is infeasible;
// a baseline that cannot be proven optimal within the limits is an error.
std::optional<double> failure_effect(const Instance& instance,
                                     std::span<const int> arcs_to_block,
                                     const BnBConfig& config = {});
// Variant reusing an already proven baseline objective.
std::optional<double> failure_effect(const Instance& instance, double z0,
                                     std::span<const int> arcs_to_block,
                                     const BnBConfig& config = {});

struct CiiRow {
  int arc = 0;
  double variable_cost = 0.0;
  double fixed_cost = 0.0;
  double pi = 0.0;
  std::optional<double> eta_pct;  // empty when not evaluated or infeasible
};

struct CiiReport {
  std::vector<CiiRow> rows;  // sorted by pi descending, arc id ascending
  double z0 = 0.0;
};

// Per-arc report; with_eta re-solves the network once per arc.
CiiReport cii_report(const Instance& instance, const LogitModel& model,
                     bool with_eta, const BnBConfig& config = {});

struct CriticalityOutcome {
  std::string label;
  int n = 0;
  int m = 0;
  std::optional<double> eta_top_pct;  // blocking the two highest-pi arcs
  std::optional<double> eta_bot_pct;  // blocking the two lowest-pi arcs
};

struct CriticalitySummary {
  std::vector<CriticalityOutcome> outcomes;
  int skipped_unproven = 0;    // baseline not solved to optimality
  int infeasible_top = 0;
  int infeasible_bot = 0;
  double mean_eta_top = 0.0;
  double max_eta_top = 0.0;
  double mean_eta_bot = 0.0;
  double max_eta_bot = 0.0;
  double frac_bot_zero = 0.0;  // share of evaluated instances with eta_bot == 0
};

// Blocks the two highest-CII and the two lowest-CII arcs per instance
// (ties: higher pi first, then lower arc id) and aggregates the failure
// effects. Infeasible blockings are skipped and counted.
CriticalitySummary criticality_experiment(std::span<const Instance> corpus,
                                          const LogitModel& model,
                                          const BnBConfig& config = {},
                                          int workers = 1);

}  // namespace fcnf
