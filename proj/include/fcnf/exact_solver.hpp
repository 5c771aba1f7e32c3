#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "fcnf/instance.hpp"

namespace fcnf {

struct BnBConfig {
  double time_limit = 60.0;      // seconds
  double gap_tolerance = 1e-6;   // relative
  std::optional<long long> node_limit;
};

struct RemovalMask {
  std::set<int> blocked;  // arc ids forced closed (b = 0)
};

enum class SolveStatus { kOptimal, kFeasible, kInfeasible };

struct ExactResult {
  SolveStatus status = SolveStatus::kInfeasible;
  Solution solution;        // meaningful unless infeasible
  double best_bound = 0.0;  // global lower bound at termination
  long long nodes = 0;      // branch-and-bound nodes processed

  bool feasible() const { return status != SolveStatus::kInfeasible; }
};

// Branch and bound over the open/closed arc decisions. Node bounds come from
// the merged-cost min-cost flow (open arcs priced c with f constant,
// undecided arcs c + f/M, closed arcs removed); every node's relaxation is
// also lifted to a feasible incumbent. Branching picks the undecided arc
// maximizing f * min(x/M, 1 - x/M), lowest arc id on ties; the search is
// best-bound first. A time/node limit returns the incumbent with
// optimal=false; infeasibility is reported as a status, not a timeout.
ExactResult solve_exact(const Instance& instance, const BnBConfig& config = {},
                        const RemovalMask* mask = nullptr);

// Exhaustive oracle for m <= 16: every subset of unblocked arcs is tried as
// the open set and priced by a variable-cost-only min-cost flow plus the
// subset's fixed costs. Subsets whose fixed cost alone already exceeds the
// incumbent are skipped, which cannot cut the optimum since c >= 0.
ExactResult brute_force(const Instance& instance,
                        const RemovalMask* mask = nullptr);

}  // namespace fcnf
