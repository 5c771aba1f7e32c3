#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fcnf/instance.hpp"
#include "fcnf/min_cost_flow.hpp"

namespace fcnf {

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& message, std::vector<int> unmet)
      : std::runtime_error(message), unmet_nodes(std::move(unmet)) {}
  std::vector<int> unmet_nodes;  // nodes whose request cannot be routed
};

struct RelaxationResult {
  std::vector<double> flows;       // l_ij, per arc
  double relaxed_objective = 0.0;  // optimum of the relaxation
  Solution lifted;                 // rounded and re-priced with original costs
  double wall_time = 0.0;
};

// With the binaries relaxed to [0,1] the optimum sets y = x/M, so the
// relaxation is exactly a min-cost flow with merged unit costs c + f/M.
// The lifted solution opens the arcs with positive flow and re-prices with
// the original c and f.
RelaxationResult solve_lp(const Instance& instance);

// (l_bar, l_bin) per arc: flow normalized by total supply, and its
// positive-flow indicator. S = 0 degenerates to all zeros.
std::pair<std::vector<double>, std::vector<int8_t>> relaxation_features(
    const RelaxationResult& result, const Instance& instance);

// Shared lifting rule: open exactly the arcs with flow above the epsilon,
// zero out sub-epsilon noise, and re-price with the instance's own costs.
Solution lift_flows(const Instance& instance, const std::vector<double>& flows,
                    SolveMethod method);

}  // namespace fcnf
