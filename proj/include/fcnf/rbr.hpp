#pragma once

#include <span>
#include <vector>

#include "fcnf/instance.hpp"
#include "fcnf/logit.hpp"

namespace fcnf {

// Probabilities below this are clamped before taking -ln p, making a
// hopeless arc merely very expensive rather than undefined.
inline constexpr double kRbrProbFloor = 1e-6;

struct RbrResult {
  std::vector<double> surrogate_costs;  // c' = -ln(clamped p), per arc
  double surrogate_objective = 0.0;     // z'_RBR = sum c' x over the flow
  Solution lifted;                      // re-priced with the original c, f
  double wall_time = 0.0;               // features + prediction + flow solve
  double flow_wall_time = 0.0;          // flow solve + lift only
};

// Replaces arc costs with -ln p and solves the resulting continuous flow
// problem; the binaries drop out of the surrogate objective, so it is one
// min-cost flow. The solution lifts exactly like the LP relaxation (open
// iff flow above epsilon, re-priced with the instance's own costs), which
// always yields a feasible solution of the original problem.
RbrResult solve_rbr_with_probs(const Instance& instance,
                               std::span<const double> probabilities);

// Full heuristic: extract features (one LP relaxation), predict pi with the
// model, then solve the surrogate. wall_time covers all of it.
RbrResult solve_rbr(const Instance& instance, const LogitModel& model);

// For a unit-supply single-source single-sink instance the RBR support is a
// most probable s-t path. Returns that path's arc ids in walk order.
std::vector<int> most_probable_path_check(const Instance& instance,
                                          std::span<const double> probabilities);

}  // namespace fcnf
