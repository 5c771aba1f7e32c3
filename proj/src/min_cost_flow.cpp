#include "fcnf/min_cost_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fcnf {

namespace {
constexpr double kRelCostTol = 1e-11;
constexpr double kFeasRelTol = 1e-7;
}  // namespace

McfResult NetworkSimplex::solve(const McfProblem& problem) {
  return solve(problem, {});
}

void NetworkSimplex::build(const McfProblem& problem,
                           std::span<const uint8_t> active) {
  num_nodes_ = problem.num_nodes;
  root_ = num_nodes_;
  const int m = static_cast<int>(problem.arcs.size());

  arc_from_.clear();
  arc_to_.clear();
  arc_upper_.clear();
  arc_cost_.clear();
  arc_flow_.clear();
  arc_state_.clear();
  problem_arc_.clear();

  double max_cost = 1.0;
  for (int a = 0; a < m; ++a) {
    if (!active.empty() && !active[a]) continue;
    const McfArc& arc = problem.arcs[a];
    arc_from_.push_back(arc.from);
    arc_to_.push_back(arc.to);
    arc_upper_.push_back(arc.upper);
    arc_cost_.push_back(arc.cost);
    arc_flow_.push_back(0.0);
    arc_state_.push_back(kAtLower);
    problem_arc_.push_back(a);
    max_cost = std::max(max_cost, std::abs(arc.cost));
  }
  cost_tol_ = kRelCostTol * max_cost;
  big_cost_ = (static_cast<double>(num_nodes_) + 1.0) * max_cost + 1.0;

  double supply_sum = 1.0;
  for (double b : problem.supply) supply_sum += std::abs(b);

  // Artificial arcs between every node and the root give the initial basis.
  // Intermediate bases may route other nodes' flow through an artificial, so
  // their capacity is the whole supply volume, not just the node's own.
  for (int v = 0; v < num_nodes_; ++v) {
    const double b = problem.supply[v];
    if (b >= 0.0) {
      arc_from_.push_back(v);
      arc_to_.push_back(root_);
    } else {
      arc_from_.push_back(root_);
      arc_to_.push_back(v);
    }
    arc_upper_.push_back(supply_sum);
    arc_cost_.push_back(big_cost_);
    arc_flow_.push_back(std::abs(b));
    arc_state_.push_back(kBasic);
    problem_arc_.push_back(-1);
  }

  basic_adjacency_.assign(num_nodes_ + 1, {});
  const int base = static_cast<int>(arc_from_.size()) - num_nodes_;
  for (int v = 0; v < num_nodes_; ++v) {
    basic_adjacency_[v].push_back(base + v);
    basic_adjacency_[root_].push_back(base + v);
  }

  parent_.assign(num_nodes_ + 1, -1);
  parent_arc_.assign(num_nodes_ + 1, -1);
  depth_.assign(num_nodes_ + 1, 0);
  potential_.assign(num_nodes_ + 1, 0.0);
  recompute_tree();

  block_start_ = 0;
  degenerate_streak_ = 0;
  bland_mode_ = false;
}

void NetworkSimplex::recompute_tree() {
  parent_[root_] = -1;
  parent_arc_[root_] = -1;
  depth_[root_] = 0;
  potential_[root_] = 0.0;

  dfs_stack_.clear();
  dfs_stack_.push_back(root_);
  while (!dfs_stack_.empty()) {
    const int v = dfs_stack_.back();
    dfs_stack_.pop_back();
    for (int a : basic_adjacency_[v]) {
      if (a == parent_arc_[v]) continue;
      const int w = arc_from_[a] == v ? arc_to_[a] : arc_from_[a];
      parent_[w] = v;
      parent_arc_[w] = a;
      depth_[w] = depth_[v] + 1;
      // Basic arcs have zero reduced cost: cost + pot[from] - pot[to] = 0.
      if (arc_from_[a] == v) {
        potential_[w] = potential_[v] + arc_cost_[a];
      } else {
        potential_[w] = potential_[v] - arc_cost_[a];
      }
      dfs_stack_.push_back(w);
    }
  }
}

int NetworkSimplex::price_block_search() {
  const int total = static_cast<int>(arc_from_.size());
  const int block = std::max(8, static_cast<int>(std::sqrt(total)) + 1);
  int best = -1;
  double best_violation = cost_tol_;
  int scanned = 0;
  int index = block_start_;
  while (scanned < total) {
    const int stop = std::min(scanned + block, total);
    for (; scanned < stop; ++scanned, ++index) {
      if (index >= total) index = 0;
      const int8_t state = arc_state_[index];
      if (state == kBasic) continue;
      const double reduced =
          arc_cost_[index] + potential_[arc_from_[index]] - potential_[arc_to_[index]];
      const double violation = state == kAtLower ? -reduced : reduced;
      if (violation > best_violation) {
        best_violation = violation;
        best = index;
      }
    }
    if (best >= 0) {
      block_start_ = index >= total ? 0 : index;
      return best;
    }
  }
  return -1;
}

int NetworkSimplex::price_bland() {
  const int total = static_cast<int>(arc_from_.size());
  for (int a = 0; a < total; ++a) {
    const int8_t state = arc_state_[a];
    if (state == kBasic) continue;
    const double reduced =
        arc_cost_[a] + potential_[arc_from_[a]] - potential_[arc_to_[a]];
    if ((state == kAtLower && reduced < -cost_tol_) ||
        (state == kAtUpper && reduced > cost_tol_)) {
      return a;
    }
  }
  return -1;
}

void NetworkSimplex::pivot(int entering) {
  // Orient the cycle along the direction of the flow change on the entering
  // arc: from -> to when entering at the lower bound, reversed at the upper.
  const bool entering_forward = arc_state_[entering] == kAtLower;
  const int u = entering_forward ? arc_from_[entering] : arc_to_[entering];
  const int v = entering_forward ? arc_to_[entering] : arc_from_[entering];
  // The push travels entering-arc u->v, then v -> apex -> u through the tree.

  cycle_arcs_.clear();
  cycle_forward_.clear();
  cycle_arcs_.push_back(entering);
  cycle_forward_.push_back(1);

  int a = u;
  int b = v;
  while (a != b) {
    if (depth_[a] >= depth_[b]) {
      // Segment apex -> u: the push moves parent -> node here.
      const int arc = parent_arc_[a];
      const bool arc_points_up = arc_to_[arc] == parent_[a];
      cycle_arcs_.push_back(arc);
      cycle_forward_.push_back(arc_points_up ? 0 : 1);
      a = parent_[a];
    } else {
      // Segment v -> apex: the push moves node -> parent here.
      const int arc = parent_arc_[b];
      const bool arc_points_up = arc_to_[arc] == parent_[b];
      cycle_arcs_.push_back(arc);
      cycle_forward_.push_back(arc_points_up ? 1 : 0);
      b = parent_[b];
    }
  }

  // Ratio test: first the true minimum residual, then the lowest arc id
  // within an exact-tie neighbourhood of it.
  double delta = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < cycle_arcs_.size(); ++i) {
    const int arc = cycle_arcs_[i];
    const double residual = cycle_forward_[i]
                                ? arc_upper_[arc] - arc_flow_[arc]
                                : arc_flow_[arc];
    delta = std::min(delta, residual);
  }
  delta = std::max(delta, 0.0);

  const double tie_tol = 1e-12 * (1.0 + delta);
  int blocking = -1;
  size_t blocking_pos = 0;
  for (size_t i = 0; i < cycle_arcs_.size(); ++i) {
    const int arc = cycle_arcs_[i];
    const double residual = cycle_forward_[i]
                                ? arc_upper_[arc] - arc_flow_[arc]
                                : arc_flow_[arc];
    if (residual <= delta + tie_tol && (blocking < 0 || arc < blocking)) {
      blocking = arc;
      blocking_pos = i;
    }
  }

  if (delta > 0.0) {
    for (size_t i = 0; i < cycle_arcs_.size(); ++i) {
      const int arc = cycle_arcs_[i];
      arc_flow_[arc] += cycle_forward_[i] ? delta : -delta;
    }
    degenerate_streak_ = 0;
    bland_mode_ = false;
  } else {
    ++degenerate_streak_;
  }

  // Pin the blocking arc exactly to its bound to stop drift.
  arc_flow_[blocking] = cycle_forward_[blocking_pos] ? arc_upper_[blocking] : 0.0;

  if (blocking == entering) {
    arc_state_[entering] = entering_forward ? kAtUpper : kAtLower;
    return;
  }

  arc_state_[entering] = kBasic;
  arc_state_[blocking] = cycle_forward_[blocking_pos] ? kAtUpper : kAtLower;

  auto remove_from = [&](int node, int arc) {
    auto& list = basic_adjacency_[node];
    list.erase(std::find(list.begin(), list.end(), arc));
  };
  remove_from(arc_from_[blocking], blocking);
  remove_from(arc_to_[blocking], blocking);
  basic_adjacency_[arc_from_[entering]].push_back(entering);
  basic_adjacency_[arc_to_[entering]].push_back(entering);

  recompute_tree();
}

McfResult NetworkSimplex::solve(const McfProblem& problem,
                                std::span<const uint8_t> active) {
  if (static_cast<int>(problem.supply.size()) != problem.num_nodes) {
    throw std::invalid_argument("mcf: supply size != num_nodes");
  }
  if (!active.empty() && active.size() != problem.arcs.size()) {
    throw std::invalid_argument("mcf: active mask size != arc count");
  }
  build(problem, active);

  const long long bland_trigger =
      2LL * static_cast<long long>(arc_from_.size()) + 64;
  const long long pivot_cap =
      200LL * (static_cast<long long>(arc_from_.size()) + num_nodes_) + 100000;

  long long pivots = 0;
  for (;;) {
    if (degenerate_streak_ > bland_trigger) bland_mode_ = true;
    const int entering = bland_mode_ ? price_bland() : price_block_search();
    if (entering < 0) break;
    pivot(entering);
    if (++pivots > pivot_cap) {
      throw std::runtime_error("mcf: pivot cap exceeded (numerical trouble)");
    }
  }

  McfResult result;
  result.flow.assign(problem.arcs.size(), 0.0);

  double supply_scale = 1.0;
  for (double s : problem.supply) supply_scale += std::abs(s);
  const double feas_tol = kFeasRelTol * supply_scale;

  // Any artificial arc still carrying real flow marks an unroutable node.
  const int total = static_cast<int>(arc_from_.size());
  for (int a = 0; a < total; ++a) {
    if (problem_arc_[a] >= 0) continue;
    if (arc_flow_[a] > feas_tol) {
      const int v = arc_from_[a] == root_ ? arc_to_[a] : arc_from_[a];
      result.unmet_nodes.push_back(v);
    }
  }
  if (!result.unmet_nodes.empty()) {
    result.status = McfStatus::kInfeasible;
    return result;
  }

  double cost = 0.0;
  for (int a = 0; a < total; ++a) {
    const int p = problem_arc_[a];
    if (p < 0) continue;
    double x = arc_flow_[a];
    if (x < feas_tol * 1e-2) x = 0.0;  // degenerate basic noise
    x = std::min(x, arc_upper_[a]);
    result.flow[p] = x;
    cost += arc_cost_[a] * x;
  }
  result.cost = cost;
  result.status = McfStatus::kOptimal;
  return result;
}

}  // namespace fcnf
