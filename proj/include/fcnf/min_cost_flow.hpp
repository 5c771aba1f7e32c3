#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fcnf {

struct McfArc {
  int from = 0;
  int to = 0;
  double upper = 0.0;  // lower bound is always 0
  double cost = 0.0;
};

struct McfProblem {
  int num_nodes = 0;
  std::vector<double> supply;  // size num_nodes, positive = source
  std::vector<McfArc> arcs;
};

enum class McfStatus { kOptimal, kInfeasible };

struct McfResult {
  McfStatus status = McfStatus::kInfeasible;
  std::vector<double> flow;  // per problem arc; zero for inactive arcs
  double cost = 0.0;
  // Nodes whose supply/demand could not be routed (empty when optimal).
  std::vector<int> unmet_nodes;
};

// Primal network simplex on a spanning tree basis rooted at an artificial
// node. Entering arcs are priced with a block search over the arc list;
// after a long streak of degenerate pivots the rule falls back to Bland's
// (lowest arc id) until progress resumes, which guarantees termination.
// All tie-breaks are by lowest arc id, so results are deterministic.
//
// The object is reusable: buffers persist across solves. One instance per
// execution context; concurrent solves need separate instances.
class NetworkSimplex {
 public:
  McfResult solve(const McfProblem& problem);
  // Arcs with active[a] == 0 are excluded from the network entirely.
  McfResult solve(const McfProblem& problem, std::span<const uint8_t> active);

 private:
  enum State : int8_t { kAtLower = 0, kBasic = 1, kAtUpper = 2 };

  void build(const McfProblem& problem, std::span<const uint8_t> active);
  int price_block_search();
  int price_bland();
  void pivot(int entering);
  void recompute_tree();

  int num_nodes_ = 0;   // original nodes; root is node num_nodes_
  int root_ = 0;
  double cost_tol_ = 0.0;
  double big_cost_ = 0.0;

  std::vector<int> arc_from_, arc_to_;
  std::vector<double> arc_upper_, arc_cost_, arc_flow_;
  std::vector<int8_t> arc_state_;
  std::vector<int> problem_arc_;  // internal arc -> problem arc index (-1 artificial)

  std::vector<std::vector<int>> basic_adjacency_;  // node -> internal arc ids
  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<double> potential_;
  std::vector<int> dfs_stack_;

  std::vector<int> cycle_arcs_;
  std::vector<int8_t> cycle_forward_;

  int block_start_ = 0;
  long long degenerate_streak_ = 0;
  bool bland_mode_ = false;
};

inline McfResult solve_min_cost_flow(const McfProblem& problem) {
  NetworkSimplex simplex;
  return simplex.solve(problem);
}

}  // namespace fcnf
