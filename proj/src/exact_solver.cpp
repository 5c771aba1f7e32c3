#include "fcnf/exact_solver.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "fcnf/lp_relaxation.hpp"
#include "fcnf/min_cost_flow.hpp"

namespace fcnf {

namespace {

constexpr double kPruneRelSlack = 1e-9;
constexpr int8_t kUndecided = 0;
constexpr int8_t kFixedOpen = 1;
constexpr int8_t kFixedClosed = 2;

struct BnbNode {
  int parent = -1;
  int arc = -1;
  int8_t value = kUndecided;  // kFixedOpen or kFixedClosed for non-roots
};

struct QueueEntry {
  double bound;
  long long id;
  bool operator>(const QueueEntry& other) const {
    if (bound != other.bound) return bound > other.bound;
    return id > other.id;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ExactResult solve_exact(const Instance& instance, const BnBConfig& config,
                        const RemovalMask* mask) {
  if (config.time_limit <= 0.0) {
    throw std::invalid_argument("solve_exact: time_limit must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  const int m = instance.num_arcs();
  const int n = instance.num_nodes();

  std::vector<int8_t> base_status(m, kUndecided);
  if (mask) {
    for (int a : mask->blocked) {
      if (a < 0 || a >= m) {
        throw std::invalid_argument("solve_exact: blocked arc id out of range");
      }
      base_status[a] = kFixedClosed;
    }
  }

  McfProblem problem;
  problem.num_nodes = n;
  problem.supply.resize(n);
  for (int v = 0; v < n; ++v) problem.supply[v] = instance.nodes[v].request;
  problem.arcs.resize(m);

  NetworkSimplex simplex;
  std::vector<uint8_t> active(m);
  std::vector<int8_t> status(m);
  const double eps = flow_epsilon(instance.total_supply());

  // Node relaxation: open arcs cost c (f charged as a constant), undecided
  // arcs the merged c + f/M, closed arcs removed.
  auto solve_relaxation = [&](const std::vector<int8_t>& st, McfResult& out,
                              double& bound) -> bool {
    double fixed_cost = 0.0;
    for (int a = 0; a < m; ++a) {
      const Arc& arc = instance.arcs[a];
      if (st[a] == kFixedClosed) {
        active[a] = 0;
        continue;
      }
      active[a] = 1;
      McfArc& relaxed = problem.arcs[a];
      relaxed.from = arc.from;
      relaxed.to = arc.to;
      relaxed.upper = arc.capacity;
      if (st[a] == kFixedOpen) {
        relaxed.cost = arc.variable_cost;
        fixed_cost += arc.fixed_cost;
      } else {
        relaxed.cost = arc.variable_cost + arc.fixed_cost / arc.capacity;
      }
    }
    out = simplex.solve(problem, active);
    if (out.status == McfStatus::kInfeasible) return false;
    bound = out.cost + fixed_cost;
    return true;
  };

  std::vector<BnbNode> nodes;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;

  auto reconstruct = [&](long long id) {
    status = base_status;
    for (long long cur = id; cur >= 0; cur = nodes[cur].parent) {
      if (nodes[cur].arc >= 0 && status[nodes[cur].arc] == kUndecided) {
        status[nodes[cur].arc] = nodes[cur].value;
      }
    }
  };

  ExactResult result;
  result.solution.method = SolveMethod::kExact;
  double incumbent = std::numeric_limits<double>::infinity();
  bool have_incumbent = false;

  McfResult relax;
  double bound = 0.0;
  if (!solve_relaxation(base_status, relax, bound)) {
    result.status = SolveStatus::kInfeasible;
    result.solution.wall_time = seconds_since(start);
    return result;
  }

  [[maybe_unused]] const double scale_guess = std::max(1.0, std::abs(bound));
  auto prune_slack = [&] {
    return kPruneRelSlack * std::max(1.0, std::abs(incumbent));
  };
  auto gap_slack = [&] {
    return config.gap_tolerance * std::max(1.0, std::abs(incumbent));
  };

  auto try_incumbent = [&](const McfResult& mcf, double node_bound) {
    Solution lifted = lift_flows(instance, mcf.flow, SolveMethod::kExact);
    if (lifted.objective < incumbent) {
      incumbent = lifted.objective;
      have_incumbent = true;
      result.solution = std::move(lifted);
      assert(node_bound <= incumbent + 1e-7 * scale_guess);
    }
    (void)node_bound;
  };

  auto pick_branch_arc = [&](const McfResult& mcf) {
    int best = -1;
    double best_score = -1.0;
    for (int a = 0; a < m; ++a) {
      if (status[a] != kUndecided) continue;
      const double cap = instance.arcs[a].capacity;
      const double x = mcf.flow[a];
      if (x <= eps || x >= cap - eps) continue;
      const double frac = x / cap;
      const double score = instance.arcs[a].fixed_cost * std::min(frac, 1.0 - frac);
      if (score > best_score) {
        best_score = score;
        best = a;
      }
    }
    return best;
  };

  // Root.
  status = base_status;
  try_incumbent(relax, bound);
  result.best_bound = bound;
  long long processed = 1;
  bool hit_limit = false;

  {
    const int branch_arc = pick_branch_arc(relax);
    if (branch_arc >= 0 && bound < incumbent - prune_slack()) {
      for (int8_t value : {kFixedOpen, kFixedClosed}) {
        nodes.push_back({-1, branch_arc, value});
        queue.push({bound, static_cast<long long>(nodes.size()) - 1});
      }
    }
  }

  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    result.best_bound = std::min(top.bound, incumbent);
    if (top.bound >= incumbent - gap_slack()) break;  // proven within gap
    if (seconds_since(start) > config.time_limit ||
        (config.node_limit && processed >= *config.node_limit)) {
      hit_limit = true;
      break;
    }
    queue.pop();

    reconstruct(top.id);
    ++processed;
    if (!solve_relaxation(status, relax, bound)) continue;
    bound = std::max(bound, top.bound);  // parent bound stays valid
    if (bound >= incumbent - prune_slack()) continue;
    try_incumbent(relax, bound);
    if (bound >= incumbent - prune_slack()) continue;

    const int branch_arc = pick_branch_arc(relax);
    if (branch_arc < 0) continue;  // integral node, solved exactly by the lift
    for (int8_t value : {kFixedOpen, kFixedClosed}) {
      nodes.push_back({static_cast<int>(top.id), branch_arc, value});
      queue.push({bound, static_cast<long long>(nodes.size()) - 1});
    }
  }

  if (queue.empty()) result.best_bound = incumbent;
  result.nodes = processed;
  result.status = have_incumbent
                      ? (hit_limit ? SolveStatus::kFeasible : SolveStatus::kOptimal)
                      : SolveStatus::kInfeasible;
  result.solution.optimal = result.status == SolveStatus::kOptimal;
  result.solution.wall_time = seconds_since(start);
  return result;
}

ExactResult brute_force(const Instance& instance, const RemovalMask* mask) {
  const auto start = std::chrono::steady_clock::now();
  const int m = instance.num_arcs();
  if (m > 16) {
    throw std::invalid_argument("brute_force: only m <= 16 is supported (2^m subsets)");
  }
  const int n = instance.num_nodes();

  std::vector<int> free_arcs;
  for (int a = 0; a < m; ++a) {
    if (!mask || !mask->blocked.count(a)) free_arcs.push_back(a);
  }
  const int k = static_cast<int>(free_arcs.size());

  McfProblem problem;
  problem.num_nodes = n;
  problem.supply.resize(n);
  for (int v = 0; v < n; ++v) problem.supply[v] = instance.nodes[v].request;
  problem.arcs.resize(m);
  for (int a = 0; a < m; ++a) {
    const Arc& arc = instance.arcs[a];
    problem.arcs[a] = {arc.from, arc.to, arc.capacity, arc.variable_cost};
  }

  // Incremental fixed-cost sums over subsets of the free arcs.
  std::vector<double> fixed_sum(size_t{1} << k, 0.0);
  for (uint32_t subset = 1; subset < fixed_sum.size(); ++subset) {
    const int lowest = std::countr_zero(subset);
    fixed_sum[subset] = fixed_sum[subset & (subset - 1)] +
                        instance.arcs[free_arcs[lowest]].fixed_cost;
  }

  NetworkSimplex simplex;
  std::vector<uint8_t> active(m, 0);

  auto evaluate = [&](uint32_t subset, McfResult& out) -> bool {
    std::fill(active.begin(), active.end(), 0);
    for (int i = 0; i < k; ++i) {
      if (subset & (uint32_t{1} << i)) active[free_arcs[i]] = 1;
    }
    out = simplex.solve(problem, active);
    return out.status == McfStatus::kOptimal;
  };

  double best = std::numeric_limits<double>::infinity();
  uint32_t best_subset = 0;
  McfResult best_flow;
  bool found = false;

  // Seed the incumbent with the full subset so fixed-cost pruning bites from
  // the start of the enumeration.
  {
    McfResult full;
    const uint32_t all = (uint32_t{1} << k) - 1;
    if (evaluate(all, full)) {
      best = full.cost + fixed_sum[all];
      best_subset = all;
      best_flow = full;
      found = true;
    }
  }

  for (uint32_t subset = 0; subset < fixed_sum.size(); ++subset) {
    if (found && fixed_sum[subset] >= best) continue;
    McfResult candidate;
    if (!evaluate(subset, candidate)) continue;
    const double value = candidate.cost + fixed_sum[subset];
    if (!found || value < best) {
      best = value;
      best_subset = subset;
      best_flow = std::move(candidate);
      found = true;
    }
  }

  ExactResult result;
  result.nodes = static_cast<long long>(fixed_sum.size());
  if (!found) {
    result.status = SolveStatus::kInfeasible;
    result.solution.method = SolveMethod::kBruteForce;
    result.solution.wall_time = seconds_since(start);
    return result;
  }

  result.status = SolveStatus::kOptimal;
  result.best_bound = best;
  Solution& solution = result.solution;
  solution.method = SolveMethod::kBruteForce;
  solution.flows.assign(m, 0.0);
  solution.open.assign(m, 0);
  for (int i = 0; i < k; ++i) {
    if (best_subset & (uint32_t{1} << i)) solution.open[free_arcs[i]] = 1;
  }
  for (int a = 0; a < m; ++a) solution.flows[a] = best_flow.flow[a];
  solution.objective = objective_value(instance, solution.flows, solution.open);
  solution.optimal = true;
  solution.wall_time = seconds_since(start);
  return result;
}

}  // namespace fcnf
