#include "fcnf/lp_relaxation.hpp"

#include <chrono>
#include <cmath>

namespace fcnf {

namespace {

std::string unmet_message(const std::vector<int>& nodes) {
  std::string msg = "infeasible: unroutable requests at nodes {";
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) msg += ",";
    msg += std::to_string(nodes[i]);
  }
  msg += "}";
  return msg;
}

}  // namespace

Solution lift_flows(const Instance& instance, const std::vector<double>& flows,
                    SolveMethod method) {
  const double eps = flow_epsilon(instance.total_supply());
  Solution lifted;
  lifted.method = method;
  lifted.flows.assign(instance.arcs.size(), 0.0);
  lifted.open.assign(instance.arcs.size(), 0);
  for (size_t a = 0; a < flows.size(); ++a) {
    if (flows[a] > eps) {
      lifted.flows[a] = std::min(flows[a], instance.arcs[a].capacity);
      lifted.open[a] = 1;
    }
  }
  lifted.objective = objective_value(instance, lifted.flows, lifted.open);
  return lifted;
}

RelaxationResult solve_lp(const Instance& instance) {
  const auto start = std::chrono::steady_clock::now();

  McfProblem problem;
  problem.num_nodes = instance.num_nodes();
  problem.supply.resize(instance.nodes.size());
  for (size_t v = 0; v < instance.nodes.size(); ++v) {
    problem.supply[v] = instance.nodes[v].request;
  }
  problem.arcs.reserve(instance.arcs.size());
  for (const Arc& arc : instance.arcs) {
    McfArc merged;
    merged.from = arc.from;
    merged.to = arc.to;
    merged.upper = arc.capacity;
    merged.cost = arc.variable_cost + arc.fixed_cost / arc.capacity;
    problem.arcs.push_back(merged);
  }

  const McfResult mcf = solve_min_cost_flow(problem);
  if (mcf.status == McfStatus::kInfeasible) {
    throw InfeasibleError(unmet_message(mcf.unmet_nodes), mcf.unmet_nodes);
  }

  RelaxationResult result;
  result.flows = mcf.flow;
  result.relaxed_objective = mcf.cost;
  result.lifted = lift_flows(instance, mcf.flow, SolveMethod::kLpRounded);
  result.lifted.optimal = false;  // heuristic lift, not an FCNF optimum claim

  const auto stop = std::chrono::steady_clock::now();
  result.wall_time = std::chrono::duration<double>(stop - start).count();
  result.lifted.wall_time = result.wall_time;
  return result;
}

std::pair<std::vector<double>, std::vector<int8_t>> relaxation_features(
    const RelaxationResult& result, const Instance& instance) {
  const double supply = instance.total_supply();
  const double eps = flow_epsilon(supply);
  std::vector<double> l_bar(result.flows.size(), 0.0);
  std::vector<int8_t> l_bin(result.flows.size(), 0);
  if (supply <= 0.0) return {l_bar, l_bin};
  for (size_t a = 0; a < result.flows.size(); ++a) {
    l_bar[a] = result.flows[a] / supply;
    l_bin[a] = result.flows[a] > eps ? 1 : 0;
  }
  return {l_bar, l_bin};
}

}  // namespace fcnf
