#include "fcnf/rbr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "fcnf/features.hpp"
#include "fcnf/lp_relaxation.hpp"
#include "fcnf/min_cost_flow.hpp"

namespace fcnf {

RbrResult solve_rbr_with_probs(const Instance& instance,
                               std::span<const double> probabilities) {
  if (probabilities.size() != instance.arcs.size()) {
    throw std::invalid_argument("rbr: probabilities not aligned with arcs");
  }
  const auto start = std::chrono::steady_clock::now();

  RbrResult result;
  result.surrogate_costs.reserve(probabilities.size());

  McfProblem problem;
  problem.num_nodes = instance.num_nodes();
  problem.supply.resize(instance.nodes.size());
  for (size_t v = 0; v < instance.nodes.size(); ++v) {
    problem.supply[v] = instance.nodes[v].request;
  }
  for (size_t a = 0; a < instance.arcs.size(); ++a) {
    const double p = std::clamp(probabilities[a], kRbrProbFloor, 1.0);
    const double cost = -std::log(p);
    result.surrogate_costs.push_back(cost);
    problem.arcs.push_back(
        {instance.arcs[a].from, instance.arcs[a].to, instance.arcs[a].capacity, cost});
  }

  const McfResult mcf = solve_min_cost_flow(problem);
  if (mcf.status == McfStatus::kInfeasible) {
    throw InfeasibleError("rbr: infeasible instance", mcf.unmet_nodes);
  }

  result.surrogate_objective = mcf.cost;
  result.lifted = lift_flows(instance, mcf.flow, SolveMethod::kRbr);
  result.lifted.optimal = false;

  const auto stop = std::chrono::steady_clock::now();
  result.flow_wall_time = std::chrono::duration<double>(stop - start).count();
  result.wall_time = result.flow_wall_time;
  result.lifted.wall_time = result.wall_time;
  return result;
}

RbrResult solve_rbr(const Instance& instance, const LogitModel& model) {
  const auto start = std::chrono::steady_clock::now();

  const RelaxationResult relaxation = solve_lp(instance);
  const auto features = extract(instance, relaxation);
  std::vector<double> probabilities;
  probabilities.reserve(features.size());
  for (const auto& fv : features) probabilities.push_back(predict(model, fv));

  RbrResult result = solve_rbr_with_probs(instance, probabilities);
  const auto stop = std::chrono::steady_clock::now();
  result.wall_time = std::chrono::duration<double>(stop - start).count();
  result.lifted.wall_time = result.wall_time;
  return result;
}

std::vector<int> most_probable_path_check(const Instance& instance,
                                          std::span<const double> probabilities) {
  int source = -1, sink = -1;
  for (const Node& node : instance.nodes) {
    if (node.request > 0.0) {
      if (source >= 0) throw std::invalid_argument("path check: multiple supply nodes");
      source = node.id;
    } else if (node.request < 0.0) {
      if (sink >= 0) throw std::invalid_argument("path check: multiple demand nodes");
      sink = node.id;
    }
  }
  if (source < 0 || sink < 0) {
    throw std::invalid_argument("path check: need one supply and one demand node");
  }
  if (std::abs(instance.nodes[source].request - 1.0) > 1e-12) {
    throw std::invalid_argument("path check: total supply must be 1");
  }

  const RbrResult rbr = solve_rbr_with_probs(instance, probabilities);
  const double eps = flow_epsilon(instance.total_supply());

  // The unit-flow support must be a simple source->sink walk.
  std::vector<int> path;
  int at = source;
  std::vector<int8_t> used(instance.arcs.size(), 0);
  while (at != sink) {
    int next_arc = -1;
    for (size_t a = 0; a < instance.arcs.size(); ++a) {
      if (used[a] || rbr.lifted.flows[a] <= eps) continue;
      if (instance.arcs[a].from == at) {
        next_arc = static_cast<int>(a);
        break;
      }
    }
    if (next_arc < 0) {
      throw std::runtime_error("path check: support is not a source-sink path");
    }
    used[next_arc] = 1;
    path.push_back(next_arc);
    at = instance.arcs[next_arc].to;
    if (path.size() > instance.arcs.size()) {
      throw std::runtime_error("path check: support contains a cycle");
    }
  }
  return path;
}

}  // namespace fcnf
