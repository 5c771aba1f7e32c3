#include "fcnf/generator.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "fcnf/rng.hpp"

namespace fcnf {

namespace {

void check_config(const GeneratorConfig& config) {
  if (config.n < 2) {
    throw std::invalid_argument("generator: n must be >= 2");
  }
  if (config.supply_frac <= 0.0 || config.demand_frac <= 0.0) {
    throw std::invalid_argument("generator: supply/demand fractions must be positive");
  }
  if (config.supply_frac + config.demand_frac > 1.0 + 1e-12) {
    throw std::invalid_argument("generator: supply_frac + demand_frac must be <= 1");
  }
  auto check_range = [](std::pair<double, double> r, const char* name) {
    if (r.first > r.second || r.first < 0.0) {
      throw std::invalid_argument(std::string("generator: bad range for ") + name);
    }
  };
  check_range(config.var_cost_range, "variable cost");
  check_range(config.fixed_cost_range, "fixed cost");
  check_range(config.supply_range, "supply");
  if (config.supply_range.second <= 0.0) {
    throw std::invalid_argument("generator: supply range must allow positive values");
  }
  if (config.arc_pairs) {
    const long long lo = config.n - 1;
    const long long hi =
        static_cast<long long>(config.n) * (config.n - 1) / 2;
    if (*config.arc_pairs < lo || *config.arc_pairs > hi) {
      throw std::invalid_argument("generator: arc_pairs outside [n-1, n(n-1)/2]");
    }
  }
}

// Uniform random labeled tree by decoding a random Pruefer sequence.
std::vector<std::pair<int, int>> random_spanning_tree(int n, Xoshiro256pp& rng) {
  std::vector<std::pair<int, int>> edges;
  if (n == 2) {
    edges.emplace_back(0, 1);
    return edges;
  }
  std::vector<int> pruefer(n - 2);
  for (int& p : pruefer) p = static_cast<int>(rng.below(n));

  std::vector<int> degree(n, 1);
  for (int p : pruefer) ++degree[p];

  std::set<int> leaves;
  for (int v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.insert(v);
  }
  for (int p : pruefer) {
    const int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.emplace_back(std::min(leaf, p), std::max(leaf, p));
    if (--degree[p] == 1) leaves.insert(p);
  }
  const int a = *leaves.begin();
  const int b = *std::next(leaves.begin());
  edges.emplace_back(std::min(a, b), std::max(a, b));
  return edges;
}

}  // namespace

Instance generate(const GeneratorConfig& config) {
  check_config(config);
  const int n = config.n;

  auto topology = make_stream(config.seed, RngStream::kTopology);
  auto roles = make_stream(config.seed, RngStream::kRoles);
  auto costs = make_stream(config.seed, RngStream::kCosts);
  auto requests = make_stream(config.seed, RngStream::kRequests);

  // Topology: pair count, then a uniform spanning tree, then the remaining
  // undirected edges sampled without replacement.
  const long long max_pairs = static_cast<long long>(n) * (n - 1) / 2;
  const int pairs =
      config.arc_pairs
          ? *config.arc_pairs
          : static_cast<int>(topology.uniform_int(n - 1, max_pairs));

  auto tree = random_spanning_tree(n, topology);
  std::set<std::pair<int, int>> edge_set(tree.begin(), tree.end());

  std::vector<std::pair<int, int>> candidates;
  candidates.reserve(static_cast<size_t>(max_pairs) - edge_set.size());
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!edge_set.count({u, v})) candidates.emplace_back(u, v);
    }
  }
  const size_t extra = static_cast<size_t>(pairs) - (n - 1);
  partial_shuffle(candidates, extra, topology);
  for (size_t i = 0; i < extra; ++i) edge_set.insert(candidates[i]);

  // Roles: iid draw per node, then the feasibility adjustment promised by
  // the recipe (at least one supply and one demand must exist).
  enum Role : int8_t { kSupply, kDemand, kTransshipment };
  std::vector<int8_t> role(n);
  for (int v = 0; v < n; ++v) {
    const double u = roles.uniform();
    if (u < config.supply_frac) {
      role[v] = kSupply;
    } else if (u < config.supply_frac + config.demand_frac) {
      role[v] = kDemand;
    } else {
      role[v] = kTransshipment;
    }
  }
  auto count_role = [&](Role r) {
    return static_cast<int>(std::count(role.begin(), role.end(), r));
  };
  auto promote = [&](Role target, Role avoid) {
    std::vector<int> pool;
    for (int v = 0; v < n; ++v) {
      if (role[v] == kTransshipment) pool.push_back(v);
    }
    if (pool.empty()) {
      for (int v = 0; v < n; ++v) {
        if (role[v] == avoid && count_role(avoid) > 1) pool.push_back(v);
      }
    }
    if (pool.empty()) {
      throw std::invalid_argument("generator: cannot satisfy role constraints");
    }
    role[pool[roles.below(pool.size())]] = target;
  };
  if (count_role(kSupply) == 0) promote(kSupply, kDemand);
  if (count_role(kDemand) == 0) promote(kDemand, kSupply);

  // Requests: each supply node draws its own amount; the supply total is
  // split over demand nodes by normalized uniform weights, with the last
  // demand node absorbing the residual so the instance balances exactly.
  Instance instance;
  instance.label = config.label.empty()
                       ? "fcnf-n" + std::to_string(n) + "-s" +
                             std::to_string(config.seed)
                       : config.label;
  instance.seed = static_cast<int64_t>(config.seed);
  instance.nodes.resize(n);
  for (int v = 0; v < n; ++v) instance.nodes[v].id = v;

  double total_supply = 0.0;
  for (int v = 0; v < n; ++v) {
    if (role[v] == kSupply) {
      const double amount =
          requests.uniform(config.supply_range.first, config.supply_range.second);
      instance.nodes[v].request = amount;
      total_supply += amount;
    }
  }

  std::vector<int> demand_nodes;
  for (int v = 0; v < n; ++v) {
    if (role[v] == kDemand) demand_nodes.push_back(v);
  }
  std::vector<double> weights(demand_nodes.size());
  double weight_sum = 0.0;
  for (double& w : weights) {
    w = requests.uniform();
    weight_sum += w;
  }
  if (weight_sum <= 0.0) weight_sum = 1.0;
  double assigned = 0.0;
  for (size_t i = 0; i + 1 < demand_nodes.size(); ++i) {
    const double amount = total_supply * weights[i] / weight_sum;
    instance.nodes[demand_nodes[i]].request = -amount;
    assigned += amount;
  }
  instance.nodes[demand_nodes.back()].request = -(total_supply - assigned);

  // Costs: each directed arc draws independently, in arc-id order. The two
  // directions of a pair are distinct arcs with their own costs.
  for (const auto& [u, v] : edge_set) {
    for (const auto& [from, to] : {std::pair{u, v}, std::pair{v, u}}) {
      Arc arc;
      arc.from = from;
      arc.to = to;
      arc.variable_cost =
          costs.uniform(config.var_cost_range.first, config.var_cost_range.second);
      arc.fixed_cost = costs.uniform(config.fixed_cost_range.first,
                                     config.fixed_cost_range.second);
      arc.capacity = total_supply;
      instance.arcs.push_back(arc);
    }
  }
  return instance;
}

Instance generate_testbed(GeneratorConfig config) {
  config.var_cost_range = {0.0, 10.0};
  config.fixed_cost_range = {20000.0, 60000.0};
  config.supply_range = {1000.0, 2000.0};
  return generate(config);
}

}  // namespace fcnf
