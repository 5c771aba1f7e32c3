#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "fcnf/instance.hpp"

namespace fcnf {

// Two recipes share this config: the train-era one (variable costs U(0,20))
// and the test-bed one (U(0,10)); see generate_testbed.
struct GeneratorConfig {
  int n = 0;
  uint64_t seed = 0;
  double supply_frac = 0.2;
  double demand_frac = 0.2;
  std::pair<double, double> var_cost_range{0.0, 20.0};
  std::pair<double, double> fixed_cost_range{20000.0, 60000.0};
  std::pair<double, double> supply_range{1000.0, 2000.0};
  std::optional<int> arc_pairs;  // m/2; drawn uniformly in [n-1, n(n-1)/2] if unset
  std::string label;             // auto-derived from n and seed when empty
};

// Deterministic: the same config yields bit-identical instances. Topology,
// node roles, requests and costs each draw from a separate RNG stream
// (xoshiro256++ seeded via splitmix64), so extending one concern never
// shifts the draws of another.
Instance generate(const GeneratorConfig& config);

// Same recipe with the test-bed cost ranges: c ~ U(0,10), f ~ U(20000,60000),
// supplies ~ U(1000,2000).
Instance generate_testbed(GeneratorConfig config);

}  // namespace fcnf
