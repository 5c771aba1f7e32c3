#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fcnf {

// Balance tolerance for instance validation is relative to total supply;
// solver outputs are checked against the absolute tolerance below.
inline constexpr double kBalanceRelTol = 1e-9;
inline constexpr double kSolutionBalanceTol = 1e-6;

// Threshold separating "this arc carries flow" from solver noise.
inline double flow_epsilon(double total_supply) {
  return 1e-7 * total_supply;
}

struct Node {
  int id = 0;
  double request = 0.0;  // > 0 supply, < 0 demand, 0 transshipment
};

struct Arc {
  int from = 0;
  int to = 0;
  double variable_cost = 0.0;
  double fixed_cost = 0.0;
  double capacity = 0.0;
};

struct Instance {
  std::string label;
  std::optional<int64_t> seed;
  std::vector<Node> nodes;
  std::vector<Arc> arcs;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_arcs() const { return static_cast<int>(arcs.size()); }
  double total_supply() const;  // S = sum of positive requests
};

enum class SolveMethod { kExact, kLpRounded, kRbr, kBruteForce };

std::string_view to_string(SolveMethod method);
SolveMethod method_from_string(std::string_view name);

struct Solution {
  std::vector<double> flows;  // indexed by arc id
  std::vector<int8_t> open;   // 0/1, indexed by arc id
  double objective = 0.0;
  SolveMethod method = SolveMethod::kExact;
  double wall_time = 0.0;
  bool optimal = false;
};

// Returns one description per violated invariant; empty means valid.
std::vector<std::string> validate(const Instance& instance);
std::vector<std::string> validate_solution(const Instance& instance,
                                           const Solution& solution);

double objective_value(const Instance& instance, std::span<const double> flows,
                       std::span<const int8_t> open);

// JSON round trip is bit-exact for all numeric fields. Loading runs the full
// schema check plus validate(); any problem throws with the offending field.
Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& instance, const std::filesystem::path& path);

Solution read_solution(const std::filesystem::path& path);
void write_solution(const Solution& solution, const std::filesystem::path& path);

}  // namespace fcnf
