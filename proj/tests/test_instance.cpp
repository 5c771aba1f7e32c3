#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fcnf/instance.hpp"
#include "oracles.hpp"

using namespace fcnf;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("fcnf_test_" + name);
}

bool any_contains(const std::vector<std::string>& violations,
                  const std::string& needle) {
  for (const auto& v : violations) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validate accepts the tiny instance") {
  CHECK(validate(testing::tiny_instance()).empty());
}

TEST_CASE("validate reports imbalance") {
  Instance instance = testing::tiny_instance();
  instance.nodes[2].request = -9.0;
  const auto violations = validate(instance);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "imbalance: net request = 1");
}

TEST_CASE("validate reports disconnection") {
  Instance instance;
  instance.label = "two-components";
  instance.nodes = {{0, 5.0}, {1, -5.0}, {2, 3.0}, {3, -3.0}};
  instance.arcs = {{0, 1, 1.0, 1.0, 8.0}, {2, 3, 1.0, 1.0, 8.0}};
  CHECK(any_contains(validate(instance), "disconnected"));
}

TEST_CASE("validate reports duplicates and self-loops") {
  Instance instance = testing::tiny_instance();
  instance.arcs.push_back({0, 1, 2.0, 3.0, 10.0});
  CHECK(any_contains(validate(instance), "duplicate arc (0,1)"));

  Instance loop = testing::tiny_instance();
  loop.arcs.push_back({1, 1, 2.0, 3.0, 10.0});
  CHECK(any_contains(validate(loop), "self-loop"));
}

TEST_CASE("objective_value on the tiny instance") {
  const Instance instance = testing::tiny_instance();

  // Chain flows: hand-recomputed sum c*x + f*y = (10+5) + (10+5) = 30.
  const std::vector<double> chain = {10.0, 10.0, 0.0};
  const std::vector<int8_t> chain_open = {1, 1, 0};
  CHECK(objective_value(instance, chain, chain_open) == doctest::Approx(30.0));

  const std::vector<double> zero = {0.0, 0.0, 0.0};
  const std::vector<int8_t> closed = {0, 0, 0};
  CHECK(objective_value(instance, zero, closed) == 0.0);

  // Direct route: 10*3 + 20 = 50.
  const std::vector<double> direct = {0.0, 0.0, 10.0};
  const std::vector<int8_t> direct_open = {0, 0, 1};
  CHECK(objective_value(instance, direct, direct_open) == doctest::Approx(50.0));
}

TEST_CASE("objective_value rejects misaligned inputs") {
  const Instance instance = testing::tiny_instance();
  const std::vector<double> flows = {1.0};
  const std::vector<int8_t> open = {1};
  CHECK_THROWS_AS(objective_value(instance, flows, open), std::invalid_argument);
}

TEST_CASE("objective scales the variable-cost term exactly") {
  // Powers of two keep the scaling exact in floating point.
  const Instance instance = testing::tiny_instance();
  const std::vector<double> flows = {10.0, 10.0, 0.0};
  const std::vector<int8_t> open = {1, 1, 0};
  const std::vector<double> zero_flows = {0.0, 0.0, 0.0};
  const double base = objective_value(instance, flows, open);
  const double fixed = objective_value(instance, zero_flows, open);
  for (double alpha : {0.5, 2.0, 4.0}) {
    std::vector<double> scaled = flows;
    for (double& x : scaled) x *= alpha;
    CHECK(objective_value(instance, scaled, open) ==
          fixed + alpha * (base - fixed));
  }
}

TEST_CASE("instance json round trip is bit exact") {
  Instance instance = testing::tiny_instance();
  instance.seed = 1234567;
  instance.nodes[0].request = 10.000000000000123;
  instance.nodes[2].request = -10.000000000000123;
  const auto path = temp_file("roundtrip.json");
  write_instance(instance, path);
  const Instance loaded = read_instance(path);

  CHECK(loaded.label == instance.label);
  REQUIRE(loaded.seed.has_value());
  CHECK(*loaded.seed == 1234567);
  REQUIRE(loaded.nodes.size() == instance.nodes.size());
  for (size_t i = 0; i < instance.nodes.size(); ++i) {
    CHECK(loaded.nodes[i].request == instance.nodes[i].request);
  }
  REQUIRE(loaded.arcs.size() == instance.arcs.size());
  for (size_t a = 0; a < instance.arcs.size(); ++a) {
    CHECK(loaded.arcs[a].from == instance.arcs[a].from);
    CHECK(loaded.arcs[a].to == instance.arcs[a].to);
    CHECK(loaded.arcs[a].variable_cost == instance.arcs[a].variable_cost);
    CHECK(loaded.arcs[a].fixed_cost == instance.arcs[a].fixed_cost);
    CHECK(loaded.arcs[a].capacity == instance.arcs[a].capacity);
  }

  // Write again: identical bytes.
  const auto path2 = temp_file("roundtrip2.json");
  write_instance(loaded, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  fs::remove(path);
  fs::remove(path2);
}

TEST_CASE("loader rejects duplicate arcs with the pair named") {
  const auto path = temp_file("duplicate.json");
  std::ofstream out(path);
  out << R"({"label":"dup","seed":null,
    "nodes":[{"id":0,"request":10},{"id":1,"request":-10}],
    "arcs":[{"from":0,"to":1,"c":1,"f":1,"M":10},
            {"from":0,"to":1,"c":2,"f":2,"M":10}]})";
  out.close();
  CHECK_THROWS_WITH_AS(read_instance(path),
                       doctest::Contains("duplicate arc (0,1)"), std::runtime_error);
  fs::remove(path);
}

TEST_CASE("loader fills missing capacity with the total supply") {
  const auto path = temp_file("nocap.json");
  std::ofstream out(path);
  out << R"({"label":"nocap","seed":null,
    "nodes":[{"id":0,"request":7.5},{"id":1,"request":-7.5}],
    "arcs":[{"from":0,"to":1,"c":1,"f":1},{"from":1,"to":0,"c":1,"f":1,"M":null}]})";
  out.close();
  const Instance instance = read_instance(path);
  CHECK(instance.arcs[0].capacity == 7.5);
  CHECK(instance.arcs[1].capacity == 7.5);
  fs::remove(path);
}

TEST_CASE("loader names the missing field") {
  const auto path = temp_file("missing.json");
  std::ofstream out(path);
  out << R"({"label":"bad","seed":null,
    "nodes":[{"id":0,"request":1},{"id":1,"request":-1}],
    "arcs":[{"from":0,"to":1,"c":1}]})";
  out.close();
  CHECK_THROWS_WITH_AS(read_instance(path), doctest::Contains("$.arcs[0].f"),
                       std::runtime_error);
  fs::remove(path);
}

TEST_CASE("validate_solution checks balance and coupling") {
  const Instance instance = testing::tiny_instance();
  Solution solution;
  solution.flows = {10.0, 10.0, 0.0};
  solution.open = {1, 1, 0};
  solution.objective = 30.0;
  CHECK(validate_solution(instance, solution).empty());

  Solution closed_flow = solution;
  closed_flow.open[0] = 0;
  CHECK(!validate_solution(instance, closed_flow).empty());

  Solution unbalanced = solution;
  unbalanced.flows[1] = 9.0;
  CHECK(!validate_solution(instance, unbalanced).empty());
}

TEST_CASE("solution json round trip") {
  Solution solution;
  solution.flows = {10.0, 10.0, 0.0};
  solution.open = {1, 1, 0};
  solution.objective = 30.0;
  solution.method = SolveMethod::kExact;
  solution.wall_time = 0.25;
  solution.optimal = true;

  const auto path = temp_file("solution.json");
  write_solution(solution, path);
  const Solution loaded = read_solution(path);
  CHECK(loaded.objective == solution.objective);
  CHECK(loaded.method == SolveMethod::kExact);
  CHECK(loaded.optimal);
  CHECK(loaded.flows == solution.flows);
  CHECK(loaded.open == solution.open);
  fs::remove(path);
}
