#include <cmath>

#include "doctest.h"
#include "fcnf/exact_solver.hpp"
#include "fcnf/generator.hpp"
#include "oracles.hpp"

using namespace fcnf;

TEST_CASE("tiny instance solves to the chain") {
  const Instance instance = testing::tiny_instance();
  const ExactResult result = solve_exact(instance);
  REQUIRE(result.status == SolveStatus::kOptimal);
  CHECK(result.solution.objective == doctest::Approx(30.0));
  CHECK(result.solution.open == std::vector<int8_t>{1, 1, 0});
  CHECK(result.solution.optimal);
  CHECK(validate_solution(instance, result.solution).empty());
}

TEST_CASE("blocking the chain reroutes over the direct arc") {
  const Instance instance = testing::tiny_instance();
  RemovalMask mask;
  mask.blocked = {0};
  const ExactResult result = solve_exact(instance, {}, &mask);
  REQUIRE(result.status == SolveStatus::kOptimal);
  CHECK(result.solution.objective == doctest::Approx(50.0));
  CHECK(result.solution.flows[0] == 0.0);
  CHECK(result.solution.open[0] == 0);
}

TEST_CASE("all-zero requests solve to the empty network") {
  Instance instance = testing::tiny_instance();
  for (Node& node : instance.nodes) node.request = 0.0;
  const ExactResult result = solve_exact(instance);
  REQUIRE(result.status == SolveStatus::kOptimal);
  CHECK(result.solution.objective == 0.0);
  for (int8_t open : result.solution.open) CHECK(open == 0);
}

TEST_CASE("masked-off network is infeasible, not a timeout") {
  const Instance instance = testing::tiny_instance();
  RemovalMask mask;
  mask.blocked = {1, 2};  // nothing can reach C
  const ExactResult result = solve_exact(instance, {}, &mask);
  CHECK(result.status == SolveStatus::kInfeasible);
}

TEST_CASE("brute force matches the tiny oracle values") {
  const Instance instance = testing::tiny_instance();
  const ExactResult result = brute_force(instance);
  REQUIRE(result.status == SolveStatus::kOptimal);
  CHECK(result.solution.objective == doctest::Approx(30.0));

  RemovalMask mask;
  mask.blocked = {0};
  const ExactResult blocked = brute_force(instance, &mask);
  REQUIRE(blocked.status == SolveStatus::kOptimal);
  CHECK(blocked.solution.objective == doctest::Approx(50.0));

  mask.blocked = {1, 2};
  CHECK(brute_force(instance, &mask).status == SolveStatus::kInfeasible);
}

TEST_CASE("single-arc instance") {
  Instance instance;
  instance.label = "one-arc";
  instance.nodes = {{0, 5.0}, {1, -5.0}};
  instance.arcs = {{0, 1, 2.0, 7.0, 5.0}};
  const ExactResult result = brute_force(instance);
  REQUIRE(result.status == SolveStatus::kOptimal);
  CHECK(result.solution.objective == doctest::Approx(17.0));  // 5*2 + 7
}

TEST_CASE("brute force rejects oversized instances") {
  GeneratorConfig config;
  config.n = 10;
  config.seed = 5;
  config.arc_pairs = 20;  // m = 40
  const Instance instance = generate(config);
  CHECK_THROWS_AS(brute_force(instance), std::invalid_argument);
}

TEST_CASE("branch and bound equals brute force on random small instances") {
  // The primary correctness property at unit-test scale; the acceptance
  // suite runs the full 200-instance version.
  for (uint64_t seed = 0; seed < 30; ++seed) {
    GeneratorConfig config;
    config.n = 4 + static_cast<int>(seed % 3);
    config.seed = 7100 + seed;
    const long long max_pairs = config.n * (config.n - 1) / 2;
    config.arc_pairs = static_cast<int>(
        std::min<long long>(max_pairs, config.n - 1 + static_cast<int>(seed % 3)));
    const Instance instance = generate(config);
    REQUIRE(instance.num_arcs() <= 14);

    const ExactResult bnb = solve_exact(instance);
    const ExactResult oracle = brute_force(instance);
    REQUIRE(bnb.status == SolveStatus::kOptimal);
    REQUIRE(oracle.status == SolveStatus::kOptimal);
    CHECK(std::abs(bnb.solution.objective - oracle.solution.objective) <=
          1e-6 * std::max(1.0, oracle.solution.objective));
    CHECK(validate_solution(instance, bnb.solution).empty());
  }
}

TEST_CASE("mask monotonicity: blocking more never helps") {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    GeneratorConfig config;
    config.n = 5;
    config.seed = 8200 + seed;
    config.arc_pairs = 6;  // m = 12
    const Instance instance = generate(config);

    RemovalMask small, large;
    small.blocked = {0};
    large.blocked = {0, 3};
    const ExactResult base = solve_exact(instance, {}, &small);
    const ExactResult more = solve_exact(instance, {}, &large);
    if (base.feasible() && more.feasible()) {
      CHECK(more.solution.objective >=
            base.solution.objective - 1e-6 * std::max(1.0, base.solution.objective));
    }
    if (more.feasible()) {
      CHECK(more.solution.flows[0] == 0.0);
      CHECK(more.solution.flows[3] == 0.0);
    }
  }
}

TEST_CASE("node limit returns an incumbent flagged non-optimal") {
  GeneratorConfig config;
  config.n = 10;
  config.seed = 77;
  const Instance instance = generate(config);
  BnBConfig limits;
  limits.node_limit = 1;
  const ExactResult result = solve_exact(instance, limits);
  REQUIRE(result.feasible());
  if (result.status == SolveStatus::kFeasible) {
    CHECK(!result.solution.optimal);
    CHECK(result.best_bound <=
          result.solution.objective + 1e-6 * result.solution.objective);
  }
}
