#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "fcnf/generator.hpp"
#include "fcnf/instance.hpp"
#include "fcnf/lp_relaxation.hpp"

using namespace fcnf;

TEST_CASE("train-era recipe produces valid instances in range") {
  GeneratorConfig config;
  config.n = 12;
  config.seed = 42;
  const Instance instance = generate(config);

  CHECK(validate(instance).empty());
  const int pairs = instance.num_arcs() / 2;
  CHECK(instance.num_arcs() % 2 == 0);
  CHECK(pairs >= 11);
  CHECK(pairs <= 66);
  for (const Arc& arc : instance.arcs) {
    CHECK(arc.variable_cost >= 0.0);
    CHECK(arc.variable_cost <= 20.0);
    CHECK(arc.fixed_cost >= 20000.0);
    CHECK(arc.fixed_cost <= 60000.0);
    CHECK(arc.capacity == instance.total_supply());
  }
  for (const Node& node : instance.nodes) {
    if (node.request > 0.0) {
      CHECK(node.request >= 1000.0);
      CHECK(node.request <= 2000.0);
    }
  }
}

TEST_CASE("n=2 with half/half fractions forces one of each role") {
  GeneratorConfig config;
  config.n = 2;
  config.supply_frac = 0.5;
  config.demand_frac = 0.5;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    config.seed = seed;
    const Instance instance = generate(config);
    CHECK(instance.num_arcs() == 2);
    int supply = 0, demand = 0;
    for (const Node& node : instance.nodes) {
      supply += node.request > 0.0;
      demand += node.request < 0.0;
    }
    CHECK(supply == 1);
    CHECK(demand == 1);
  }
}

TEST_CASE("same seed gives identical bytes, different seed differs") {
  namespace fs = std::filesystem;
  GeneratorConfig config;
  config.n = 9;
  config.seed = 7;

  auto dump = [&](const Instance& instance, const char* name) {
    const fs::path path = fs::temp_directory_path() / name;
    write_instance(instance, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    fs::remove(path);
    return bytes;
  };

  const std::string first = dump(generate(config), "gen_a.json");
  const std::string second = dump(generate(config), "gen_b.json");
  CHECK(first == second);

  config.seed = 8;
  CHECK(dump(generate(config), "gen_c.json") != first);
}

TEST_CASE("complete graph when arc_pairs hits the maximum") {
  GeneratorConfig config;
  config.n = 10;
  config.seed = 3;
  config.arc_pairs = 45;
  const Instance instance = generate(config);
  CHECK(instance.num_arcs() == 90);
  // density rho = m / (n(n-1)) = 90/90
  CHECK(static_cast<double>(instance.num_arcs()) / (10 * 9) == 1.0);
}

TEST_CASE("config errors") {
  GeneratorConfig config;
  config.n = 1;
  CHECK_THROWS_AS(generate(config), std::invalid_argument);

  config.n = 5;
  config.supply_frac = 0.0;
  CHECK_THROWS_AS(generate(config), std::invalid_argument);

  config.supply_frac = 0.7;
  config.demand_frac = 0.7;
  CHECK_THROWS_AS(generate(config), std::invalid_argument);

  config.supply_frac = 0.2;
  config.demand_frac = 0.2;
  config.arc_pairs = 3;  // below n-1
  CHECK_THROWS_AS(generate(config), std::invalid_argument);
}

TEST_CASE("testbed recipe keeps variable costs in [0,10]") {
  GeneratorConfig config;
  config.n = 20;
  config.seed = 11;
  const Instance instance = generate_testbed(config);
  CHECK(validate(instance).empty());
  for (const Arc& arc : instance.arcs) {
    CHECK(arc.variable_cost >= 0.0);
    CHECK(arc.variable_cost <= 10.0);
  }
}

TEST_CASE("realized supply fraction stays near the configured 0.2") {
  // Monte-Carlo over 200 test-bed instances; mean within a wide band.
  double fraction_sum = 0.0;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    GeneratorConfig config;
    config.n = 20;
    config.seed = 1000 + seed;
    const Instance instance = generate_testbed(config);
    int supply = 0;
    for (const Node& node : instance.nodes) supply += node.request > 0.0;
    fraction_sum += static_cast<double>(supply) / config.n;
  }
  const double mean = fraction_sum / 200.0;
  CHECK(mean >= 0.15);
  CHECK(mean <= 0.40);
}

TEST_CASE("law of large numbers for variable costs") {
  // Over 500 instances at n=12 with c ~ U(0,20) the mean lands in [9,11].
  double sum = 0.0;
  long long count = 0;
  for (uint64_t seed = 0; seed < 500; ++seed) {
    GeneratorConfig config;
    config.n = 12;
    config.seed = 50000 + seed;
    const Instance instance = generate(config);
    for (const Arc& arc : instance.arcs) {
      sum += arc.variable_cost;
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  CHECK(mean >= 9.0);
  CHECK(mean <= 11.0);
}

TEST_CASE("every generated instance admits a feasible flow") {
  for (uint64_t seed = 0; seed < 25; ++seed) {
    GeneratorConfig config;
    config.n = 6 + static_cast<int>(seed % 7);
    config.seed = 900 + seed;
    const Instance instance = generate(config);
    const RelaxationResult relaxation = solve_lp(instance);  // throws if infeasible
    CHECK(relaxation.relaxed_objective >= 0.0);
  }
}
