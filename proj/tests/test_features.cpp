#include <set>

#include "doctest.h"
#include "fcnf/features.hpp"
#include "fcnf/generator.hpp"
#include "fcnf/lp_relaxation.hpp"
#include "oracles.hpp"

using namespace fcnf;

TEST_CASE("feature name contract") {
  const auto names = feature_names();
  REQUIRE(names.size() == 33);
  CHECK(names[0] == "n");
  CHECK(names[1] == "m");
  CHECK(names[2] == "rho");
  CHECK(names[3] == "s_bar");
  std::set<std::string_view> unique(names.begin(), names.end());
  CHECK(unique.size() == 33);
  CHECK(feature_index("l_bar") == feat::kLBar);
  CHECK(feature_index("no_such") == -1);
}

TEST_CASE("tiny instance arc A->B, every coordinate recomputed by hand") {
  // Independent recount of the definitions: degrees and request sums by
  // direct enumeration of the three arcs, then normalized.
  const Instance instance = testing::tiny_instance();
  const RelaxationResult relaxation = solve_lp(instance);
  const auto vectors = extract(instance, relaxation);
  REQUIRE(vectors.size() == 3);

  const FeatureVector& fv = vectors[0];  // arc A->B
  CHECK(fv[feat::kN] == 3.0);
  CHECK(fv[feat::kM] == 3.0);
  CHECK(fv[feat::kRho] == doctest::Approx(0.5));        // 3 / (2*C(3,2)) = 3/6
  CHECK(fv[feat::kSBar] == doctest::Approx(10.0 / 3));  // S/n
  CHECK(fv[feat::kC] == 1.0);
  CHECK(fv[feat::kF] == 5.0);
  CHECK(fv[feat::kGamma] == doctest::Approx(5.0));
  CHECK(fv[feat::kLBar] == doctest::Approx(1.0));  // chain carries all flow
  CHECK(fv[feat::kLBin] == 1.0);
  CHECK(fv[feat::kTi] == 1.0);   // A supplies
  CHECK(fv[feat::kTj] == 0.0);   // B transships
  CHECK(fv[feat::kRi] == doctest::Approx(1.0));
  CHECK(fv[feat::kRj] == 0.0);

  // i = A: out-neighbors {B transship, C demand}; no in-arcs.
  CHECK(fv[feature_index("r_out_s_i")] == 0.0);
  CHECK(fv[feature_index("r_out_d_i")] == doctest::Approx(-1.0));
  CHECK(fv[feature_index("r_in_s_i")] == 0.0);
  CHECK(fv[feature_index("r_in_d_i")] == 0.0);
  CHECK(fv[feature_index("d_out_i")] == doctest::Approx(2.0 / 3));
  CHECK(fv[feature_index("d_out_s_i")] == 0.0);
  CHECK(fv[feature_index("d_out_d_i")] == doctest::Approx(1.0 / 3));
  CHECK(fv[feature_index("d_in_i")] == 0.0);
  CHECK(fv[feature_index("d_in_s_i")] == 0.0);
  CHECK(fv[feature_index("d_in_d_i")] == 0.0);

  // j = B: one out-arc to demand C, one in-arc from supply A.
  CHECK(fv[feature_index("r_out_s_j")] == 0.0);
  CHECK(fv[feature_index("r_out_d_j")] == doctest::Approx(-1.0));
  CHECK(fv[feature_index("r_in_s_j")] == doctest::Approx(1.0));
  CHECK(fv[feature_index("r_in_d_j")] == 0.0);
  CHECK(fv[feature_index("d_out_j")] == doctest::Approx(1.0 / 3));
  CHECK(fv[feature_index("d_out_s_j")] == 0.0);
  CHECK(fv[feature_index("d_out_d_j")] == doctest::Approx(1.0 / 3));
  CHECK(fv[feature_index("d_in_j")] == doctest::Approx(1.0 / 3));
  CHECK(fv[feature_index("d_in_s_j")] == doctest::Approx(1.0 / 3));
  CHECK(fv[feature_index("d_in_d_j")] == 0.0);
}

TEST_CASE("gamma floors a zero variable cost") {
  Instance instance = testing::tiny_instance();
  instance.arcs[0].variable_cost = 0.0;
  const RelaxationResult relaxation = solve_lp(instance);
  const auto vectors = extract(instance, relaxation);
  CHECK(vectors[0][feat::kGamma] == doctest::Approx(5.0 / 1e-9));
  CHECK(vectors[0][feat::kC] == 0.0);  // the raw feature stays raw
}

TEST_CASE("request-free instance zeroes all request features") {
  Instance instance = testing::tiny_instance();
  for (Node& node : instance.nodes) node.request = 0.0;
  const RelaxationResult relaxation = solve_lp(instance);
  const auto vectors = extract(instance, relaxation);
  for (const auto& fv : vectors) {
    CHECK(fv[feat::kSBar] == 0.0);
    CHECK(fv[feat::kRi] == 0.0);
    CHECK(fv[feat::kRj] == 0.0);
    for (const char* name : {"r_out_s_i", "r_out_d_i", "r_in_s_i", "r_in_d_i",
                             "r_out_s_j", "r_out_d_j", "r_in_s_j", "r_in_d_j"}) {
      CHECK(fv[feature_index(name)] == 0.0);
    }
  }
}

TEST_CASE("anti-parallel arcs swap their node blocks exactly") {
  GeneratorConfig config;
  config.n = 8;
  config.seed = 314;
  const Instance instance = generate(config);
  const RelaxationResult relaxation = solve_lp(instance);
  const auto vectors = extract(instance, relaxation);

  for (int a = 0; a < instance.num_arcs(); ++a) {
    for (int b = a + 1; b < instance.num_arcs(); ++b) {
      if (instance.arcs[a].from != instance.arcs[b].to ||
          instance.arcs[a].to != instance.arcs[b].from) {
        continue;
      }
      const FeatureVector& fa = vectors[a];
      const FeatureVector& fb = vectors[b];
      CHECK(fa[feat::kTi] == fb[feat::kTj]);
      CHECK(fa[feat::kTj] == fb[feat::kTi]);
      CHECK(fa[feat::kRi] == fb[feat::kRj]);
      CHECK(fa[feat::kRj] == fb[feat::kRi]);
      for (int offset = 0; offset < 4; ++offset) {
        CHECK(fa[13 + offset] == fb[17 + offset]);  // r_*_i vs r_*_j
        CHECK(fa[17 + offset] == fb[13 + offset]);
      }
      for (int offset = 0; offset < 6; ++offset) {
        CHECK(fa[21 + offset] == fb[27 + offset]);  // d_*_i vs d_*_j
        CHECK(fa[27 + offset] == fb[21 + offset]);
      }
    }
  }
}

TEST_CASE("degree features recount the raw degrees") {
  GeneratorConfig config;
  config.n = 7;
  config.seed = 2718;
  const Instance instance = generate(config);
  const RelaxationResult relaxation = solve_lp(instance);
  const auto vectors = extract(instance, relaxation);

  const int n = instance.num_nodes();
  std::vector<int> outdeg(n, 0), indeg(n, 0);
  for (const Arc& arc : instance.arcs) {
    ++outdeg[arc.from];
    ++indeg[arc.to];
  }
  int out_total = 0, in_total = 0;
  for (int v = 0; v < n; ++v) {
    out_total += outdeg[v];
    in_total += indeg[v];
  }
  CHECK(out_total == instance.num_arcs());
  CHECK(in_total == instance.num_arcs());

  for (int a = 0; a < instance.num_arcs(); ++a) {
    const Arc& arc = instance.arcs[a];
    CHECK(vectors[a][feature_index("d_out_i")] ==
          doctest::Approx(static_cast<double>(outdeg[arc.from]) / n));
    CHECK(vectors[a][feature_index("d_in_j")] ==
          doctest::Approx(static_cast<double>(indeg[arc.to]) / n));
    // Supply + demand out-neighbors never exceed the out-degree.
    CHECK(vectors[a][feature_index("d_out_s_i")] +
              vectors[a][feature_index("d_out_d_i")] <=
          vectors[a][feature_index("d_out_i")] + 1e-12);
  }
}

TEST_CASE("neighbor-once mode coincides without parallel arcs") {
  GeneratorConfig config;
  config.n = 6;
  config.seed = 99;
  const Instance instance = generate(config);
  const RelaxationResult relaxation = solve_lp(instance);
  FeatureOptions per_arc, dedupe;
  dedupe.per_arc_neighbor_sums = false;
  const auto a = extract(instance, relaxation, per_arc);
  const auto b = extract(instance, relaxation, dedupe);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    for (int f = 0; f < kFeatureCount; ++f) CHECK(a[i][f] == b[i][f]);
  }
}
