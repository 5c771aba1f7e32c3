#include "fcnf/features.hpp"

#include <algorithm>
#include <stdexcept>

namespace fcnf {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "n",         "m",         "rho",       "s_bar",     "c",
    "f",         "gamma",     "l_bar",     "l_bin",     "t_i",
    "t_j",       "r_i",       "r_j",       "r_out_s_i", "r_out_d_i",
    "r_in_s_i",  "r_in_d_i",  "r_out_s_j", "r_out_d_j", "r_in_s_j",
    "r_in_d_j",  "d_out_i",   "d_out_s_i", "d_out_d_i", "d_in_i",
    "d_in_s_i",  "d_in_d_i",  "d_out_j",   "d_out_s_j", "d_out_d_j",
    "d_in_j",    "d_in_s_j",  "d_in_d_j"};

constexpr double kGammaCostFloor = 1e-9;

struct NodeAggregates {
  double d_out = 0, d_out_s = 0, d_out_d = 0;
  double d_in = 0, d_in_s = 0, d_in_d = 0;
  double r_out_s = 0, r_out_d = 0;
  double r_in_s = 0, r_in_d = 0;
};

int node_type(double request) {
  if (request > 0.0) return 1;
  if (request < 0.0) return -1;
  return 0;
}

}  // namespace

std::span<const std::string_view> feature_names() { return kNames; }

int feature_index(std::string_view name) {
  const auto it = std::find(kNames.begin(), kNames.end(), name);
  return it == kNames.end() ? -1 : static_cast<int>(it - kNames.begin());
}

std::vector<FeatureVector> extract(const Instance& instance,
                                   const RelaxationResult& relaxation,
                                   const FeatureOptions& options) {
  const int n = instance.num_nodes();
  const int m = instance.num_arcs();
  if (static_cast<int>(relaxation.flows.size()) != m) {
    throw std::invalid_argument("extract: relaxation not aligned with instance");
  }

  const double supply = instance.total_supply();
  const auto [l_bar, l_bin] = relaxation_features(relaxation, instance);

  std::vector<NodeAggregates> agg(n);
  auto accumulate = [&](int from, int to) {
    const double to_req = instance.nodes[to].request;
    const double from_req = instance.nodes[from].request;
    NodeAggregates& tail = agg[from];
    tail.d_out += 1;
    if (to_req > 0) {
      tail.d_out_s += 1;
      tail.r_out_s += to_req;
    } else if (to_req < 0) {
      tail.d_out_d += 1;
      tail.r_out_d += to_req;
    }
    NodeAggregates& head = agg[to];
    head.d_in += 1;
    if (from_req > 0) {
      head.d_in_s += 1;
      head.r_in_s += from_req;
    } else if (from_req < 0) {
      head.d_in_d += 1;
      head.r_in_d += from_req;
    }
  };

  if (options.per_arc_neighbor_sums) {
    for (const Arc& arc : instance.arcs) accumulate(arc.from, arc.to);
  } else {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(instance.arcs.size());
    for (const Arc& arc : instance.arcs) pairs.emplace_back(arc.from, arc.to);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& [from, to] : pairs) accumulate(from, to);
  }

  const double request_scale = supply > 0.0 ? 1.0 / supply : 0.0;
  const double degree_scale = 1.0 / n;
  const double rho =
      static_cast<double>(m) / (static_cast<double>(n) * (n - 1));
  const double s_bar = supply / n;

  std::vector<FeatureVector> vectors(m);
  for (int a = 0; a < m; ++a) {
    const Arc& arc = instance.arcs[a];
    const int i = arc.from;
    const int j = arc.to;
    FeatureVector& fv = vectors[a];

    fv[feat::kN] = n;
    fv[feat::kM] = m;
    fv[feat::kRho] = rho;
    fv[feat::kSBar] = s_bar;
    fv[feat::kC] = arc.variable_cost;
    fv[feat::kF] = arc.fixed_cost;
    fv[feat::kGamma] =
        arc.fixed_cost / std::max(arc.variable_cost, kGammaCostFloor);
    fv[feat::kLBar] = l_bar[a];
    fv[feat::kLBin] = l_bin[a];
    fv[feat::kTi] = node_type(instance.nodes[i].request);
    fv[feat::kTj] = node_type(instance.nodes[j].request);
    fv[feat::kRi] = instance.nodes[i].request * request_scale;
    fv[feat::kRj] = instance.nodes[j].request * request_scale;

    int slot = 13;
    for (int v : {i, j}) {
      const NodeAggregates& node = agg[v];
      fv[slot++] = node.r_out_s * request_scale;
      fv[slot++] = node.r_out_d * request_scale;
      fv[slot++] = node.r_in_s * request_scale;
      fv[slot++] = node.r_in_d * request_scale;
    }
    for (int v : {i, j}) {
      const NodeAggregates& node = agg[v];
      fv[slot++] = node.d_out * degree_scale;
      fv[slot++] = node.d_out_s * degree_scale;
      fv[slot++] = node.d_out_d * degree_scale;
      fv[slot++] = node.d_in * degree_scale;
      fv[slot++] = node.d_in_s * degree_scale;
      fv[slot++] = node.d_in_d * degree_scale;
    }
  }
  return vectors;
}

}  // namespace fcnf
