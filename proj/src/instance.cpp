#include "fcnf/instance.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "fcnf/csv.hpp"
#include "json.hpp"

namespace fcnf {

using ordered_json = nlohmann::ordered_json;

double Instance::total_supply() const {
  double s = 0.0;
  for (const Node& node : nodes) {
    if (node.request > 0.0) s += node.request;
  }
  return s;
}

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::kExact: return "exact";
    case SolveMethod::kLpRounded: return "lp-rounded";
    case SolveMethod::kRbr: return "rbr";
    case SolveMethod::kBruteForce: return "brute-force";
  }
  return "exact";
}

SolveMethod method_from_string(std::string_view name) {
  if (name == "exact") return SolveMethod::kExact;
  if (name == "lp-rounded") return SolveMethod::kLpRounded;
  if (name == "rbr") return SolveMethod::kRbr;
  if (name == "brute-force") return SolveMethod::kBruteForce;
  throw std::runtime_error("unknown solve method: " + std::string(name));
}

namespace {

// Union-find over nodes, ignoring arc direction.
class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace

std::vector<std::string> validate(const Instance& instance) {
  std::vector<std::string> violations;
  const int n = instance.num_nodes();
  const int m = instance.num_arcs();

  if (n < 2) violations.push_back("too few nodes: n = " + std::to_string(n));
  if (m < 1) violations.push_back("no arcs");

  for (int i = 0; i < n; ++i) {
    if (instance.nodes[i].id != i) {
      violations.push_back("node ids not contiguous: slot " + std::to_string(i) +
                           " holds id " + std::to_string(instance.nodes[i].id));
      break;
    }
  }

  std::set<std::pair<int, int>> seen;
  for (int a = 0; a < m; ++a) {
    const Arc& arc = instance.arcs[a];
    if (arc.from < 0 || arc.from >= n || arc.to < 0 || arc.to >= n) {
      violations.push_back("arc " + std::to_string(a) + " endpoint out of range");
      continue;
    }
    if (arc.from == arc.to) {
      violations.push_back("self-loop at node " + std::to_string(arc.from));
    }
    if (!seen.insert({arc.from, arc.to}).second) {
      violations.push_back("duplicate arc (" + std::to_string(arc.from) + "," +
                           std::to_string(arc.to) + ")");
    }
    if (arc.variable_cost < 0.0) {
      violations.push_back("negative variable cost on arc " + std::to_string(a));
    }
    if (arc.fixed_cost < 0.0) {
      violations.push_back("negative fixed cost on arc " + std::to_string(a));
    }
    if (!(arc.capacity > 0.0)) {
      violations.push_back("non-positive capacity on arc " + std::to_string(a));
    }
  }

  if (n >= 1) {
    double net = 0.0;
    for (const Node& node : instance.nodes) net += node.request;
    const double supply = instance.total_supply();
    if (std::abs(net) > kBalanceRelTol * std::max(1.0, supply)) {
      violations.push_back("imbalance: net request = " + csv::format_double(net));
    }
  }

  if (n >= 2 && m >= 1) {
    DisjointSet components(n);
    for (const Arc& arc : instance.arcs) {
      if (arc.from >= 0 && arc.from < n && arc.to >= 0 && arc.to < n) {
        components.unite(arc.from, arc.to);
      }
    }
    const int root = components.find(0);
    for (int v = 1; v < n; ++v) {
      if (components.find(v) != root) {
        violations.push_back("disconnected");
        break;
      }
    }
  }

  return violations;
}

std::vector<std::string> validate_solution(const Instance& instance,
                                           const Solution& solution) {
  std::vector<std::string> violations;
  const int n = instance.num_nodes();
  const int m = instance.num_arcs();

  if (static_cast<int>(solution.flows.size()) != m ||
      static_cast<int>(solution.open.size()) != m) {
    violations.push_back("flows/open not aligned with arcs");
    return violations;
  }

  std::vector<double> residual(n);
  for (int v = 0; v < n; ++v) residual[v] = -instance.nodes[v].request;

  for (int a = 0; a < m; ++a) {
    const Arc& arc = instance.arcs[a];
    const double x = solution.flows[a];
    const int y = solution.open[a];
    if (y != 0 && y != 1) {
      violations.push_back("open[" + std::to_string(a) + "] not binary");
    }
    if (x < 0.0) {
      violations.push_back("negative flow on arc " + std::to_string(a));
    }
    if (x > 0.0 && y == 0) {
      violations.push_back("flow on closed arc " + std::to_string(a));
    }
    if (x > arc.capacity * y) {
      violations.push_back("capacity violated on arc " + std::to_string(a));
    }
    residual[arc.from] += x;
    residual[arc.to] -= x;
  }

  for (int v = 0; v < n; ++v) {
    if (std::abs(residual[v]) > kSolutionBalanceTol) {
      violations.push_back("balance violated at node " + std::to_string(v) +
                           ": residual = " + csv::format_double(residual[v]));
    }
  }
  return violations;
}

double objective_value(const Instance& instance, std::span<const double> flows,
                       std::span<const int8_t> open) {
  const size_t m = instance.arcs.size();
  if (flows.size() != m || open.size() != m) {
    throw std::invalid_argument("objective_value: flows/open not aligned with arcs");
  }
  double total = 0.0;
  for (size_t a = 0; a < m; ++a) {
    total += instance.arcs[a].variable_cost * flows[a];
    if (open[a]) total += instance.arcs[a].fixed_cost;
  }
  return total;
}

namespace {

const ordered_json& require(const ordered_json& obj, const char* key,
                            const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::runtime_error(path + "." + key + ": missing field");
  }
  return *it;
}

double require_number(const ordered_json& obj, const char* key,
                      const std::string& path) {
  const auto& value = require(obj, key, path);
  if (!value.is_number()) {
    throw std::runtime_error(path + "." + key + ": expected a number");
  }
  return value.get<double>();
}

int require_int(const ordered_json& obj, const char* key, const std::string& path) {
  const auto& value = require(obj, key, path);
  if (!value.is_number_integer()) {
    throw std::runtime_error(path + "." + key + ": expected an integer");
  }
  return value.get<int>();
}

ordered_json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": malformed JSON: " + e.what());
  }
  return doc;
}

void dump_file(const ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

Instance read_instance(const std::filesystem::path& path) {
  const ordered_json doc = parse_file(path);
  if (!doc.is_object()) throw std::runtime_error(path.string() + ": expected an object");

  Instance instance;
  const auto& label = require(doc, "label", "$");
  if (!label.is_string()) throw std::runtime_error("$.label: expected a string");
  instance.label = label.get<std::string>();

  if (doc.contains("seed") && !doc["seed"].is_null()) {
    if (!doc["seed"].is_number_integer()) {
      throw std::runtime_error("$.seed: expected an integer or null");
    }
    instance.seed = doc["seed"].get<int64_t>();
  }

  const auto& nodes = require(doc, "nodes", "$");
  if (!nodes.is_array()) throw std::runtime_error("$.nodes: expected an array");
  for (size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = "$.nodes[" + std::to_string(i) + "]";
    if (!nodes[i].is_object()) throw std::runtime_error(p + ": expected an object");
    Node node;
    node.id = require_int(nodes[i], "id", p);
    node.request = require_number(nodes[i], "request", p);
    instance.nodes.push_back(node);
  }

  const double supply = instance.total_supply();

  const auto& arcs = require(doc, "arcs", "$");
  if (!arcs.is_array()) throw std::runtime_error("$.arcs: expected an array");
  for (size_t i = 0; i < arcs.size(); ++i) {
    const std::string p = "$.arcs[" + std::to_string(i) + "]";
    if (!arcs[i].is_object()) throw std::runtime_error(p + ": expected an object");
    Arc arc;
    arc.from = require_int(arcs[i], "from", p);
    arc.to = require_int(arcs[i], "to", p);
    arc.variable_cost = require_number(arcs[i], "c", p);
    arc.fixed_cost = require_number(arcs[i], "f", p);
    if (arcs[i].contains("M") && !arcs[i]["M"].is_null()) {
      if (!arcs[i]["M"].is_number()) {
        throw std::runtime_error(p + ".M: expected a number or null");
      }
      arc.capacity = arcs[i]["M"].get<double>();
    } else {
      arc.capacity = supply;  // uncapacitated: artificial capacity = S
    }
    instance.arcs.push_back(arc);
  }

  const auto violations = validate(instance);
  if (!violations.empty()) {
    std::string message = path.string() + ": invalid instance:";
    for (const auto& v : violations) message += "\n  " + v;
    throw std::runtime_error(message);
  }
  return instance;
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  ordered_json doc;
  doc["label"] = instance.label;
  if (instance.seed) {
    doc["seed"] = *instance.seed;
  } else {
    doc["seed"] = nullptr;
  }
  doc["nodes"] = ordered_json::array();
  for (const Node& node : instance.nodes) {
    doc["nodes"].push_back({{"id", node.id}, {"request", node.request}});
  }
  doc["arcs"] = ordered_json::array();
  for (const Arc& arc : instance.arcs) {
    doc["arcs"].push_back({{"from", arc.from},
                           {"to", arc.to},
                           {"c", arc.variable_cost},
                           {"f", arc.fixed_cost},
                           {"M", arc.capacity}});
  }
  dump_file(doc, path);
}

Solution read_solution(const std::filesystem::path& path) {
  const ordered_json doc = parse_file(path);
  Solution solution;
  const auto& method = require(doc, "method", "$");
  solution.method = method_from_string(method.get<std::string>());
  solution.objective = require_number(doc, "objective", "$");
  solution.wall_time = require_number(doc, "wall_time", "$");
  solution.optimal = require(doc, "optimal", "$").get<bool>();
  for (const auto& v : require(doc, "flows", "$")) {
    solution.flows.push_back(v.get<double>());
  }
  for (const auto& v : require(doc, "open", "$")) {
    solution.open.push_back(v.get<int8_t>());
  }
  if (solution.flows.size() != solution.open.size()) {
    throw std::runtime_error(path.string() + ": flows/open length mismatch");
  }
  return solution;
}

void write_solution(const Solution& solution, const std::filesystem::path& path) {
  ordered_json doc;
  doc["method"] = std::string(to_string(solution.method));
  doc["objective"] = solution.objective;
  doc["wall_time"] = solution.wall_time;
  doc["optimal"] = solution.optimal;
  doc["flows"] = solution.flows;
  doc["open"] = ordered_json::array();
  for (int8_t y : solution.open) doc["open"].push_back(static_cast<int>(y));
  dump_file(doc, path);
}

}  // namespace fcnf
