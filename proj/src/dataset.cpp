#include "fcnf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "fcnf/csv.hpp"
#include "fcnf/rng.hpp"
#include "json.hpp"

namespace fcnf {

int64_t Dataset::count_positive() const {
  int64_t count = 0;
  for (const auto& r : records) count += (r.y && *r.y == 1) ? 1 : 0;
  return count;
}

int64_t Dataset::count_negative() const {
  int64_t count = 0;
  for (const auto& r : records) count += (r.y && *r.y == 0) ? 1 : 0;
  return count;
}

BuildReport build_dataset(std::span<const SolvedInstance> inputs) {
  BuildReport report;
  std::vector<std::string> missing;
  std::set<std::string> labels_seen;

  for (const SolvedInstance& input : inputs) {
    if (!input.instance || !input.features) {
      throw std::invalid_argument("build_dataset: null instance or features");
    }
    const Instance& instance = *input.instance;
    if (!input.solution) {
      missing.push_back(instance.label);
      continue;
    }
    if (!input.solution->optimal) {
      report.skipped_labels.push_back(instance.label);
      continue;
    }
    if (!labels_seen.insert(instance.label).second) {
      throw std::runtime_error("build_dataset: duplicate instance label: " +
                               instance.label);
    }
    if (input.features->size() != instance.arcs.size() ||
        input.solution->open.size() != instance.arcs.size()) {
      throw std::runtime_error("build_dataset: misaligned inputs for " +
                               instance.label);
    }
    for (size_t a = 0; a < instance.arcs.size(); ++a) {
      DatasetRecord record;
      record.instance_label = instance.label;
      record.arc_from = instance.arcs[a].from;
      record.arc_to = instance.arcs[a].to;
      record.features = (*input.features)[a];
      record.y = input.solution->open[a] ? 1 : 0;
      report.dataset.records.push_back(std::move(record));
      if (instance.seed) {
        if (report.dataset.provenance.seeds.empty() ||
            report.dataset.provenance.seeds.back() != *instance.seed) {
          report.dataset.provenance.seeds.push_back(*instance.seed);
        }
      }
    }
    ++report.dataset.provenance.instances;
  }

  if (!missing.empty()) {
    std::string msg = "build_dataset: missing solutions for:";
    for (const auto& label : missing) msg += " " + label;
    throw std::runtime_error(msg);
  }

  report.dataset.provenance.rows =
      static_cast<int64_t>(report.dataset.records.size());
  report.dataset.provenance.positives = report.dataset.count_positive();
  return report;
}

Dataset undersample(const Dataset& dataset, uint64_t seed) {
  std::vector<size_t> negatives;
  size_t positives = 0;
  for (size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& y = dataset.records[i].y;
    if (!y) continue;
    if (*y == 1) {
      ++positives;
    } else {
      negatives.push_back(i);
    }
  }
  if (positives == 0) {
    throw std::runtime_error("undersample: no positive records, model untrainable");
  }

  auto rng = make_stream(seed, RngStream::kSampling);
  const size_t take = std::min(positives, negatives.size());
  partial_shuffle(negatives, take, rng);
  negatives.resize(take);
  std::sort(negatives.begin(), negatives.end());

  Dataset out;
  out.provenance = dataset.provenance;
  out.provenance.recipe += out.provenance.recipe.empty() ? "undersampled" : "+undersampled";
  size_t next_negative = 0;
  for (size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& record = dataset.records[i];
    if (record.y && *record.y == 1) {
      out.records.push_back(record);
    } else if (next_negative < negatives.size() && negatives[next_negative] == i) {
      out.records.push_back(record);
      ++next_negative;
    }
  }
  out.provenance.rows = static_cast<int64_t>(out.records.size());
  out.provenance.positives = out.count_positive();
  return out;
}

std::pair<Dataset, Dataset> split_by_instance(const Dataset& dataset,
                                              double train_fraction,
                                              uint64_t seed) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    throw std::invalid_argument("split: fraction must be in (0,1)");
  }
  std::vector<std::string> labels;
  std::set<std::string> seen;
  for (const auto& record : dataset.records) {
    if (seen.insert(record.instance_label).second) {
      labels.push_back(record.instance_label);
    }
  }
  if (labels.size() < 2) {
    throw std::runtime_error("split: need at least two instances");
  }

  auto rng = make_stream(seed, RngStream::kSampling);
  shuffle_all(labels, rng);
  size_t train_count = static_cast<size_t>(
      std::llround(train_fraction * static_cast<double>(labels.size())));
  train_count = std::clamp<size_t>(train_count, 1, labels.size() - 1);

  std::set<std::string> train_labels(labels.begin(), labels.begin() + train_count);
  Dataset train, test;
  train.provenance = dataset.provenance;
  test.provenance = dataset.provenance;
  for (const auto& record : dataset.records) {
    (train_labels.count(record.instance_label) ? train : test)
        .records.push_back(record);
  }
  for (Dataset* side : {&train, &test}) {
    side->provenance.rows = static_cast<int64_t>(side->records.size());
    side->provenance.positives = side->count_positive();
  }
  train.provenance.instances = static_cast<int64_t>(train_count);
  test.provenance.instances = static_cast<int64_t>(labels.size() - train_count);
  return {std::move(train), std::move(test)};
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());

  std::vector<std::string> row = {"instance_label", "arc_from", "arc_to"};
  for (const auto& name : feature_names()) row.emplace_back(name);
  row.emplace_back("y");
  csv::write_row(out, row);

  for (const auto& record : dataset.records) {
    row.clear();
    row.push_back(record.instance_label);
    row.push_back(std::to_string(record.arc_from));
    row.push_back(std::to_string(record.arc_to));
    for (double value : record.features) row.push_back(csv::format_double(value));
    row.push_back(record.y ? std::to_string(*record.y) : "");
    csv::write_row(out, row);
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  const size_t expected_columns = 3 + kFeatureCount + 1;
  if (table.header.size() != expected_columns) {
    throw std::runtime_error(path.string() + ": expected " +
                             std::to_string(expected_columns) + " columns, got " +
                             std::to_string(table.header.size()));
  }
  const auto names = feature_names();
  for (int f = 0; f < kFeatureCount; ++f) {
    if (table.header[3 + f] != names[f]) {
      throw std::runtime_error(path.string() + ": column " + std::to_string(3 + f) +
                               " is '" + table.header[3 + f] + "', expected '" +
                               std::string(names[f]) + "'");
    }
  }

  Dataset dataset;
  std::set<std::string> labels;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const std::string context = path.string() + " row " + std::to_string(r + 1);
    if (cells.size() != expected_columns) {
      throw std::runtime_error(context + ": wrong cell count");
    }
    DatasetRecord record;
    record.instance_label = cells[0];
    record.arc_from = static_cast<int>(csv::parse_int(cells[1], context + " arc_from"));
    record.arc_to = static_cast<int>(csv::parse_int(cells[2], context + " arc_to"));
    for (int f = 0; f < kFeatureCount; ++f) {
      record.features[f] =
          csv::parse_double(cells[3 + f], context + " " + std::string(names[f]));
    }
    if (!cells.back().empty()) {
      const long long y = csv::parse_int(cells.back(), context + " y");
      if (y != 0 && y != 1) throw std::runtime_error(context + ": y must be 0 or 1");
      record.y = static_cast<int>(y);
    }
    labels.insert(record.instance_label);
    dataset.records.push_back(std::move(record));
  }
  dataset.provenance.rows = static_cast<int64_t>(dataset.records.size());
  dataset.provenance.positives = dataset.count_positive();
  dataset.provenance.instances = static_cast<int64_t>(labels.size());
  return dataset;
}

void write_provenance(const DatasetProvenance& provenance,
                      const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["recipe"] = provenance.recipe;
  doc["seeds"] = provenance.seeds;
  doc["instances"] = provenance.instances;
  doc["rows"] = provenance.rows;
  doc["positives"] = provenance.positives;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace fcnf
