#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcnf/features.hpp"
#include "fcnf/instance.hpp"

namespace fcnf {

struct DatasetRecord {
  std::string instance_label;
  int arc_from = 0;
  int arc_to = 0;
  FeatureVector features{};
  std::optional<int> y;  // empty = unlabeled
};

struct DatasetProvenance {
  std::string recipe;
  std::vector<int64_t> seeds;
  int64_t instances = 0;
  int64_t rows = 0;
  int64_t positives = 0;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  DatasetProvenance provenance;

  int64_t count_positive() const;
  int64_t count_negative() const;
};

struct SolvedInstance {
  const Instance* instance = nullptr;
  const std::vector<FeatureVector>* features = nullptr;
  const Solution* solution = nullptr;  // exact solution carrying the labels
};

struct BuildReport {
  Dataset dataset;
  std::vector<std::string> skipped_labels;  // instances excluded as unproven
};

// One record per arc, labeled from the exact solution's open flags.
// Instances whose solution is not proven optimal are excluded (a timeout
// incumbent would poison the labels). A missing solution is an error.
BuildReport build_dataset(std::span<const SolvedInstance> inputs);

// Keeps every positive record and draws the same number of negatives
// uniformly without replacement (all of them if there are fewer). Row order
// is preserved, so output is deterministic given the seed.
Dataset undersample(const Dataset& dataset, uint64_t seed);

// Split is by instance: all arcs of an instance land on the same side.
std::pair<Dataset, Dataset> split_by_instance(const Dataset& dataset,
                                              double train_fraction,
                                              uint64_t seed);

// CSV contract: instance_label, arc_from, arc_to, the 33 feature columns in
// contract order, then y (blank when unlabeled). Lossless round trip.
void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_provenance(const DatasetProvenance& provenance,
                      const std::filesystem::path& path);

}  // namespace fcnf
