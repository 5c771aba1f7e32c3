#include "fcnf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "fcnf/rng.hpp"

namespace fcnf {

std::vector<int> labels_of(const Dataset& dataset) {
  std::vector<int> labels;
  labels.reserve(dataset.records.size());
  for (const auto& record : dataset.records) {
    if (!record.y) throw std::invalid_argument("dataset contains unlabeled rows");
    labels.push_back(*record.y);
  }
  return labels;
}

ConfusionMatrix confusion_from_scores(std::span<const double> scores,
                                      std::span<const int> labels, double cutoff) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("confusion: scores/labels length mismatch");
  }
  if (scores.empty()) throw std::invalid_argument("confusion: empty dataset");
  ConfusionMatrix cm;
  for (size_t r = 0; r < scores.size(); ++r) {
    const bool predicted = scores[r] > cutoff;
    if (labels[r] == 0) {
      (predicted ? cm.fn : cm.tn) += 1;
    } else {
      (predicted ? cm.tp : cm.fp) += 1;
    }
  }
  return cm;
}

ConfusionMatrix confusion(const LogitModel& model, const Dataset& dataset,
                          double cutoff) {
  if (cutoff <= 0.0 || cutoff >= 1.0) {
    throw std::invalid_argument("confusion: cutoff must be in (0,1)");
  }
  const std::vector<double> scores = predict_all(model, dataset);
  const std::vector<int> labels = labels_of(dataset);
  return confusion_from_scores(scores, labels, cutoff);
}

double false_cost(const ConfusionMatrix& cm, double c_fpr, double c_fnr) {
  if (c_fpr < 0.0 || c_fnr < 0.0) {
    throw std::invalid_argument("false_cost: weights must be nonnegative");
  }
  return c_fpr * cm.fpr() + c_fnr * cm.fnr();
}

std::pair<double, double> optimal_cutoff(const LogitModel& model,
                                         const Dataset& dataset, double c_fpr,
                                         double c_fnr) {
  const std::vector<double> scores = predict_all(model, dataset);
  const std::vector<int> labels = labels_of(dataset);

  double best_cutoff = 0.01;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= 99; ++step) {
    const double cutoff = step / 100.0;
    const double cost = false_cost(confusion_from_scores(scores, labels, cutoff),
                                   c_fpr, c_fnr);
    if (cost < best_cost) {
      best_cost = cost;
      best_cutoff = cutoff;
    }
  }
  return {best_cutoff, best_cost};
}

RocCurve roc_from_scores(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("roc: scores/labels length mismatch");
  }
  long long positives = 0, negatives = 0;
  for (int y : labels) (y == 1 ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("roc: both classes must be present");
  }

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

  long long tp = 0, fp = 0;
  double auc = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Consume the whole tie group so each distinct score yields one point.
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
    const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
    auc += 0.5 * (tpr + prev_tpr) * (fpr - prev_fpr);
    curve.points.push_back({threshold, fpr, tpr});
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  curve.auc = auc;
  return curve;
}

RocCurve roc_auc(const LogitModel& model, const Dataset& dataset) {
  const std::vector<double> scores = predict_all(model, dataset);
  const std::vector<int> labels = labels_of(dataset);
  return roc_from_scores(scores, labels);
}

double mann_whitney_auc(std::span<const double> scores, std::span<const int> labels) {
  long long positives = 0, negatives = 0;
  for (int y : labels) (y == 1 ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("mann-whitney: both classes must be present");
  }

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Rank-sum with midranks for ties.
  double rank_sum_positive = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_positive += midrank;
    }
    i = j;
  }
  const double u = rank_sum_positive -
                   0.5 * static_cast<double>(positives) *
                       (static_cast<double>(positives) + 1.0);
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

KfoldResult kfold(const Dataset& dataset, int k, const Trainer& trainer,
                  uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");

  std::vector<std::string> labels;
  std::set<std::string> seen;
  for (const auto& record : dataset.records) {
    if (seen.insert(record.instance_label).second) {
      labels.push_back(record.instance_label);
    }
  }
  if (static_cast<int>(labels.size()) < k) {
    throw std::invalid_argument("kfold: fewer instances than folds");
  }

  auto rng = make_stream(seed, RngStream::kFolds);
  shuffle_all(labels, rng);
  std::map<std::string, int> fold_of;
  for (size_t i = 0; i < labels.size(); ++i) {
    fold_of[labels[i]] = static_cast<int>(i % static_cast<size_t>(k));
  }

  KfoldResult result;
  for (int fold = 0; fold < k; ++fold) {
    Dataset train, validation;
    for (const auto& record : dataset.records) {
      (fold_of[record.instance_label] == fold ? validation : train)
          .records.push_back(record);
    }
    const LogitModel model = trainer(train);
    const std::vector<double> scores = predict_all(model, validation);
    const std::vector<int> truth = labels_of(validation);
    long long correct = 0;
    for (size_t r = 0; r < scores.size(); ++r) {
      const int predicted = scores[r] > model.cutoff ? 1 : 0;
      correct += predicted == truth[r] ? 1 : 0;
    }
    result.fold_accuracy.push_back(
        validation.records.empty()
            ? 0.0
            : static_cast<double>(correct) /
                  static_cast<double>(validation.records.size()));
  }
  result.mean_accuracy =
      std::accumulate(result.fold_accuracy.begin(), result.fold_accuracy.end(), 0.0) /
      static_cast<double>(k);
  return result;
}

}  // namespace fcnf
