#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fcnf/dataset.hpp"
#include "fcnf/logit.hpp"

namespace fcnf {

// Cell labels follow the source convention this project reproduces: the
// actual-0 row holds {TN, FN} and the actual-1 row {FP, TP}, i.e. FN counts
// actual 0 predicted 1 and FP counts actual 1 predicted 0. The derived rates
// below are defined on those cells; roc_auc() uses the standard ROC axes
// and is unaffected by this orientation.
struct ConfusionMatrix {
  long long tn = 0;  // actual 0, predicted 0
  long long fn = 0;  // actual 0, predicted 1
  long long fp = 0;  // actual 1, predicted 0
  long long tp = 0;  // actual 1, predicted 1

  long long total() const { return tn + fn + fp + tp; }
  double fpr() const {
    const long long den = fp + tn;
    return den == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(den);
  }
  double fnr() const {
    const long long den = fn + tp;
    return den == 0 ? 0.0 : static_cast<double>(fn) / static_cast<double>(den);
  }
  double accuracy() const {
    return total() == 0 ? 0.0
                        : static_cast<double>(tn + tp) / static_cast<double>(total());
  }
};

// Predicted positive iff pi > cutoff (equality classifies as 0).
ConfusionMatrix confusion_from_scores(std::span<const double> scores,
                                      std::span<const int> labels, double cutoff);
ConfusionMatrix confusion(const LogitModel& model, const Dataset& dataset,
                          double cutoff);

double false_cost(const ConfusionMatrix& cm, double c_fpr, double c_fnr);

// Sweeps cutoffs over {0.01, ..., 0.99}; lowest cutoff wins ties.
std::pair<double, double> optimal_cutoff(const LogitModel& model,
                                         const Dataset& dataset, double c_fpr,
                                         double c_fnr);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;  // standard: actual negatives predicted positive
  double tpr = 0.0;  // standard: actual positives predicted positive
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

RocCurve roc_auc(const LogitModel& model, const Dataset& dataset);
RocCurve roc_from_scores(std::span<const double> scores, std::span<const int> labels);

// P(random positive outscores random negative), ties counted half. Equals
// the trapezoidal AUC; the independent computation backs the identity check.
double mann_whitney_auc(std::span<const double> scores, std::span<const int> labels);

struct KfoldResult {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

using Trainer = std::function<LogitModel(const Dataset&)>;

// Folds partition rows by instance label, so arcs of one network never
// straddle a fold boundary. Accuracy is measured at each trained model's
// own cutoff.
KfoldResult kfold(const Dataset& dataset, int k, const Trainer& trainer,
                  uint64_t seed);

std::vector<int> labels_of(const Dataset& dataset);

}  // namespace fcnf
