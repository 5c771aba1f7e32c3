#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fcnf/dataset.hpp"
#include "fcnf/features.hpp"

namespace fcnf {

// A design column derived from the 33-feature contract. The categorical
// node-type features expand to dummies ("t_i=0", "t_i=1") with t = -1 as the
// baseline; everything else maps through unchanged.
struct DesignColumn {
  std::string name;
  int feature = -1;
  bool is_dummy = false;
  double match = 0.0;

  double value(const FeatureVector& fv) const {
    return is_dummy ? (fv[feature] == match ? 1.0 : 0.0) : fv[feature];
  }
};

std::vector<DesignColumn> expand_predictors(std::span<const std::string> base_names);
DesignColumn parse_column_name(const std::string& name);  // throws if unknown

struct LogitModel {
  std::vector<std::string> predictors;  // expanded column names
  std::vector<double> beta;             // aligned with predictors
  double intercept = 0.0;
  double aic = 0.0;
  double log_likelihood = 0.0;
  double cutoff = 0.5;
  std::vector<double> stderrs;  // aligned with predictors
  double intercept_stderr = 0.0;
  bool separation = false;
  std::string provenance_json;  // free-form, carried through model files
};

struct FitResult {
  LogitModel model;
  std::vector<double> z_values;       // beta / stderr, aligned with predictors
  std::vector<double> p_values;       // two-sided normal
  std::vector<std::string> dropped;   // constant columns removed before the fit
  int iterations = 0;
  bool converged = false;
};

// Maximum likelihood by iteratively reweighted least squares with
// step-halving; converged when max |delta beta| < 1e-8 or 100 iterations.
// Standard errors come from the inverse observed information. Perfect
// separation is flagged and coefficients capped at |beta| <= 30; a singular
// information matrix raises an error naming the collinear columns.
FitResult fit(const Dataset& dataset, std::span<const std::string> base_names);

double predict(const LogitModel& model, const FeatureVector& features);
std::vector<double> predict_all(const LogitModel& model, const Dataset& dataset);

// exp(beta) per predictor plus "(Intercept)".
std::map<std::string, double> odds_ratio(const LogitModel& model);

struct StepwiseStep {
  std::string dropped;  // base predictor removed at this step
  double aic = 0.0;     // AIC after the drop
};

struct StepwiseResult {
  FitResult fit;
  std::vector<StepwiseStep> steps;
  double initial_aic = 0.0;
  std::vector<std::string> retained;  // base predictors in the final model
};

// Backward selection on AIC: every step refits with each remaining base
// predictor removed (a categorical drops as a whole dummy group) and keeps
// the removal with the lowest AIC while it improves. Ties drop the predictor
// latest in contract order. Candidate refits may run on several threads.
StepwiseResult stepwise_backward(const Dataset& dataset,
                                 std::span<const std::string> base_names,
                                 int workers = 1);

double bernoulli_log_likelihood(const LogitModel& model, const Dataset& dataset);

LogitModel read_model(const std::filesystem::path& path);
void write_model(const LogitModel& model, const std::filesystem::path& path);

}  // namespace fcnf
