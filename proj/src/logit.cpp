#include "fcnf/logit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace fcnf {

namespace {

constexpr double kBetaCap = 30.0;
constexpr double kConvergenceTol = 1e-8;
constexpr int kMaxIterations = 100;
constexpr double kProbClampLo = 1e-12;

double sigmoid(double g) { return 1.0 / (1.0 + std::exp(-g)); }

// ln(1 + e^g) without overflow.
double softplus(double g) {
  return std::max(g, 0.0) + std::log1p(std::exp(-std::abs(g)));
}

double clamp_probability(double pi) {
  return std::clamp(pi, kProbClampLo, 1.0 - kProbClampLo);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

bool is_categorical(std::string_view name) {
  return name == "t_i" || name == "t_j";
}

double log_likelihood_at(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                         const Eigen::VectorXd& beta) {
  const Eigen::VectorXd g = design * beta;
  double ll = 0.0;
  for (Eigen::Index r = 0; r < g.size(); ++r) {
    ll += labels[r] * g[r] - softplus(g[r]);
  }
  return ll;
}

}  // namespace

std::vector<DesignColumn> expand_predictors(std::span<const std::string> base_names) {
  std::vector<DesignColumn> columns;
  for (const std::string& name : base_names) {
    const int index = feature_index(name);
    if (index < 0) {
      throw std::invalid_argument("unknown predictor: " + name);
    }
    if (is_categorical(name)) {
      for (double level : {0.0, 1.0}) {
        DesignColumn col;
        col.name = name + "=" + (level == 0.0 ? "0" : "1");
        col.feature = index;
        col.is_dummy = true;
        col.match = level;
        columns.push_back(col);
      }
    } else {
      columns.push_back({name, index, false, 0.0});
    }
  }
  return columns;
}

DesignColumn parse_column_name(const std::string& name) {
  const auto eq = name.find('=');
  if (eq == std::string::npos) {
    const int index = feature_index(name);
    if (index < 0) throw std::invalid_argument("unknown predictor: " + name);
    return {name, index, false, 0.0};
  }
  const std::string base = name.substr(0, eq);
  const std::string level = name.substr(eq + 1);
  const int index = feature_index(base);
  if (index < 0 || !is_categorical(base) || (level != "0" && level != "1")) {
    throw std::invalid_argument("unknown predictor: " + name);
  }
  return {name, index, true, level == "0" ? 0.0 : 1.0};
}

namespace {

struct DesignData {
  Eigen::MatrixXd design;     // intercept in column 0
  Eigen::VectorXd labels;
  std::vector<DesignColumn> columns;  // surviving columns, no intercept
  std::vector<std::string> dropped;   // constant columns
};

DesignData build_design(const Dataset& dataset,
                        const std::vector<DesignColumn>& requested) {
  const Eigen::Index rows = static_cast<Eigen::Index>(dataset.records.size());
  if (rows == 0) throw std::invalid_argument("fit: empty dataset");

  DesignData data;
  data.labels.resize(rows);
  long long positives = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& y = dataset.records[r].y;
    if (!y) throw std::invalid_argument("fit: dataset contains unlabeled rows");
    data.labels[r] = *y;
    positives += *y;
  }
  if (positives == 0 || positives == rows) {
    throw std::invalid_argument("fit: need at least one positive and one negative row");
  }

  // Constant columns carry no information and break the normal equations.
  Eigen::MatrixXd raw(rows, static_cast<Eigen::Index>(requested.size()));
  for (size_t c = 0; c < requested.size(); ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      raw(r, static_cast<Eigen::Index>(c)) =
          requested[c].value(dataset.records[r].features);
    }
  }
  std::vector<size_t> kept;
  for (size_t c = 0; c < requested.size(); ++c) {
    const auto col = raw.col(static_cast<Eigen::Index>(c));
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi - lo < 1e-12 * (1.0 + std::abs(hi))) {
      data.dropped.push_back(requested[c].name);
    } else {
      kept.push_back(c);
    }
  }

  data.design.resize(rows, static_cast<Eigen::Index>(kept.size()) + 1);
  data.design.col(0).setOnes();
  for (size_t c = 0; c < kept.size(); ++c) {
    data.design.col(static_cast<Eigen::Index>(c) + 1) =
        raw.col(static_cast<Eigen::Index>(kept[c]));
    data.columns.push_back(requested[kept[c]]);
  }
  return data;
}

FitResult fit_design(DesignData data) {
  const Eigen::Index rows = data.design.rows();
  const Eigen::Index cols = data.design.cols();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(cols);
  double ll = log_likelihood_at(data.design, data.labels, beta);

  FitResult result;
  result.dropped = std::move(data.dropped);

  Eigen::VectorXd pi(rows), weights(rows);
  Eigen::MatrixXd information(cols, cols);
  bool separated = false;

  int iteration = 0;
  for (; iteration < kMaxIterations; ++iteration) {
    const Eigen::VectorXd g = data.design * beta;
    for (Eigen::Index r = 0; r < rows; ++r) {
      pi[r] = sigmoid(g[r]);
      weights[r] = std::max(pi[r] * (1.0 - pi[r]), 1e-10);
    }
    const Eigen::VectorXd gradient = data.design.transpose() * (data.labels - pi);
    information.noalias() =
        data.design.transpose() * weights.asDiagonal() * data.design;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
    Eigen::VectorXd delta = ldlt.solve(gradient);
    if (ldlt.info() != Eigen::Success ||
        (information * delta - gradient).norm() >
            1e-6 * (1.0 + gradient.norm())) {
      // Distinguish separation (weights collapsing under huge |beta|) from a
      // genuinely rank-deficient design.
      if (beta.cwiseAbs().maxCoeff() > kBetaCap * 0.5) {
        separated = true;
        break;
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(
          weights.cwiseSqrt().asDiagonal() * data.design);
      qr.setThreshold(1e-10);
      const Eigen::Index rank = qr.rank();
      std::string names;
      const auto permutation = qr.colsPermutation().indices();
      for (Eigen::Index k = rank; k < cols; ++k) {
        const Eigen::Index original = permutation[k];
        if (!names.empty()) names += ", ";
        names += original == 0 ? "(intercept)"
                               : data.columns[original - 1].name;
      }
      throw std::runtime_error("fit: singular information matrix; collinear columns: " +
                               names);
    }

    // Step-halving keeps the likelihood monotone.
    double step = 1.0;
    Eigen::VectorXd candidate = beta + delta;
    double candidate_ll = log_likelihood_at(data.design, data.labels, candidate);
    for (int halving = 0; halving < 30 && candidate_ll < ll - 1e-12 * (1.0 + std::abs(ll));
         ++halving) {
      step *= 0.5;
      candidate = beta + step * delta;
      candidate_ll = log_likelihood_at(data.design, data.labels, candidate);
    }
    const double max_change = (candidate - beta).cwiseAbs().maxCoeff();
    beta = candidate;
    ll = candidate_ll;

    if (beta.cwiseAbs().maxCoeff() > kBetaCap) {
      separated = true;
      break;
    }
    if (max_change < kConvergenceTol) {
      result.converged = true;
      ++iteration;
      break;
    }
  }

  if (separated) {
    beta = beta.cwiseMax(-kBetaCap).cwiseMin(kBetaCap);
    ll = log_likelihood_at(data.design, data.labels, beta);
  }

  // Observed information at the final coefficients.
  {
    const Eigen::VectorXd g = data.design * beta;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double p = sigmoid(g[r]);
      weights[r] = std::max(p * (1.0 - p), 1e-10);
    }
    information.noalias() =
        data.design.transpose() * weights.asDiagonal() * data.design;
  }
  const Eigen::MatrixXd covariance =
      information.ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));

  LogitModel& model = result.model;
  model.intercept = beta[0];
  model.intercept_stderr = std::sqrt(std::max(covariance(0, 0), 0.0));
  model.separation = separated;
  model.log_likelihood = ll;
  model.aic = -2.0 * ll + 2.0 * static_cast<double>(cols);  // K counts the intercept
  for (Eigen::Index c = 1; c < cols; ++c) {
    model.predictors.push_back(data.columns[c - 1].name);
    model.beta.push_back(beta[c]);
    const double se = std::sqrt(std::max(covariance(c, c), 0.0));
    model.stderrs.push_back(se);
    const double z = se > 0.0 ? beta[c] / se : 0.0;
    result.z_values.push_back(z);
    result.p_values.push_back(2.0 * (1.0 - normal_cdf(std::abs(z))));
  }
  result.iterations = iteration;
  return result;
}

}  // namespace

FitResult fit(const Dataset& dataset, std::span<const std::string> base_names) {
  return fit_design(build_design(dataset, expand_predictors(base_names)));
}

double predict(const LogitModel& model, const FeatureVector& features) {
  double g = model.intercept;
  for (size_t k = 0; k < model.predictors.size(); ++k) {
    const DesignColumn column = parse_column_name(model.predictors[k]);
    g += model.beta[k] * column.value(features);
  }
  return clamp_probability(sigmoid(g));
}

std::vector<double> predict_all(const LogitModel& model, const Dataset& dataset) {
  std::vector<DesignColumn> columns;
  columns.reserve(model.predictors.size());
  for (const auto& name : model.predictors) columns.push_back(parse_column_name(name));

  std::vector<double> out;
  out.reserve(dataset.records.size());
  for (const auto& record : dataset.records) {
    double g = model.intercept;
    for (size_t k = 0; k < columns.size(); ++k) {
      g += model.beta[k] * columns[k].value(record.features);
    }
    out.push_back(clamp_probability(sigmoid(g)));
  }
  return out;
}

std::map<std::string, double> odds_ratio(const LogitModel& model) {
  std::map<std::string, double> ratios;
  ratios["(Intercept)"] = std::exp(model.intercept);
  for (size_t k = 0; k < model.predictors.size(); ++k) {
    ratios[model.predictors[k]] = std::exp(model.beta[k]);
  }
  return ratios;
}

double bernoulli_log_likelihood(const LogitModel& model, const Dataset& dataset) {
  const std::vector<double> pis = predict_all(model, dataset);
  double ll = 0.0;
  for (size_t r = 0; r < pis.size(); ++r) {
    const int y = dataset.records[r].y.value();
    ll += y * std::log(pis[r]) + (1 - y) * std::log(1.0 - pis[r]);
  }
  return ll;
}

StepwiseResult stepwise_backward(const Dataset& dataset,
                                 std::span<const std::string> base_names,
                                 int workers) {
  std::vector<std::string> current(base_names.begin(), base_names.end());

  StepwiseResult result;
  result.fit = fit(dataset, current);
  result.initial_aic = result.fit.model.aic;

  while (!current.empty()) {
    const size_t candidates = current.size();
    std::vector<double> aics(candidates);
    std::vector<FitResult> fits(candidates);
    std::vector<std::string> errors(candidates);

    std::atomic<size_t> cursor{0};
    auto worker = [&] {
      for (;;) {
        const size_t c = cursor.fetch_add(1);
        if (c >= candidates) return;
        std::vector<std::string> reduced;
        reduced.reserve(candidates - 1);
        for (size_t k = 0; k < candidates; ++k) {
          if (k != c) reduced.push_back(current[k]);
        }
        try {
          fits[c] = fit(dataset, reduced);
          aics[c] = fits[c].model.aic;
        } catch (const std::exception& e) {
          errors[c] = e.what();
          aics[c] = std::numeric_limits<double>::infinity();
        }
      }
    };
    const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(candidates)));
    if (thread_count == 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
    }

    for (size_t c = 0; c < candidates; ++c) {
      if (!errors[c].empty()) {
        throw std::runtime_error("stepwise: refit without '" + current[c] +
                                 "' failed: " + errors[c]);
      }
    }

    // Lowest AIC wins; on ties drop the predictor latest in contract order,
    // which is the last index since `current` preserves that order.
    size_t best = 0;
    for (size_t c = 1; c < candidates; ++c) {
      if (aics[c] <= aics[best]) best = c;
    }
    if (aics[best] >= result.fit.model.aic) break;

    result.steps.push_back({current[best], aics[best]});
    result.fit = std::move(fits[best]);
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(best));
  }

  result.retained = current;
  return result;
}

LogitModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": malformed JSON: " + e.what());
  }

  LogitModel model;
  for (const auto& name : doc.at("predictors")) {
    model.predictors.push_back(name.get<std::string>());
  }
  for (const auto& b : doc.at("beta")) model.beta.push_back(b.get<double>());
  model.intercept = doc.at("intercept").get<double>();
  model.aic = doc.at("aic").get<double>();
  model.cutoff = doc.at("cutoff").get<double>();
  for (const auto& s : doc.at("stderr")) model.stderrs.push_back(s.get<double>());
  if (doc.contains("intercept_stderr")) {
    model.intercept_stderr = doc["intercept_stderr"].get<double>();
  }
  if (doc.contains("log_likelihood")) {
    model.log_likelihood = doc["log_likelihood"].get<double>();
  }
  if (doc.contains("separation")) model.separation = doc["separation"].get<bool>();
  if (doc.contains("provenance")) model.provenance_json = doc["provenance"].dump();
  if (model.beta.size() != model.predictors.size()) {
    throw std::runtime_error(path.string() + ": beta/predictors length mismatch");
  }
  for (const auto& name : model.predictors) parse_column_name(name);
  return model;
}

void write_model(const LogitModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["predictors"] = model.predictors;
  doc["beta"] = model.beta;
  doc["intercept"] = model.intercept;
  doc["aic"] = model.aic;
  doc["cutoff"] = model.cutoff;
  doc["stderr"] = model.stderrs;
  doc["intercept_stderr"] = model.intercept_stderr;
  doc["log_likelihood"] = model.log_likelihood;
  doc["separation"] = model.separation;
  if (model.provenance_json.empty()) {
    doc["provenance"] = nlohmann::ordered_json::object();
  } else {
    doc["provenance"] = nlohmann::ordered_json::parse(model.provenance_json);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace fcnf
