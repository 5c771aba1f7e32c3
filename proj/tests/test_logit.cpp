#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fcnf/logit.hpp"
#include "fcnf/rng.hpp"
#include "oracles.hpp"

using namespace fcnf;

namespace {

DatasetRecord row_with(double c_value, double f_value, int y) {
  DatasetRecord record;
  record.instance_label = "synthetic";
  record.features[feat::kC] = c_value;
  record.features[feat::kF] = f_value;
  record.y = y;
  return record;
}

// Bernoulli draws from a known logit: g = b0 + b1 * x.
Dataset logistic_sample(double b0, double b1, int rows, uint64_t seed) {
  Dataset dataset;
  auto rng = make_stream(seed, RngStream::kSampling);
  for (int i = 0; i < rows; ++i) {
    const double x = testing::gaussian(rng);
    const double p = 1.0 / (1.0 + std::exp(-(b0 + b1 * x)));
    dataset.records.push_back(row_with(x, 0.0, rng.uniform() < p ? 1 : 0));
  }
  return dataset;
}

const std::vector<std::string> kCOnly = {"c"};
const std::vector<std::string> kCF = {"c", "f"};

}  // namespace

TEST_CASE("perfectly predictive column raises the separation flag") {
  Dataset dataset;
  for (int i = 0; i < 200; ++i) {
    dataset.records.push_back(row_with(i % 2 ? 1.0 : 0.0, 0.0, i % 2));
  }
  const FitResult result = fit(dataset, kCOnly);
  CHECK(result.model.separation);
  CHECK(std::abs(result.model.beta[0]) <= 30.0 + 1e-9);
}

TEST_CASE("null model: independent labels give a dead-flat fit") {
  Dataset dataset;
  auto rng = make_stream(321, RngStream::kSampling);
  for (int i = 0; i < 2000; ++i) {
    dataset.records.push_back(
        row_with(testing::gaussian(rng), testing::gaussian(rng), i % 2));
  }
  const FitResult result = fit(dataset, kCF);
  CHECK(std::abs(result.model.intercept) < 0.2);
  for (size_t k = 0; k < result.model.beta.size(); ++k) {
    CHECK(std::abs(result.model.beta[k]) < 3.0 * result.model.stderrs[k]);
  }
}

TEST_CASE("recovers known coefficients from 50k draws") {
  const Dataset dataset = logistic_sample(-1.0, 2.0, 50000, 2024);
  const FitResult result = fit(dataset, kCOnly);
  CHECK(result.converged);
  CHECK(result.model.intercept == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(result.model.beta[0] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("predict algebra") {
  LogitModel model;
  model.predictors = {"c"};
  model.beta = {0.0};
  model.intercept = 0.0;

  FeatureVector fv{};
  fv[feat::kC] = 123.0;
  CHECK(predict(model, fv) == doctest::Approx(0.5));

  model.intercept = std::log(3.0);  // g = ln 3 -> pi = 3/4
  CHECK(predict(model, fv - fv) == doctest::Approx(0.75));
}

TEST_CASE("predict matches the published odds factor for m") {
  // One more arc with beta_m = -5.52e-3 multiplies the odds by about
  // 0.994499185 (the printed coefficient is rounded to three digits).
  LogitModel model;
  model.predictors = {"m"};
  model.beta = {-5.52e-3};
  model.intercept = 0.3;

  FeatureVector base{};
  base[feat::kM] = 50.0;
  FeatureVector bumped = base;
  bumped[feat::kM] = 51.0;

  const double odds_base = predict(model, base) / (1.0 - predict(model, base));
  const double odds_bumped =
      predict(model, bumped) / (1.0 - predict(model, bumped));
  CHECK(std::abs(odds_bumped / odds_base - 0.994499185) < 1e-5);
}

TEST_CASE("predict rejects unknown predictors") {
  LogitModel model;
  model.predictors = {"not_a_feature"};
  model.beta = {1.0};
  FeatureVector fv{};
  CHECK_THROWS_WITH_AS(predict(model, fv), doctest::Contains("not_a_feature"),
                       std::invalid_argument);
}

TEST_CASE("odds ratios are exp(beta)") {
  LogitModel model;
  model.predictors = {"c", "l_bar"};
  model.beta = {0.0, 5.76};
  model.intercept = 8.32;
  const auto ratios = odds_ratio(model);
  CHECK(ratios.at("c") == 1.0);
  // Published values 4121.613533 and 318.3018034 come from coefficients
  // printed at three significant digits; match within that rounding.
  CHECK(std::abs(std::log(4121.613533) - 8.32) < 0.005);
  CHECK(ratios.at("(Intercept)") == doctest::Approx(4121.613533).epsilon(0.005));
  CHECK(std::abs(std::log(318.3018034) - 5.76) < 0.005);
  CHECK(ratios.at("l_bar") == doctest::Approx(318.3018034).epsilon(0.005));
}

TEST_CASE("AIC identity holds exactly") {
  const Dataset dataset = logistic_sample(0.5, -1.0, 3000, 77);
  const FitResult result = fit(dataset, kCOnly);
  const double k = static_cast<double>(result.model.beta.size()) + 1.0;
  CHECK(result.model.aic == -2.0 * result.model.log_likelihood + 2.0 * k);
  // And the stored likelihood matches an independent recomputation.
  CHECK(bernoulli_log_likelihood(result.model, dataset) ==
        doctest::Approx(result.model.log_likelihood).epsilon(1e-9));
}

TEST_CASE("analytic gradient matches central differences") {
  // 100-row sample, 10 random beta points, h = 1e-5, 1e-6 relative.
  const Dataset dataset = logistic_sample(0.3, 1.2, 100, 5150);
  const auto columns = expand_predictors(kCF);
  const int dim = static_cast<int>(columns.size()) + 1;

  auto log_likelihood = [&](const std::vector<double>& beta) {
    double ll = 0.0;
    for (const auto& record : dataset.records) {
      double g = beta[0];
      for (size_t c = 0; c < columns.size(); ++c) {
        g += beta[c + 1] * columns[c].value(record.features);
      }
      const double softplus = std::max(g, 0.0) + std::log1p(std::exp(-std::abs(g)));
      ll += *record.y * g - softplus;
    }
    return ll;
  };
  auto gradient = [&](const std::vector<double>& beta) {
    std::vector<double> grad(dim, 0.0);
    for (const auto& record : dataset.records) {
      double g = beta[0];
      for (size_t c = 0; c < columns.size(); ++c) {
        g += beta[c + 1] * columns[c].value(record.features);
      }
      const double residual = *record.y - 1.0 / (1.0 + std::exp(-g));
      grad[0] += residual;
      for (size_t c = 0; c < columns.size(); ++c) {
        grad[c + 1] += residual * columns[c].value(record.features);
      }
    }
    return grad;
  };

  auto rng = make_stream(8888, RngStream::kSampling);
  const double h = 1e-5;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> beta(dim);
    for (double& b : beta) b = testing::gaussian(rng);
    const auto grad = gradient(beta);
    for (int d = 0; d < dim; ++d) {
      std::vector<double> up = beta, down = beta;
      up[d] += h;
      down[d] -= h;
      const double numeric = (log_likelihood(up) - log_likelihood(down)) / (2 * h);
      CHECK(std::abs(numeric - grad[d]) <=
            1e-6 * std::max(1.0, std::abs(grad[d])));
    }
  }
}

TEST_CASE("shifting a column only moves the intercept") {
  const Dataset dataset = logistic_sample(-0.5, 1.5, 4000, 31337);
  Dataset shifted = dataset;
  for (auto& record : shifted.records) record.features[feat::kC] += 10.0;

  const FitResult base = fit(dataset, kCOnly);
  const FitResult moved = fit(shifted, kCOnly);
  const auto pi_base = predict_all(base.model, dataset);
  const auto pi_moved = predict_all(moved.model, shifted);
  for (size_t r = 0; r < pi_base.size(); ++r) {
    CHECK(std::abs(pi_base[r] - pi_moved[r]) < 1e-9);
  }
}

TEST_CASE("predict is monotone with the coefficient sign") {
  const Dataset dataset = logistic_sample(0.0, 1.0, 2000, 4242);
  const FitResult result = fit(dataset, kCOnly);
  REQUIRE(result.model.beta[0] > 0.0);
  FeatureVector lo{}, hi{};
  lo[feat::kC] = -1.0;
  hi[feat::kC] = 1.0;
  CHECK(predict(result.model, lo) < predict(result.model, hi));
}

TEST_CASE("constant columns are dropped with a note") {
  Dataset dataset = logistic_sample(0.0, 1.0, 500, 9);
  for (auto& record : dataset.records) record.features[feat::kF] = 3.14;
  const FitResult result = fit(dataset, kCF);
  REQUIRE(result.dropped.size() == 1);
  CHECK(result.dropped[0] == "f");
  CHECK(result.model.predictors == std::vector<std::string>{"c"});
}

TEST_CASE("duplicated column raises a collinearity error naming it") {
  Dataset dataset = logistic_sample(0.0, 1.0, 500, 10);
  for (auto& record : dataset.records) {
    record.features[feat::kF] = 2.0 * record.features[feat::kC];
  }
  CHECK_THROWS_WITH_AS(fit(dataset, kCF), doctest::Contains("collinear"),
                       std::runtime_error);
}

TEST_CASE("categorical expansion produces the dummy pair") {
  const auto columns = expand_predictors(std::vector<std::string>{"t_i", "c"});
  REQUIRE(columns.size() == 3);
  CHECK(columns[0].name == "t_i=0");
  CHECK(columns[1].name == "t_i=1");
  CHECK(columns[2].name == "c");

  FeatureVector fv{};
  fv[feat::kTi] = -1.0;  // baseline: both dummies zero
  CHECK(columns[0].value(fv) == 0.0);
  CHECK(columns[1].value(fv) == 0.0);
  fv[feat::kTi] = 0.0;
  CHECK(columns[0].value(fv) == 1.0);
  fv[feat::kTi] = 1.0;
  CHECK(columns[1].value(fv) == 1.0);
}

TEST_CASE("stepwise keeps the informative predictor and drops noise") {
  Dataset dataset;
  auto rng = make_stream(616, RngStream::kSampling);
  for (int i = 0; i < 4000; ++i) {
    const double a = testing::gaussian(rng);
    const double noise = testing::gaussian(rng);
    const double p = 1.0 / (1.0 + std::exp(-(2.0 * a)));
    DatasetRecord record = row_with(a, noise, rng.uniform() < p ? 1 : 0);
    dataset.records.push_back(record);
  }
  const StepwiseResult result = stepwise_backward(dataset, kCF);
  CHECK(result.retained == std::vector<std::string>{"c"});
  CHECK(result.fit.model.aic <= result.initial_aic);

  // Accepted steps never increase the AIC.
  double previous = result.initial_aic;
  for (const auto& step : result.steps) {
    CHECK(step.aic <= previous);
    previous = step.aic;
  }
}

TEST_CASE("model json round trip") {
  LogitModel model;
  model.predictors = {"c", "t_i=0", "t_i=1"};
  model.beta = {0.25, -1.0, 2.0};
  model.intercept = -0.5;
  model.aic = 123.456;
  model.log_likelihood = -58.728;
  model.cutoff = 0.49;
  model.stderrs = {0.1, 0.2, 0.3};
  model.intercept_stderr = 0.05;
  model.provenance_json = R"({"seed":7})";

  const auto path = std::filesystem::temp_directory_path() / "fcnf_model.json";
  write_model(model, path);
  const LogitModel loaded = read_model(path);
  CHECK(loaded.predictors == model.predictors);
  CHECK(loaded.beta == model.beta);
  CHECK(loaded.intercept == model.intercept);
  CHECK(loaded.aic == model.aic);
  CHECK(loaded.cutoff == model.cutoff);
  CHECK(loaded.stderrs == model.stderrs);
  std::filesystem::remove(path);
}
