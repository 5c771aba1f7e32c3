#include "fcnf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fcnf/csv.hpp"
#include "fcnf/evaluation.hpp"
#include "fcnf/features.hpp"
#include "fcnf/generator.hpp"
#include "fcnf/lp_relaxation.hpp"
#include "fcnf/rbr.hpp"
#include "fcnf/rng.hpp"
#include "json.hpp"

namespace fcnf {

CompareOut compare(double z_rbr, double z_x, double t_rbr, double t_x) {
  CompareOut out;
  if (z_x == 0.0) {
    out.gap_defined = false;
    out.z_gap = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.z_gap = (z_rbr - z_x) / std::abs(z_x) * 100.0;
  }
  out.t_diff = t_x / std::max(t_rbr, kTimerResolution);
  out.theta = out.gap_defined && out.z_gap < 0.0 && out.t_diff > 1.0 ? 1 : 0;
  return out;
}

std::string TierConfig::name(int n) const {
  const bool canonical = bounds.size() == 3;
  for (size_t k = 0; k < bounds.size(); ++k) {
    if (n <= bounds[k]) {
      if (canonical) return k == 0 ? "easy" : k == 1 ? "medium" : "hard";
      return "tier" + std::to_string(k + 1);
    }
  }
  return canonical ? "hard" : "tier" + std::to_string(bounds.size());
}

namespace {

template <typename Fn>
void parallel_for(size_t count, int workers, Fn&& body) {
  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(count)));
  std::atomic<size_t> cursor{0};
  auto loop = [&] {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= count) return;
      body(i);
    }
  };
  if (thread_count == 1) {
    loop();
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (int t = 0; t < thread_count; ++t) threads.emplace_back(loop);
  for (auto& t : threads) t.join();
}

struct GapStats {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int count = 0;

  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++count;
  }
  double mean() const { return count > 0 ? sum / count : 0.0; }
};

BenchTierSummary summarize(const std::string& tier,
                           std::span<const BenchRecord* const> records) {
  BenchTierSummary row;
  row.tier = tier;
  row.count = static_cast<int>(records.size());

  GapStats zgap_lp, tdiff_lp, zgap_exact, tdiff_exact;
  int theta_lp = 0, theta_exact = 0, theta_exact_proven = 0, proven = 0;
  for (const BenchRecord* r : records) {
    if (r->vs_lp.gap_defined) zgap_lp.add(r->vs_lp.z_gap);
    tdiff_lp.add(r->vs_lp.t_diff);
    theta_lp += r->vs_lp.theta;
    if (r->vs_exact.gap_defined) zgap_exact.add(r->vs_exact.z_gap);
    tdiff_exact.add(r->vs_exact.t_diff);
    theta_exact += r->vs_exact.theta;
    if (r->exact_optimal) {
      ++proven;
      theta_exact_proven += r->vs_exact.theta;
    }
  }
  if (row.count == 0) return row;
  row.theta_lp_frac = static_cast<double>(theta_lp) / row.count;
  row.zgap_lp_min = zgap_lp.min;
  row.zgap_lp_mean = zgap_lp.mean();
  row.zgap_lp_max = zgap_lp.max;
  row.tdiff_lp_min = tdiff_lp.min;
  row.tdiff_lp_mean = tdiff_lp.mean();
  row.tdiff_lp_max = tdiff_lp.max;
  row.theta_exact_frac = static_cast<double>(theta_exact) / row.count;
  row.exact_proven = proven;
  row.theta_exact_proven_frac =
      proven > 0 ? static_cast<double>(theta_exact_proven) / proven : 0.0;
  row.zgap_exact_min = zgap_exact.min;
  row.zgap_exact_mean = zgap_exact.mean();
  row.zgap_exact_max = zgap_exact.max;
  row.tdiff_exact_min = tdiff_exact.min;
  row.tdiff_exact_mean = tdiff_exact.mean();
  row.tdiff_exact_max = tdiff_exact.max;
  return row;
}

}  // namespace

BenchOutput run_benchmark(std::span<const Instance> corpus, const LogitModel& model,
                          const BenchConfig& config) {
  BenchOutput output;
  std::vector<std::optional<BenchRecord>> slots(corpus.size());
  std::vector<std::string> failures(corpus.size());

  parallel_for(corpus.size(), config.workers, [&](size_t i) {
    const Instance& instance = corpus[i];
    try {
      BenchRecord record;
      record.label = instance.label;
      record.n = instance.num_nodes();
      record.m = instance.num_arcs();

      const RbrResult rbr = solve_rbr(instance, model);
      record.z_rbr = rbr.lifted.objective;
      record.t_rbr = rbr.wall_time;
      record.t_rbr_solve = rbr.flow_wall_time;

      const RelaxationResult lp = solve_lp(instance);
      record.z_lp = lp.lifted.objective;
      record.t_lp = lp.wall_time;

      const ExactResult exact = solve_exact(instance, config.exact);
      if (!exact.feasible()) throw std::runtime_error("exact solve infeasible");
      record.z_exact = exact.solution.objective;
      record.t_exact = exact.solution.wall_time;
      record.exact_optimal = exact.solution.optimal;

      record.vs_lp = compare(record.z_rbr, record.z_lp, record.t_rbr, record.t_lp);
      record.vs_exact =
          compare(record.z_rbr, record.z_exact, record.t_rbr, record.t_exact);
      slots[i] = std::move(record);
    } catch (const std::exception& e) {
      failures[i] = instance.label + ": " + e.what();
    }
  });

  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      output.records.push_back(std::move(*slots[i]));
    } else {
      output.failed_labels.push_back(failures[i]);
    }
  }

  // Tier blocks in configured order, then the overall row.
  std::vector<std::string> tier_order;
  for (size_t k = 0; k < config.tiers.bounds.size(); ++k) {
    tier_order.push_back(config.tiers.name(config.tiers.bounds[k]));
  }
  for (const std::string& tier : tier_order) {
    std::vector<const BenchRecord*> members;
    for (const BenchRecord& r : output.records) {
      if (config.tiers.name(r.n) == tier) members.push_back(&r);
    }
    output.summary.push_back(summarize(tier, members));
  }
  std::vector<const BenchRecord*> all;
  for (const BenchRecord& r : output.records) all.push_back(&r);
  output.summary.push_back(summarize("overall", all));
  return output;
}

namespace {

std::string gap_cell(const CompareOut& c) {
  return c.gap_defined ? csv::format_double(c.z_gap) : "undefined";
}

}  // namespace

void write_bench_csv(const BenchOutput& output, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::vector<std::string> header = {
      "instance_label", "n",          "m",         "z_rbr",      "z_lp",
      "z_exact",        "exact_optimal", "t_rbr",  "t_rbr_solve", "t_lp",
      "t_exact",        "z_gap_lp",   "z_gap_exact", "t_diff_lp", "t_diff_exact",
      "theta_lp",       "theta_exact"};
  csv::write_row(out, header);
  for (const BenchRecord& r : output.records) {
    const std::vector<std::string> row = {
        r.label,
        std::to_string(r.n),
        std::to_string(r.m),
        csv::format_double(r.z_rbr),
        csv::format_double(r.z_lp),
        csv::format_double(r.z_exact),
        r.exact_optimal ? "1" : "0",
        csv::format_double(r.t_rbr),
        csv::format_double(r.t_rbr_solve),
        csv::format_double(r.t_lp),
        csv::format_double(r.t_exact),
        gap_cell(r.vs_lp),
        gap_cell(r.vs_exact),
        csv::format_double(r.vs_lp.t_diff),
        csv::format_double(r.vs_exact.t_diff),
        std::to_string(r.vs_lp.theta),
        std::to_string(r.vs_exact.theta)};
    csv::write_row(out, row);
  }
}

void write_bench_summary_csv(const BenchOutput& output,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::vector<std::string> header = {
      "tier",          "count",          "theta_lp_frac",
      "zgap_lp_min",   "zgap_lp_mean",   "zgap_lp_max",
      "tdiff_lp_min",  "tdiff_lp_mean",  "tdiff_lp_max",
      "theta_exact_frac", "theta_exact_proven_frac", "exact_proven",
      "zgap_exact_min", "zgap_exact_mean", "zgap_exact_max",
      "tdiff_exact_min", "tdiff_exact_mean", "tdiff_exact_max"};
  csv::write_row(out, header);
  for (const BenchTierSummary& s : output.summary) {
    const std::vector<std::string> row = {
        s.tier,
        std::to_string(s.count),
        csv::format_double(s.theta_lp_frac),
        csv::format_double(s.zgap_lp_min),
        csv::format_double(s.zgap_lp_mean),
        csv::format_double(s.zgap_lp_max),
        csv::format_double(s.tdiff_lp_min),
        csv::format_double(s.tdiff_lp_mean),
        csv::format_double(s.tdiff_lp_max),
        csv::format_double(s.theta_exact_frac),
        csv::format_double(s.theta_exact_proven_frac),
        std::to_string(s.exact_proven),
        csv::format_double(s.zgap_exact_min),
        csv::format_double(s.zgap_exact_mean),
        csv::format_double(s.zgap_exact_max),
        csv::format_double(s.tdiff_exact_min),
        csv::format_double(s.tdiff_exact_mean),
        csv::format_double(s.tdiff_exact_max)};
    csv::write_row(out, row);
  }
}

uint64_t derive_seed(uint64_t base, uint64_t tag, uint64_t index) {
  return mix64(mix64(base) + 0x100000001b3ULL * tag + index);
}

namespace {

struct CorpusBundle {
  std::vector<Instance> instances;
  std::vector<RelaxationResult> relaxations;
  std::vector<std::vector<FeatureVector>> features;
  std::vector<ExactResult> exact;
  int timeouts = 0;
};

// Generate + solve + extract one corpus; labeling-time solves run under the
// given limit and unproven instances stay in the bundle flagged non-optimal.
CorpusBundle prepare_corpus(const std::string& name, uint64_t base_seed,
                            uint64_t tag, int count, std::pair<int, int> n_range,
                            bool testbed, double time_limit, int workers,
                            std::ostream* log) {
  CorpusBundle bundle;
  bundle.instances.resize(count);
  bundle.relaxations.resize(count);
  bundle.features.resize(count);
  bundle.exact.resize(count);

  auto sizes = make_stream(derive_seed(base_seed, tag, 0), RngStream::kPipeline);
  std::vector<int> node_counts(count);
  for (int i = 0; i < count; ++i) {
    node_counts[i] =
        static_cast<int>(sizes.uniform_int(n_range.first, n_range.second));
  }

  parallel_for(count, workers, [&](size_t i) {
    GeneratorConfig config;
    config.n = node_counts[i];
    config.seed = derive_seed(base_seed, tag, i + 1);
    config.label = name + "-" + std::to_string(i);
    bundle.instances[i] = testbed ? generate_testbed(config) : generate(config);

    bundle.relaxations[i] = solve_lp(bundle.instances[i]);
    bundle.features[i] = extract(bundle.instances[i], bundle.relaxations[i]);

    BnBConfig bnb;
    bnb.time_limit = time_limit;
    bundle.exact[i] = solve_exact(bundle.instances[i], bnb);
  });

  for (const ExactResult& r : bundle.exact) {
    if (!r.solution.optimal) ++bundle.timeouts;
  }
  if (log) {
    *log << "[pipeline] corpus " << name << ": " << count << " instances, "
         << bundle.timeouts << " unproven within " << time_limit << "s\n";
  }
  return bundle;
}

Dataset labeled_dataset(const CorpusBundle& bundle, const std::string& recipe) {
  std::vector<SolvedInstance> inputs;
  inputs.reserve(bundle.instances.size());
  for (size_t i = 0; i < bundle.instances.size(); ++i) {
    inputs.push_back({&bundle.instances[i], &bundle.features[i],
                      &bundle.exact[i].solution});
  }
  BuildReport report = build_dataset(inputs);
  report.dataset.provenance.recipe = recipe;
  return std::move(report.dataset);
}

template <typename Fn>
auto stage(const std::string& name, std::ostream* log, Fn&& body) {
  if (log) *log << "[pipeline] stage: " << name << "\n" << std::flush;
  try {
    return body();
  } catch (const std::exception& e) {
    throw std::runtime_error("pipeline stage '" + name + "': " + e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const auto path = [&](const std::string& name) { return config.out_dir / name; };

  PipelineResult result;

  auto train_bundle = stage("generate+solve train corpus", log, [&] {
    return prepare_corpus("train-" + std::to_string(config.seed), config.seed,
                          1, config.train_count, config.train_n,
                          /*testbed=*/false, config.label_time_limit,
                          config.workers, log);
  });
  result.train_timeouts = train_bundle.timeouts;
  result.train_instances_labeled =
      static_cast<int>(train_bundle.instances.size()) - train_bundle.timeouts;

  auto test_bundle = stage("generate+solve test corpus", log, [&] {
    return prepare_corpus("test-" + std::to_string(config.seed), config.seed,
                          2, config.test_count, config.test_n,
                          /*testbed=*/false, config.label_time_limit,
                          config.workers, log);
  });
  result.test_timeouts = test_bundle.timeouts;
  result.test_instances_labeled =
      static_cast<int>(test_bundle.instances.size()) - test_bundle.timeouts;

  if (config.write_instances) {
    stage("write instances", log, [&] {
      fs::create_directories(path("instances"));
      for (const auto* bundle : {&train_bundle, &test_bundle}) {
        for (const Instance& instance : bundle->instances) {
          write_instance(instance, path("instances") / (instance.label + ".json"));
        }
      }
      return 0;
    });
  }

  const Dataset train_full = stage("build train dataset", log, [&] {
    Dataset d = labeled_dataset(train_bundle, "train n in [" +
                                                  std::to_string(config.train_n.first) +
                                                  "," +
                                                  std::to_string(config.train_n.second) +
                                                  "]");
    write_dataset_csv(d, path("train_full.csv"));
    write_provenance(d.provenance, path("train_full.provenance.json"));
    return d;
  });

  const Dataset train = stage("undersample", log, [&] {
    Dataset d = undersample(train_full, derive_seed(config.seed, 3, 0));
    write_dataset_csv(d, path("train.csv"));
    write_provenance(d.provenance, path("train.provenance.json"));
    return d;
  });

  const Dataset test = stage("build test dataset", log, [&] {
    Dataset d = labeled_dataset(test_bundle, "test n in [" +
                                                 std::to_string(config.test_n.first) +
                                                 "," +
                                                 std::to_string(config.test_n.second) +
                                                 "]");
    write_dataset_csv(d, path("test.csv"));
    write_provenance(d.provenance, path("test.provenance.json"));
    return d;
  });

  StepwiseResult stepwise = stage("stepwise training", log, [&] {
    std::vector<std::string> all_names;
    for (const auto& name : feature_names()) all_names.emplace_back(name);
    return stepwise_backward(train, all_names, config.workers);
  });
  result.stepwise_initial_aic = stepwise.initial_aic;
  result.stepwise_final_aic = stepwise.fit.model.aic;
  result.retained_predictors = static_cast<int>(stepwise.retained.size());

  LogitModel& model = stepwise.fit.model;

  stage("cutoff optimization", log, [&] {
    const auto [cutoff, cost] = optimal_cutoff(model, train, 0.5, 0.5);
    model.cutoff = cutoff;
    result.cutoff = cutoff;
    result.cutoff_cost = cost;
    return 0;
  });

  stage("write model", log, [&] {
    nlohmann::ordered_json provenance;
    provenance["seed"] = config.seed;
    provenance["recipe"] = "stepwise backward AIC on undersampled train corpus";
    provenance["train_rows"] = train.provenance.rows;
    provenance["train_positives"] = train.provenance.positives;
    provenance["train_instances"] = result.train_instances_labeled;
    provenance["train_timeouts"] = result.train_timeouts;
    provenance["retained_predictors"] = stepwise.retained;
    provenance["initial_aic"] = result.stepwise_initial_aic;
    model.provenance_json = provenance.dump();
    write_model(model, path("model.json"));
    return 0;
  });

  const RocCurve roc = stage("evaluation", log, [&] {
    RocCurve curve = roc_auc(model, test);
    result.test_auc = curve.auc;

    const KfoldResult cv = kfold(
        train, 10,
        [&](const Dataset& fold_train) {
          FitResult fit_result = fit(fold_train, stepwise.retained);
          fit_result.model.cutoff = model.cutoff;
          return fit_result.model;
        },
        derive_seed(config.seed, 4, 0));
    result.cv_accuracy = cv.mean_accuracy;

    std::ofstream out(path("roc.csv"), std::ios::binary);
    const std::vector<std::string> header = {"threshold", "fpr", "tpr"};
    csv::write_row(out, header);
    for (const RocPoint& p : curve.points) {
      const std::vector<std::string> row = {csv::format_double(p.threshold),
                                            csv::format_double(p.fpr),
                                            csv::format_double(p.tpr)};
      csv::write_row(out, row);
    }

    const ConfusionMatrix cm = confusion(model, test, model.cutoff);
    std::ofstream eval(path("eval.csv"), std::ios::binary);
    const std::vector<std::string> eval_header = {"metric", "value"};
    csv::write_row(eval, eval_header);
    auto emit = [&](const std::string& metric, double value) {
      const std::vector<std::string> row = {metric, csv::format_double(value)};
      csv::write_row(eval, row);
    };
    emit("cutoff", model.cutoff);
    emit("cutoff_cost", result.cutoff_cost);
    emit("cv_accuracy", result.cv_accuracy);
    emit("test_auc", result.test_auc);
    emit("test_tn", static_cast<double>(cm.tn));
    emit("test_fn", static_cast<double>(cm.fn));
    emit("test_fp", static_cast<double>(cm.fp));
    emit("test_tp", static_cast<double>(cm.tp));
    emit("test_false_cost", false_cost(cm, 0.5, 0.5));
    emit("aic_initial", result.stepwise_initial_aic);
    emit("aic_final", result.stepwise_final_aic);
    emit("retained_predictors", result.retained_predictors);
    emit("train_rows", static_cast<double>(train.provenance.rows));
    emit("test_rows", static_cast<double>(test.provenance.rows));
    return curve;
  });
  (void)roc;

  if (!config.skip_cii) {
    stage("criticality experiment", log, [&] {
      std::vector<Instance> corpus(config.cii_count);
      auto sizes = make_stream(derive_seed(config.seed, 5, 0), RngStream::kPipeline);
      (void)sizes;
      parallel_for(config.cii_count, config.workers, [&](size_t i) {
        GeneratorConfig gen_config;
        gen_config.n = config.cii_n;
        gen_config.seed = derive_seed(config.seed, 5, i + 1);
        gen_config.label = "cii-" + std::to_string(config.seed) + "-" +
                           std::to_string(i);
        corpus[i] = generate(gen_config);
      });
      BnBConfig bnb;
      bnb.time_limit = config.cii_time_limit;
      result.criticality = criticality_experiment(corpus, model, bnb, config.workers);

      std::ofstream out(path("cii.csv"), std::ios::binary);
      const std::vector<std::string> header = {"instance_label", "n", "m",
                                               "eta_top_pct", "eta_bot_pct"};
      csv::write_row(out, header);
      for (const CriticalityOutcome& o : result.criticality.outcomes) {
        const std::vector<std::string> row = {
            o.label, std::to_string(o.n), std::to_string(o.m),
            o.eta_top_pct ? csv::format_double(*o.eta_top_pct) : "inf",
            o.eta_bot_pct ? csv::format_double(*o.eta_bot_pct) : "inf"};
        csv::write_row(out, row);
      }
      return 0;
    });
  }

  if (!config.skip_bench) {
    stage("benchmark", log, [&] {
      std::vector<Instance> corpus(config.bench_count);
      auto sizes = make_stream(derive_seed(config.seed, 6, 0), RngStream::kPipeline);
      std::vector<int> node_counts(config.bench_count);
      for (int i = 0; i < config.bench_count; ++i) {
        node_counts[i] = static_cast<int>(
            sizes.uniform_int(config.bench_n.first, config.bench_n.second));
      }
      parallel_for(config.bench_count, config.workers, [&](size_t i) {
        GeneratorConfig gen_config;
        gen_config.n = node_counts[i];
        gen_config.seed = derive_seed(config.seed, 6, i + 1);
        gen_config.label = "bench-" + std::to_string(config.seed) + "-" +
                           std::to_string(i);
        corpus[i] = generate_testbed(gen_config);
      });

      BenchConfig bench_config;
      bench_config.exact.time_limit = config.bench_exact_time_limit;
      bench_config.tiers = config.tiers;
      bench_config.workers = config.workers;
      result.bench = run_benchmark(corpus, model, bench_config);
      write_bench_csv(result.bench, path("bench.csv"));
      write_bench_summary_csv(result.bench, path("bench_summary.csv"));
      return 0;
    });
  }

  stage("write manifest", log, [&] {
    nlohmann::ordered_json manifest;
    manifest["seed"] = config.seed;
    manifest["train_n"] = {config.train_n.first, config.train_n.second};
    manifest["train_count"] = config.train_count;
    manifest["test_n"] = {config.test_n.first, config.test_n.second};
    manifest["test_count"] = config.test_count;
    manifest["cii_count"] = config.skip_cii ? 0 : config.cii_count;
    manifest["bench_count"] = config.skip_bench ? 0 : config.bench_count;
    manifest["train_timeouts"] = result.train_timeouts;
    manifest["test_timeouts"] = result.test_timeouts;
    manifest["cutoff"] = result.cutoff;
    manifest["test_auc"] = result.test_auc;
    manifest["cv_accuracy"] = result.cv_accuracy;
    manifest["retained_predictors"] = result.retained_predictors;
    std::ofstream out(path("manifest.json"), std::ios::binary);
    out << manifest.dump(2) << '\n';
    return 0;
  });

  result.model = std::move(model);
  return result;
}

}  // namespace fcnf
