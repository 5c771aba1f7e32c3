#include <atomic>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fcnf/bench.hpp"
#include "fcnf/cii.hpp"
#include "fcnf/csv.hpp"
#include "fcnf/dataset.hpp"
#include "fcnf/evaluation.hpp"
#include "fcnf/exact_solver.hpp"
#include "fcnf/features.hpp"
#include "fcnf/generator.hpp"
#include "fcnf/instance.hpp"
#include "fcnf/logit.hpp"
#include "fcnf/lp_relaxation.hpp"
#include "fcnf/rbr.hpp"

namespace {

using namespace fcnf;

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : static_cast<int>(hw);
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) ids.push_back(std::stoi(token));
  }
  return ids;
}

void cmd_gen(int n, uint64_t seed, bool testbed, int pairs,
             const std::string& out) {
  GeneratorConfig config;
  config.n = n;
  config.seed = seed;
  if (pairs > 0) config.arc_pairs = pairs;
  const Instance instance = testbed ? generate_testbed(config) : generate(config);
  write_instance(instance, out);
  std::cout << "wrote " << out << " (n=" << instance.num_nodes()
            << ", m=" << instance.num_arcs() << ")\n";
}

void cmd_solve(const std::string& mode, const std::string& instance_path,
               const std::string& model_path, double time_limit,
               const std::string& block, const std::string& out) {
  const Instance instance = read_instance(instance_path);
  Solution solution;
  if (mode == "lp") {
    solution = solve_lp(instance).lifted;
  } else if (mode == "rbr") {
    if (model_path.empty()) throw std::runtime_error("--rbr needs --model");
    solution = solve_rbr(instance, read_model(model_path)).lifted;
  } else {
    BnBConfig config;
    config.time_limit = time_limit;
    RemovalMask mask;
    for (int a : parse_id_list(block)) mask.blocked.insert(a);
    const ExactResult result =
        solve_exact(instance, config, mask.blocked.empty() ? nullptr : &mask);
    if (!result.feasible()) {
      throw std::runtime_error("instance is infeasible under the given blocking");
    }
    solution = result.solution;
    if (!solution.optimal) {
      std::cerr << "warning: limits hit, reporting incumbent (bound "
                << result.best_bound << ")\n";
    }
  }
  write_solution(solution, out);
  std::cout << "objective " << csv::format_double(solution.objective) << " ("
            << to_string(solution.method) << ", optimal "
            << (solution.optimal ? "yes" : "no") << ") -> " << out << "\n";
}

void cmd_features(const std::string& instance_path, const std::string& out) {
  const Instance instance = read_instance(instance_path);
  const RelaxationResult relaxation = solve_lp(instance);
  const auto vectors = extract(instance, relaxation);

  Dataset dataset;
  for (size_t a = 0; a < vectors.size(); ++a) {
    DatasetRecord record;
    record.instance_label = instance.label;
    record.arc_from = instance.arcs[a].from;
    record.arc_to = instance.arcs[a].to;
    record.features = vectors[a];
    dataset.records.push_back(std::move(record));
  }
  write_dataset_csv(dataset, out);
  std::cout << "wrote " << out << " (" << dataset.records.size() << " arcs)\n";
}

void cmd_dataset_build(const std::vector<std::string>& instance_paths,
                       double time_limit, int workers, const std::string& out) {
  std::vector<Instance> instances;
  instances.reserve(instance_paths.size());
  for (const auto& p : instance_paths) instances.push_back(read_instance(p));

  std::vector<std::vector<FeatureVector>> features(instances.size());
  std::vector<ExactResult> solutions(instances.size());
  std::vector<std::thread> threads;
  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= instances.size()) return;
      const RelaxationResult relaxation = solve_lp(instances[i]);
      features[i] = extract(instances[i], relaxation);
      BnBConfig config;
      config.time_limit = time_limit;
      solutions[i] = solve_exact(instances[i], config);
    }
  };
  for (int t = 0; t < std::min<int>(workers, instances.size()); ++t) {
    threads.emplace_back(worker);
  }
  for (auto& t : threads) t.join();

  std::vector<SolvedInstance> inputs;
  for (size_t i = 0; i < instances.size(); ++i) {
    inputs.push_back({&instances[i], &features[i], &solutions[i].solution});
  }
  const BuildReport report = build_dataset(inputs);
  for (const auto& label : report.skipped_labels) {
    std::cerr << "warning: excluded unproven instance " << label << "\n";
  }
  write_dataset_csv(report.dataset, out);
  write_provenance(report.dataset.provenance, out + ".provenance.json");
  std::cout << "wrote " << out << " (" << report.dataset.records.size()
            << " rows)\n";
}

void cmd_dataset_undersample(const std::string& in, uint64_t seed,
                             const std::string& out) {
  const Dataset dataset = undersample(read_dataset_csv(in), seed);
  write_dataset_csv(dataset, out);
  std::cout << "wrote " << out << " (" << dataset.records.size() << " rows, "
            << dataset.count_positive() << " positive)\n";
}

void cmd_dataset_split(const std::string& in, double fraction, uint64_t seed,
                       const std::string& train_out, const std::string& test_out) {
  const auto [train, test] = split_by_instance(read_dataset_csv(in), fraction, seed);
  write_dataset_csv(train, train_out);
  write_dataset_csv(test, test_out);
  std::cout << "wrote " << train_out << " (" << train.records.size() << " rows), "
            << test_out << " (" << test.records.size() << " rows)\n";
}

void cmd_train(const std::string& train_path, bool stepwise, int workers,
               const std::string& out) {
  const Dataset train = read_dataset_csv(train_path);
  std::vector<std::string> names;
  for (const auto& name : feature_names()) names.emplace_back(name);

  LogitModel model;
  if (stepwise) {
    StepwiseResult result = stepwise_backward(train, names, workers);
    std::cout << "stepwise: AIC " << result.initial_aic << " -> "
              << result.fit.model.aic << ", retained " << result.retained.size()
              << " of " << names.size() << " predictors\n";
    model = std::move(result.fit.model);
  } else {
    FitResult result = fit(train, names);
    for (const auto& dropped : result.dropped) {
      std::cerr << "warning: dropped constant predictor " << dropped << "\n";
    }
    model = std::move(result.model);
  }
  const auto [cutoff, cost] = optimal_cutoff(model, train, 0.5, 0.5);
  model.cutoff = cutoff;
  write_model(model, out);
  std::cout << "AIC " << model.aic << ", cutoff " << cutoff << " (cost " << cost
            << ") -> " << out << "\n";
}

void cmd_eval(const std::string& model_path, const std::string& data_path,
              double cutoff, const std::string& roc_out, int kfold_k) {
  const LogitModel model = read_model(model_path);
  const Dataset dataset = read_dataset_csv(data_path);
  const double used_cutoff = cutoff > 0.0 ? cutoff : model.cutoff;

  const ConfusionMatrix cm = confusion(model, dataset, used_cutoff);
  std::cout << "rows " << cm.total() << ", cutoff " << used_cutoff << "\n";
  std::cout << "confusion (actual 0 row: TN FN / actual 1 row: FP TP): " << cm.tn
            << " " << cm.fn << " / " << cm.fp << " " << cm.tp << "\n";
  std::cout << "accuracy " << cm.accuracy() << ", FPR " << cm.fpr() << ", FNR "
            << cm.fnr() << ", false cost (0.5/0.5) " << false_cost(cm, 0.5, 0.5)
            << "\n";

  const RocCurve curve = roc_auc(model, dataset);
  std::cout << "AUC " << curve.auc << "\n";
  if (!roc_out.empty()) {
    std::ofstream out(roc_out, std::ios::binary);
    const std::vector<std::string> header = {"threshold", "fpr", "tpr"};
    csv::write_row(out, header);
    for (const RocPoint& p : curve.points) {
      const std::vector<std::string> row = {csv::format_double(p.threshold),
                                            csv::format_double(p.fpr),
                                            csv::format_double(p.tpr)};
      csv::write_row(out, row);
    }
    std::cout << "wrote " << roc_out << "\n";
  }

  if (kfold_k >= 2) {
    const KfoldResult cv = kfold(
        dataset, kfold_k,
        [&](const Dataset& fold_train) {
          std::vector<std::string> bases;
          std::set<std::string> seen;
          for (const auto& name : model.predictors) {
            const auto eq = name.find('=');
            const std::string base = eq == std::string::npos ? name : name.substr(0, eq);
            if (seen.insert(base).second) bases.push_back(base);
          }
          FitResult fold_fit = fit(fold_train, bases);
          fold_fit.model.cutoff = used_cutoff;
          return fold_fit.model;
        },
        model_path.size());
    std::cout << kfold_k << "-fold accuracy " << cv.mean_accuracy << "\n";
  }
}

void cmd_cii(const std::string& instance_path, const std::string& model_path,
             bool with_eta, double time_limit, const std::string& out) {
  const Instance instance = read_instance(instance_path);
  const LogitModel model = read_model(model_path);
  BnBConfig config;
  config.time_limit = time_limit;
  const CiiReport report = cii_report(instance, model, with_eta, config);

  std::ofstream stream(out, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot write " + out);
  const std::vector<std::string> header = {"from", "to", "c", "f", "pi", "eta_pct"};
  csv::write_row(stream, header);
  for (const CiiRow& row : report.rows) {
    const Arc& arc = instance.arcs[row.arc];
    std::string eta;
    if (with_eta) eta = row.eta_pct ? csv::format_double(*row.eta_pct) : "inf";
    const std::vector<std::string> cells = {
        std::to_string(arc.from),          std::to_string(arc.to),
        csv::format_double(row.variable_cost), csv::format_double(row.fixed_cost),
        csv::format_double(row.pi),        eta};
    csv::write_row(stream, cells);
  }
  std::cout << "wrote " << out;
  if (with_eta) std::cout << " (z0 = " << report.z0 << ")";
  std::cout << "\n";
}

void cmd_bench(const std::vector<std::string>& instance_paths,
               const std::string& model_path, double time_limit, int workers,
               const std::string& tiers_text, const std::string& out) {
  const LogitModel model = read_model(model_path);
  std::vector<Instance> corpus;
  corpus.reserve(instance_paths.size());
  for (const auto& p : instance_paths) corpus.push_back(read_instance(p));

  BenchConfig config;
  config.exact.time_limit = time_limit;
  config.workers = workers;
  if (!tiers_text.empty()) {
    config.tiers.bounds = parse_id_list(tiers_text);
    if (config.tiers.bounds.empty()) throw std::runtime_error("empty --tiers list");
  }

  const BenchOutput output = run_benchmark(corpus, model, config);
  for (const auto& failed : output.failed_labels) {
    std::cerr << "warning: excluded " << failed << "\n";
  }
  write_bench_csv(output, out);
  write_bench_summary_csv(output, out + ".summary.csv");
  for (const BenchTierSummary& s : output.summary) {
    std::cout << s.tier << ": count " << s.count << ", theta_lp "
              << s.theta_lp_frac * 100 << "%, mean z_gap_lp " << s.zgap_lp_mean
              << "%, mean t_diff_lp " << s.tdiff_lp_mean << "\n";
  }
  std::cout << "wrote " << out << " and " << out << ".summary.csv\n";
}

void cmd_pipeline(const PipelineConfig& config) {
  const PipelineResult result = run_pipeline(config, &std::cout);
  std::cout << "pipeline done: cutoff " << result.cutoff << ", CV accuracy "
            << result.cv_accuracy << ", test AUC " << result.test_auc
            << ", retained " << result.retained_predictors << " predictors\n";
  if (!config.skip_cii) {
    std::cout << "criticality: mean eta_top " << result.criticality.mean_eta_top
              << "%, mean eta_bot " << result.criticality.mean_eta_bot
              << "%, eta_bot==0 in " << result.criticality.frac_bot_zero * 100
              << "% of instances\n";
  }
}

bool parse_range(const std::string& text, std::pair<int, int>& range) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return false;
  range.first = std::stoi(text.substr(0, dots));
  range.second = std::stoi(text.substr(dots + 2));
  return range.first >= 2 && range.second >= range.first;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fcnf-lab: fixed-charge network flow laboratory"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  int gen_n = 10;
  uint64_t gen_seed = 0;
  bool gen_testbed = false;
  int gen_pairs = 0;
  std::string gen_out = "instance.json";
  gen->add_option("--n", gen_n, "number of nodes")->required();
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_flag("--testbed", gen_testbed, "use test-bed cost ranges (c ~ U(0,10))");
  gen->add_option("--pairs", gen_pairs, "undirected edge count m/2");
  gen->add_option("--out", gen_out, "output path")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance");
  bool solve_exact_flag = false, solve_lp_flag = false, solve_rbr_flag = false;
  std::string solve_instance, solve_model, solve_block, solve_out = "solution.json";
  double solve_time_limit = 60.0;
  solve->add_flag("--exact", solve_exact_flag, "branch and bound");
  solve->add_flag("--lp", solve_lp_flag, "LP relaxation with rounding");
  solve->add_flag("--rbr", solve_rbr_flag, "regression-based relaxation");
  solve->add_option("instance", solve_instance, "instance JSON")->required();
  solve->add_option("--model", solve_model, "model JSON (for --rbr)");
  solve->add_option("--time-limit", solve_time_limit, "seconds (for --exact)");
  solve->add_option("--block", solve_block, "comma-separated arc ids to remove");
  solve->add_option("--out", solve_out, "output path")->required();

  // features
  auto* features_cmd = app.add_subcommand("features", "extract the 33 arc features");
  std::string features_instance, features_out = "features.csv";
  features_cmd->add_option("instance", features_instance, "instance JSON")->required();
  features_cmd->add_option("--out", features_out, "output CSV")->required();

  // dataset
  auto* dataset_cmd = app.add_subcommand("dataset", "dataset operations");
  dataset_cmd->require_subcommand(1);
  auto* ds_build = dataset_cmd->add_subcommand("build", "label instances by exact solves");
  std::vector<std::string> ds_instances;
  double ds_time_limit = 60.0;
  int ds_workers = default_workers();
  std::string ds_out = "dataset.csv";
  ds_build->add_option("instances", ds_instances, "instance JSON files")->required();
  ds_build->add_option("--time-limit", ds_time_limit, "per-solve seconds");
  ds_build->add_option("--workers", ds_workers, "parallel solves");
  ds_build->add_option("--out", ds_out, "output CSV")->required();

  auto* ds_under = dataset_cmd->add_subcommand("undersample", "balance the classes");
  std::string ds_under_in, ds_under_out = "train.csv";
  uint64_t ds_under_seed = 0;
  ds_under->add_option("input", ds_under_in, "dataset CSV")->required();
  ds_under->add_option("--seed", ds_under_seed, "random seed")->required();
  ds_under->add_option("--out", ds_under_out, "output CSV")->required();

  auto* ds_split = dataset_cmd->add_subcommand("split", "split by instance");
  std::string ds_split_in, ds_split_train = "train.csv", ds_split_test = "test.csv";
  double ds_split_fraction = 0.8;
  uint64_t ds_split_seed = 0;
  ds_split->add_option("input", ds_split_in, "dataset CSV")->required();
  ds_split->add_option("--fraction", ds_split_fraction, "train fraction in (0,1)");
  ds_split->add_option("--seed", ds_split_seed, "random seed")->required();
  ds_split->add_option("--train-out", ds_split_train, "train CSV")->required();
  ds_split->add_option("--test-out", ds_split_test, "test CSV")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "fit the logistic model");
  std::string train_in, train_out = "model.json";
  bool train_stepwise = false;
  int train_workers = default_workers();
  train_cmd->add_option("input", train_in, "train CSV")->required();
  train_cmd->add_flag("--stepwise", train_stepwise, "backward AIC selection");
  train_cmd->add_option("--workers", train_workers, "parallel candidate refits");
  train_cmd->add_option("--out", train_out, "model JSON")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a dataset");
  std::string eval_model, eval_data, eval_roc;
  double eval_cutoff = 0.0;
  int eval_kfold = 0;
  eval_cmd->add_option("model", eval_model, "model JSON")->required();
  eval_cmd->add_option("data", eval_data, "dataset CSV")->required();
  eval_cmd->add_option("--cutoff", eval_cutoff, "override the model cutoff");
  eval_cmd->add_option("--roc", eval_roc, "write the ROC curve CSV here");
  eval_cmd->add_option("--kfold", eval_kfold, "run k-fold cross validation");

  // cii
  auto* cii_cmd = app.add_subcommand("cii", "arc criticality report");
  std::string cii_instance, cii_model, cii_out = "report.csv";
  bool cii_eta = false;
  double cii_time_limit = 60.0;
  cii_cmd->add_option("instance", cii_instance, "instance JSON")->required();
  cii_cmd->add_option("--model", cii_model, "model JSON")->required();
  cii_cmd->add_flag("--eta", cii_eta, "also compute per-arc failure effects");
  cii_cmd->add_option("--time-limit", cii_time_limit, "per-solve seconds");
  cii_cmd->add_option("--out", cii_out, "output CSV")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "RBR vs LP vs exact benchmark");
  std::vector<std::string> bench_instances;
  std::string bench_model, bench_tiers, bench_out = "bench.csv";
  double bench_time_limit = 60.0;
  int bench_workers = default_workers();
  bench_cmd->add_option("instances", bench_instances, "instance JSON files")->required();
  bench_cmd->add_option("--model", bench_model, "model JSON")->required();
  bench_cmd->add_option("--time-limit", bench_time_limit, "exact-solve seconds");
  bench_cmd->add_option("--workers", bench_workers, "parallel instances");
  bench_cmd->add_option("--tiers", bench_tiers, "tier bounds, e.g. 15,25,40");
  bench_cmd->add_option("--out", bench_out, "output CSV")->required();

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "end-to-end run at desk scale");
  PipelineConfig pipe_config;
  pipe_config.workers = default_workers();
  std::string pipe_train_n = "5..15", pipe_test_n = "15..25", pipe_bench_n = "10..40";
  std::string pipe_out = "out";
  pipe_cmd->add_option("--seed", pipe_config.seed, "base seed")->required();
  pipe_cmd->add_option("--train-n", pipe_train_n, "train node range, e.g. 5..15");
  pipe_cmd->add_option("--test-n", pipe_test_n, "test node range, e.g. 15..25");
  pipe_cmd->add_option("--bench-n", pipe_bench_n, "bench node range, e.g. 10..40");
  pipe_cmd->add_option("--train-count", pipe_config.train_count, "train instances");
  pipe_cmd->add_option("--test-count", pipe_config.test_count, "test instances");
  pipe_cmd->add_option("--cii-count", pipe_config.cii_count, "criticality instances");
  pipe_cmd->add_option("--cii-n", pipe_config.cii_n, "criticality node count");
  pipe_cmd->add_option("--bench-count", pipe_config.bench_count, "bench instances");
  pipe_cmd->add_option("--time-limit", pipe_config.label_time_limit,
                       "exact time limit for labeling solves");
  pipe_cmd->add_option("--bench-time-limit", pipe_config.bench_exact_time_limit,
                       "exact time limit inside the benchmark");
  pipe_cmd->add_option("--workers", pipe_config.workers, "parallel instances");
  pipe_cmd->add_option("--out", pipe_out, "output directory")->required();
  pipe_cmd->add_flag("--write-instances", pipe_config.write_instances,
                     "also write every generated instance JSON");
  pipe_cmd->add_flag("--skip-cii", pipe_config.skip_cii, "skip the criticality stage");
  pipe_cmd->add_flag("--skip-bench", pipe_config.skip_bench, "skip the benchmark stage");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      cmd_gen(gen_n, gen_seed, gen_testbed, gen_pairs, gen_out);
    } else if (*solve) {
      const int modes = int(solve_exact_flag) + int(solve_lp_flag) + int(solve_rbr_flag);
      if (modes != 1) throw std::runtime_error("pick exactly one of --exact/--lp/--rbr");
      const std::string mode = solve_lp_flag ? "lp" : solve_rbr_flag ? "rbr" : "exact";
      cmd_solve(mode, solve_instance, solve_model, solve_time_limit, solve_block,
                solve_out);
    } else if (*features_cmd) {
      cmd_features(features_instance, features_out);
    } else if (*ds_build) {
      cmd_dataset_build(ds_instances, ds_time_limit, ds_workers, ds_out);
    } else if (*ds_under) {
      cmd_dataset_undersample(ds_under_in, ds_under_seed, ds_under_out);
    } else if (*ds_split) {
      cmd_dataset_split(ds_split_in, ds_split_fraction, ds_split_seed,
                        ds_split_train, ds_split_test);
    } else if (*train_cmd) {
      cmd_train(train_in, train_stepwise, train_workers, train_out);
    } else if (*eval_cmd) {
      cmd_eval(eval_model, eval_data, eval_cutoff, eval_roc, eval_kfold);
    } else if (*cii_cmd) {
      cmd_cii(cii_instance, cii_model, cii_eta, cii_time_limit, cii_out);
    } else if (*bench_cmd) {
      cmd_bench(bench_instances, bench_model, bench_time_limit, bench_workers,
                bench_tiers, bench_out);
    } else if (*pipe_cmd) {
      if (!parse_range(pipe_train_n, pipe_config.train_n) ||
          !parse_range(pipe_test_n, pipe_config.test_n) ||
          !parse_range(pipe_bench_n, pipe_config.bench_n)) {
        throw std::runtime_error("ranges must look like 5..15 with lo >= 2");
      }
      pipe_config.out_dir = pipe_out;
      cmd_pipeline(pipe_config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
