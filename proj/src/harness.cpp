#include "hemo/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hemo/rng.hpp"

namespace hemo {

namespace {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("HEMOBENCH_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= 1) std::cerr << "[hemobench] " << message << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A unit of work: one classifier on one fold.
struct Job {
  std::size_t classifier_index;
  std::size_t fold;
};

// Predictions for the train and test slices of one fold.
struct FoldOutcome {
  ConfusionMatrix train_cm;
  ConfusionMatrix test_cm;
};

using TrainPredictFn = std::function<FoldOutcome(
    const Dataset&, const FoldPlan&, std::size_t fold, std::uint64_t seed)>;

FoldOutcome evaluate_split(const Dataset& dataset, const FoldPlan& plan,
                           std::size_t fold,
                           const std::function<Eigen::VectorXi(const Matrix&)>&
                               predict) {
  const auto train_idx = plan.train_indices(fold);
  const auto& test_idx = plan.test_indices(fold);
  FoldOutcome outcome;
  outcome.train_cm = confusion(predict(dataset.rows(train_idx)),
                               dataset.labels_at(train_idx));
  outcome.test_cm = confusion(predict(dataset.rows(test_idx)),
                              dataset.labels_at(test_idx));
  return outcome;
}

struct ClassifierSpec {
  std::string name;
  std::string display_name;
  TrainPredictFn run;
};

std::vector<ClassifierSpec> build_specs(const ExperimentConfig& config) {
  std::vector<ClassifierSpec> specs;

  const auto add_svm = [&](const std::string& name, SvmKernel kernel,
                           const std::string& display) {
    SvmConfig svm_config = config.svm;
    svm_config.kernel = kernel;
    specs.push_back(
        {name, display,
         [svm_config](const Dataset& dataset, const FoldPlan& plan,
                      std::size_t fold, std::uint64_t seed) {
           const auto train_idx = plan.train_indices(fold);
           const auto result =
               svm_train(dataset.rows(train_idx), dataset.labels_at(train_idx),
                         svm_config, seed);
           if (!result.converged) {
             log_info("svm fold " + std::to_string(fold + 1) +
                      " returned best iterate without full convergence");
           }
           return evaluate_split(dataset, plan, fold,
                                 [&](const Matrix& x) {
                                   return svm_predict_batch(result.model, x);
                                 });
         }});
  };

  for (const std::string& name : config.classifiers) {
    if (name == "ensemble") {
      EnsembleConfig ens = config.ensemble;
      specs.push_back(
          {"ensemble", "Ensemble (MLP + K-NN + Random Forest)",
           [ens](const Dataset& dataset, const FoldPlan& plan, std::size_t fold,
                 std::uint64_t seed) {
             const auto train_idx = plan.train_indices(fold);
             const auto model = ensemble_train(dataset, train_idx, ens, seed);
             return evaluate_split(dataset, plan, fold,
                                   [&](const Matrix& x) {
                                     return ensemble_predict_batch(model, x);
                                   });
           }});
    } else if (name == "knn") {
      const int k = config.knn_k;
      specs.push_back(
          {"knn", "K-NN",
           [k](const Dataset& dataset, const FoldPlan& plan, std::size_t fold,
               std::uint64_t) {
             const auto train_idx = plan.train_indices(fold);
             const auto model = knn_fit(dataset.rows(train_idx),
                                        dataset.labels_at(train_idx), k);
             return evaluate_split(dataset, plan, fold,
                                   [&](const Matrix& x) {
                                     return knn_predict_batch(model, x);
                                   });
           }});
    } else if (name == "forest") {
      const ForestConfig forest = config.forest;
      specs.push_back(
          {"forest", "Random Forest",
           [forest](const Dataset& dataset, const FoldPlan& plan,
                    std::size_t fold, std::uint64_t seed) {
             const auto train_idx = plan.train_indices(fold);
             const auto model =
                 forest_train(dataset.rows(train_idx),
                              dataset.labels_at(train_idx), forest, seed);
             return evaluate_split(dataset, plan, fold,
                                   [&](const Matrix& x) {
                                     return forest_predict_batch(model, x);
                                   });
           }});
    } else if (name == "mlp") {
      const MlpConfig mlp = config.mlp;
      specs.push_back(
          {"mlp", "MLP",
           [mlp](const Dataset& dataset, const FoldPlan& plan, std::size_t fold,
                 std::uint64_t seed) {
             const auto train_idx = plan.train_indices(fold);
             const auto model = mlp_train(dataset.rows(train_idx),
                                          dataset.labels_at(train_idx), mlp,
                                          seed);
             return evaluate_split(dataset, plan, fold,
                                   [&](const Matrix& x) {
                                     return mlp_predict_batch(model, x);
                                   });
           }});
    } else if (name == "svm_linear") {
      add_svm("svm_linear", SvmKernel::kLinear, "SVM (kernel: Linear)");
    } else if (name == "svm_rbf") {
      add_svm("svm_rbf", SvmKernel::kRbf, "SVM (kernel: RBF)");
    } else if (name == "svm_sigmoid") {
      add_svm("svm_sigmoid", SvmKernel::kSigmoid, "SVM (kernel: Sigmoid)");
    } else if (name == "anfis") {
      for (const int rules : config.anfis_rules) {
        AnfisTrainConfig anfis_config = config.anfis;
        anfis_config.n_rules = rules;
        specs.push_back(
            {"anfis_r" + std::to_string(rules),
             "ANFIS (" + std::to_string(rules) + " rules)",
             [anfis_config](const Dataset& dataset, const FoldPlan& plan,
                            std::size_t fold, std::uint64_t seed) {
               const auto train_idx = plan.train_indices(fold);
               const auto model =
                   anfis_train(dataset, train_idx, anfis_config, seed);
               return evaluate_split(dataset, plan, fold,
                                     [&](const Matrix& x) {
                                       return anfis_predict_batch(model, x);
                                     });
             }});
      }
    } else if (name == "sae") {
      const SaeTrainConfig sae = config.sae;
      specs.push_back(
          {"sae", "Stacked Autoencoder",
           [sae](const Dataset& dataset, const FoldPlan& plan, std::size_t fold,
                 std::uint64_t seed) {
             const auto train_idx = plan.train_indices(fold);
             const auto model = stack_and_finetune(dataset, train_idx, sae, seed);
             return evaluate_split(dataset, plan, fold,
                                   [&](const Matrix& x) {
                                     return sae_predict_batch(model, x);
                                   });
           }});
    } else {
      throw std::runtime_error("unknown classifier '" + name + "'");
    }
  }
  return specs;
}

nlohmann::json metrics_row_to_json(const MetricsRow& row) {
  const auto field = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"accuracy", field(row.accuracy)},
          {"precision", field(row.precision)},
          {"recall", field(row.recall)},
          {"f1", field(row.f1)},
          {"inverse_recall", field(row.inverse_recall)}};
}

MetricsRow metrics_row_from_json(const nlohmann::json& j) {
  const auto field = [&](const char* name) -> std::optional<double> {
    if (j.at(name).is_null()) return std::nullopt;
    return j.at(name).get<double>();
  };
  MetricsRow row;
  row.accuracy = field("accuracy");
  row.precision = field("precision");
  row.recall = field("recall");
  row.f1 = field("f1");
  row.inverse_recall = field("inverse_recall");
  return row;
}

nlohmann::json confusion_to_json(const ConfusionMatrix& cm) {
  return {{"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}, {"tp", cm.tp}};
}

ConfusionMatrix confusion_from_json(const nlohmann::json& j) {
  return {j.at("tn").get<long long>(), j.at("fp").get<long long>(),
          j.at("fn").get<long long>(), j.at("tp").get<long long>()};
}

nlohmann::json matrix2_to_json(const Eigen::Matrix2d& m) {
  return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

Eigen::Matrix2d matrix2_from_json(const nlohmann::json& j) {
  Eigen::Matrix2d m;
  m << j.at(0).at(0).get<double>(), j.at(0).at(1).get<double>(),
      j.at(1).at(0).get<double>(), j.at(1).at(1).get<double>();
  return m;
}

std::string format_metric(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", *v);
  return buffer;
}

void render_fold_table(std::ostringstream& out, const std::string& phase,
                       const std::vector<MetricsRow>& rows,
                       const MetricsRow& average) {
  out << "| " << phase << " |";
  for (std::size_t f = 0; f < rows.size(); ++f) out << " Fold-" << f + 1 << " |";
  out << " Average |\n|---|";
  for (std::size_t f = 0; f <= rows.size(); ++f) out << "---|";
  out << "\n";

  const auto metric_line = [&](const std::string& label,
                               std::optional<double> MetricsRow::*field) {
    out << "| " << label << " |";
    for (const auto& row : rows) out << " " << format_metric(row.*field) << " |";
    out << " " << format_metric(average.*field) << " |\n";
  };
  metric_line("Accuracy", &MetricsRow::accuracy);
  metric_line("Precision", &MetricsRow::precision);
  metric_line("Recall", &MetricsRow::recall);
  metric_line("F1-Score", &MetricsRow::f1);
  metric_line("Specificity", &MetricsRow::inverse_recall);
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(h));
  return buffer;
}

ExperimentConfig experiment_config_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ExperimentConfig config;
  config.dataset_path = j.at("dataset").get<std::string>();
  if (j.contains("label_column")) config.label_column = j["label_column"];
  if (j.contains("feature_columns")) {
    config.feature_columns =
        j["feature_columns"].get<std::vector<std::string>>();
  }
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("folds")) config.folds = j["folds"].get<int>();
  if (j.contains("output_dir")) config.output_dir = j["output_dir"];
  if (j.contains("classifiers")) {
    config.classifiers = j["classifiers"].get<std::vector<std::string>>();
  }
  if (j.contains("workers")) config.workers = j["workers"].get<int>();
  if (j.contains("inverse_recall_literal")) {
    config.inverse_recall_literal = j["inverse_recall_literal"].get<bool>();
  }
  if (j.contains("knn")) config.knn_k = j["knn"].value("k", config.knn_k);
  if (j.contains("forest")) {
    const auto& f = j["forest"];
    config.forest.n_trees = f.value("n_trees", config.forest.n_trees);
    config.forest.features_per_split =
        f.value("features_per_split", config.forest.features_per_split);
    config.forest.bootstrap = f.value("bootstrap", config.forest.bootstrap);
  }
  if (j.contains("mlp")) {
    const auto& m = j["mlp"];
    if (m.contains("hidden_dims")) {
      config.mlp.hidden_dims = m["hidden_dims"].get<std::vector<int>>();
    }
    config.mlp.learning_rate = m.value("learning_rate", config.mlp.learning_rate);
    config.mlp.epochs = m.value("epochs", config.mlp.epochs);
    config.mlp.batch_size = m.value("batch_size", config.mlp.batch_size);
  }
  if (j.contains("svm")) {
    const auto& s = j["svm"];
    config.svm.c = s.value("C", config.svm.c);
    config.svm.gamma = s.value("gamma", config.svm.gamma);
    config.svm.coef0 = s.value("coef0", config.svm.coef0);
    config.svm.kkt_tolerance = s.value("tolerance", config.svm.kkt_tolerance);
    config.svm.max_passes = s.value("max_passes", config.svm.max_passes);
  }
  if (j.contains("anfis")) {
    const auto& a = j["anfis"];
    if (a.contains("rules")) config.anfis_rules = a["rules"].get<std::vector<int>>();
    config.anfis.learning_rate =
        a.value("learning_rate", config.anfis.learning_rate);
    config.anfis.epochs = a.value("epochs", config.anfis.epochs);
  }
  if (j.contains("sae")) {
    const auto& s = j["sae"];
    if (s.contains("hidden_dims")) {
      config.sae.hidden_dims = s["hidden_dims"].get<std::vector<int>>();
    }
    config.sae.learning_rate = s.value("learning_rate", config.sae.learning_rate);
    config.sae.momentum = s.value("momentum", config.sae.momentum);
    config.sae.l2_lambda = s.value("l2_lambda", config.sae.l2_lambda);
    config.sae.epochs = s.value("epochs", config.sae.epochs);
    config.sae.batch_size = s.value("batch_size", config.sae.batch_size);
    config.sae.fine_tune_learning_rate =
        s.value("fine_tune_learning_rate", config.sae.fine_tune_learning_rate);
    config.sae.fine_tune_epochs =
        s.value("fine_tune_epochs", config.sae.fine_tune_epochs);
    config.sae.fine_tune_batch_size =
        s.value("fine_tune_batch_size", config.sae.fine_tune_batch_size);
  }
  // The ensemble reuses the member hyper-parameter blocks.
  config.ensemble.mlp = config.mlp;
  config.ensemble.knn_k = config.knn_k;
  config.ensemble.forest = config.forest;
  return config;
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["dataset"] = config.dataset_path;
  j["label_column"] = config.label_column;
  j["feature_columns"] = config.feature_columns;
  j["seed"] = config.seed;
  j["folds"] = config.folds;
  j["output_dir"] = config.output_dir;
  j["classifiers"] = config.classifiers;
  j["workers"] = config.workers;
  j["inverse_recall_literal"] = config.inverse_recall_literal;
  j["knn"] = {{"k", config.knn_k}};
  j["forest"] = {{"n_trees", config.forest.n_trees},
                 {"features_per_split", config.forest.features_per_split},
                 {"bootstrap", config.forest.bootstrap}};
  j["mlp"] = {{"hidden_dims", config.mlp.hidden_dims},
              {"learning_rate", config.mlp.learning_rate},
              {"epochs", config.mlp.epochs},
              {"batch_size", config.mlp.batch_size}};
  j["svm"] = {{"C", config.svm.c},
              {"gamma", config.svm.gamma},
              {"coef0", config.svm.coef0},
              {"tolerance", config.svm.kkt_tolerance},
              {"max_passes", config.svm.max_passes}};
  j["anfis"] = {{"rules", config.anfis_rules},
                {"learning_rate", config.anfis.learning_rate},
                {"epochs", config.anfis.epochs}};
  j["sae"] = {{"hidden_dims", config.sae.hidden_dims},
              {"learning_rate", config.sae.learning_rate},
              {"momentum", config.sae.momentum},
              {"l2_lambda", config.sae.l2_lambda},
              {"epochs", config.sae.epochs},
              {"batch_size", config.sae.batch_size},
              {"fine_tune_learning_rate", config.sae.fine_tune_learning_rate},
              {"fine_tune_epochs", config.sae.fine_tune_epochs},
              {"fine_tune_batch_size", config.sae.fine_tune_batch_size}};
  return j.dump(2);
}

Dataset load_experiment_dataset(const ExperimentConfig& config) {
  const RawTable raw = load_csv(config.dataset_path, config.label_column);
  const std::vector<std::string>& wanted =
      config.feature_columns.empty() ? analyte_columns() : config.feature_columns;
  return impute_and_normalize(select_columns(raw, wanted));
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const Dataset dataset = load_experiment_dataset(config);
  const FoldPlan plan = make_folds(static_cast<std::size_t>(dataset.n_samples()),
                                   config.folds, config.seed);

  ExperimentReport report;
  report.seed = config.seed;
  report.folds = config.folds;
  report.config_hash = fnv1a_hex(experiment_config_to_json(config));
  report.dataset_hash = fnv1a_hex(read_file(config.dataset_path));
  for (const auto& fold : plan.folds) {
    double positives = 0.0;
    for (const std::size_t i : fold) positives += dataset.labels[static_cast<Eigen::Index>(i)];
    report.fold_positive_share.push_back(positives /
                                         static_cast<double>(fold.size()));
  }

  const auto specs = build_specs(config);
  const std::size_t n_folds = static_cast<std::size_t>(config.folds);

  std::vector<Job> jobs;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    for (std::size_t f = 0; f < n_folds; ++f) jobs.push_back({c, f});
  }
  std::vector<FoldOutcome> outcomes(jobs.size());
  std::vector<std::string> failures(jobs.size());

  // Bounded worker pool; the result slots make assembly order-independent.
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers =
      config.workers > 0 ? static_cast<unsigned>(config.workers)
                         : std::min<unsigned>(hardware, jobs.size());
  std::atomic<std::size_t> next_job{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t index = next_job.fetch_add(1);
      if (index >= jobs.size()) return;
      const Job& job = jobs[index];
      const auto& spec = specs[job.classifier_index];
      const std::uint64_t seed =
          derive_seed(config.seed, spec.name, static_cast<std::uint64_t>(job.fold));
      try {
        outcomes[index] = spec.run(dataset, plan, job.fold, seed);
      } catch (const std::exception& error) {
        failures[index] = spec.name + " fold " + std::to_string(job.fold + 1) +
                          ": " + error.what();
      }
      log_info(spec.name + " fold " + std::to_string(job.fold + 1) + " done");
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();

  for (const auto& failure : failures) {
    if (!failure.empty()) throw std::runtime_error(failure);
  }

  const auto rule = config.inverse_recall_literal
                        ? InverseRecallRule::kLiteralRecall
                        : InverseRecallRule::kSpecificity;
  std::size_t job_index = 0;
  for (const auto& spec : specs) {
    ClassifierResult result;
    result.name = spec.name;
    result.display_name = spec.display_name;
    for (std::size_t f = 0; f < n_folds; ++f, ++job_index) {
      const FoldOutcome& outcome = outcomes[job_index];
      result.train_confusions.push_back(outcome.train_cm);
      result.test_confusions.push_back(outcome.test_cm);
      result.train_rows.push_back(compute_metrics(outcome.train_cm, rule));
      result.test_rows.push_back(compute_metrics(outcome.test_cm, rule));
    }
    result.train_average = fold_average(result.train_rows);
    result.test_average = fold_average(result.test_rows);
    result.train_confusion_average = average_confusion(result.train_confusions);
    result.test_confusion_average = average_confusion(result.test_confusions);
    report.classifiers.push_back(std::move(result));
  }
  return report;
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw std::runtime_error("unknown report format '" + name + "'");
}

std::string render_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["folds"] = report.folds;
    j["config_hash"] = report.config_hash;
    j["dataset_hash"] = report.dataset_hash;
    j["fold_positive_share"] = report.fold_positive_share;
    nlohmann::json classifiers = nlohmann::json::array();
    for (const auto& c : report.classifiers) {
      nlohmann::json rows_train = nlohmann::json::array();
      nlohmann::json rows_test = nlohmann::json::array();
      nlohmann::json cms_train = nlohmann::json::array();
      nlohmann::json cms_test = nlohmann::json::array();
      for (const auto& r : c.train_rows) rows_train.push_back(metrics_row_to_json(r));
      for (const auto& r : c.test_rows) rows_test.push_back(metrics_row_to_json(r));
      for (const auto& m : c.train_confusions) cms_train.push_back(confusion_to_json(m));
      for (const auto& m : c.test_confusions) cms_test.push_back(confusion_to_json(m));
      classifiers.push_back(
          {{"name", c.name},
           {"display_name", c.display_name},
           {"train_rows", std::move(rows_train)},
           {"test_rows", std::move(rows_test)},
           {"train_average", metrics_row_to_json(c.train_average)},
           {"test_average", metrics_row_to_json(c.test_average)},
           {"train_confusions", std::move(cms_train)},
           {"test_confusions", std::move(cms_test)},
           {"train_confusion_average",
            matrix2_to_json(c.train_confusion_average)},
           {"test_confusion_average", matrix2_to_json(c.test_confusion_average)}});
    }
    j["classifiers"] = std::move(classifiers);
    return j.dump(2);
  }

  if (format == ReportFormat::kCsv) {
    std::ostringstream out;
    out << "classifier,phase,fold,accuracy,precision,recall,f1,specificity\n";
    const auto cell = [](const std::optional<double>& v) {
      if (!v) return std::string();
      char buffer[32];
      std::snprintf(buffer, sizeof(buffer), "%.6f", *v);
      return std::string(buffer);
    };
    const auto emit = [&](const std::string& name, const std::string& phase,
                          const std::string& fold, const MetricsRow& row) {
      out << name << ',' << phase << ',' << fold << ',' << cell(row.accuracy)
          << ',' << cell(row.precision) << ',' << cell(row.recall) << ','
          << cell(row.f1) << ',' << cell(row.inverse_recall) << '\n';
    };
    for (const auto& c : report.classifiers) {
      for (std::size_t f = 0; f < c.train_rows.size(); ++f) {
        emit(c.name, "train", std::to_string(f + 1), c.train_rows[f]);
      }
      emit(c.name, "train", "average", c.train_average);
      for (std::size_t f = 0; f < c.test_rows.size(); ++f) {
        emit(c.name, "test", std::to_string(f + 1), c.test_rows[f]);
      }
      emit(c.name, "test", "average", c.test_average);
    }
    return out.str();
  }

  std::ostringstream out;
  out << "# Blood-test classification report\n\n";
  out << "- seed: " << report.seed << "\n";
  out << "- folds: " << report.folds << "\n";
  out << "- config hash: `" << report.config_hash << "`\n";
  out << "- dataset hash: `" << report.dataset_hash << "`\n";
  out << "- positive-class share per fold:";
  for (const double share : report.fold_positive_share) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), " %.3f", share);
    out << buffer;
  }
  out << "\n\n";

  for (const auto& c : report.classifiers) {
    out << "## " << c.display_name << "\n\n";
    render_fold_table(out, "Train", c.train_rows, c.train_average);
    out << "\n";
    render_fold_table(out, "Test", c.test_rows, c.test_average);
    out << "\nAveraged confusion matrices (rows: truth 0/1, columns: "
           "predicted 0/1):\n\n";
    const auto cm_block = [&](const char* phase, const Eigen::Matrix2d& m) {
      char buffer[128];
      std::snprintf(buffer, sizeof(buffer),
                    "- %s: [[%.1f, %.1f], [%.1f, %.1f]]\n", phase, m(0, 0),
                    m(0, 1), m(1, 0), m(1, 1));
      out << buffer;
    };
    cm_block("train", c.train_confusion_average);
    cm_block("test", c.test_confusion_average);
    out << "\n";
  }

  if (!report.classifiers.empty()) {
    out << "## Comparison (test averages)\n\n";
    out << "| Classifier | Accuracy | Precision | Recall | F1-Score | "
           "Specificity |\n|---|---|---|---|---|---|\n";
    for (const auto& c : report.classifiers) {
      out << "| " << c.display_name << " | "
          << format_metric(c.test_average.accuracy) << " | "
          << format_metric(c.test_average.precision) << " | "
          << format_metric(c.test_average.recall) << " | "
          << format_metric(c.test_average.f1) << " | "
          << format_metric(c.test_average.inverse_recall) << " |\n";
    }
    out << "\n";
  }
  out << "Specificity is reported as TN/(TN+FP); the printed inverse-recall "
         "formula in the reference tables duplicates recall and can be "
         "selected with `inverse_recall_literal`.\n";
  return out.str();
}

ExperimentReport report_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ExperimentReport report;
  report.seed = j.at("seed").get<std::uint64_t>();
  report.folds = j.at("folds").get<int>();
  report.config_hash = j.at("config_hash").get<std::string>();
  report.dataset_hash = j.at("dataset_hash").get<std::string>();
  report.fold_positive_share =
      j.at("fold_positive_share").get<std::vector<double>>();
  for (const auto& cj : j.at("classifiers")) {
    ClassifierResult c;
    c.name = cj.at("name").get<std::string>();
    c.display_name = cj.at("display_name").get<std::string>();
    for (const auto& r : cj.at("train_rows")) c.train_rows.push_back(metrics_row_from_json(r));
    for (const auto& r : cj.at("test_rows")) c.test_rows.push_back(metrics_row_from_json(r));
    c.train_average = metrics_row_from_json(cj.at("train_average"));
    c.test_average = metrics_row_from_json(cj.at("test_average"));
    for (const auto& m : cj.at("train_confusions")) c.train_confusions.push_back(confusion_from_json(m));
    for (const auto& m : cj.at("test_confusions")) c.test_confusions.push_back(confusion_from_json(m));
    c.train_confusion_average = matrix2_from_json(cj.at("train_confusion_average"));
    c.test_confusion_average = matrix2_from_json(cj.at("test_confusion_average"));
    report.classifiers.push_back(std::move(c));
  }
  return report;
}

}  // namespace hemo
