#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hemo/anfis.hpp"
#include "hemo/dataset.hpp"
#include "hemo/ensemble.hpp"
#include "hemo/metrics.hpp"
#include "hemo/sae.hpp"
#include "hemo/svm.hpp"

namespace hemo {

/// Everything a full run needs; parsed from a JSON config file.
struct ExperimentConfig {
  std::string dataset_path;
  std::string label_column = "label";
  std::vector<std::string> feature_columns;  // empty = the ten analytes
  std::uint64_t seed = 42;
  int folds = 5;
  std::string output_dir = "out";
  std::vector<std::string> classifiers = {"ensemble"};
  int workers = 0;  // 0 = hardware concurrency
  bool inverse_recall_literal = false;

  EnsembleConfig ensemble;
  int knn_k = 5;
  ForestConfig forest;
  MlpConfig mlp;
  SvmConfig svm;  // kernel field ignored; chosen by classifier name
  AnfisTrainConfig anfis;
  std::vector<int> anfis_rules = {10, 12, 14, 16, 18};
  SaeTrainConfig sae;
};

ExperimentConfig experiment_config_from_json(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);

/// Train-side and test-side evaluation of one classifier across all folds.
struct ClassifierResult {
  std::string name;          // e.g. "anfis_r14"
  std::string display_name;  // e.g. "ANFIS (14 rules)"
  std::vector<MetricsRow> train_rows;
  std::vector<MetricsRow> test_rows;
  MetricsRow train_average;
  MetricsRow test_average;
  std::vector<ConfusionMatrix> train_confusions;
  std::vector<ConfusionMatrix> test_confusions;
  Eigen::Matrix2d train_confusion_average;
  Eigen::Matrix2d test_confusion_average;
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  int folds = 0;
  std::string config_hash;
  std::string dataset_hash;
  std::vector<double> fold_positive_share;  // class balance per fold
  std::vector<ClassifierResult> classifiers;
};

/// Runs 5-fold (or k-fold) cross-validation for every configured classifier:
/// train on k-1 folds, evaluate on the held-out fold and on the training
/// folds, average across folds. Deterministic given (config, seed); folds
/// and classifiers may run on a worker pool without affecting the output.
ExperimentReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat { kMarkdown, kCsv, kJson };
ReportFormat report_format_from_name(const std::string& name);

/// Renders fold-by-fold tables (columns Fold-1..k, Average; rows Accuracy,
/// Precision, Recall, F1-Score plus Specificity) and the cross-classifier
/// comparison. The JSON form parses back into an equal report.
std::string render_report(const ExperimentReport& report, ReportFormat format);

ExperimentReport report_from_json(const std::string& json_text);

/// FNV-1a-64 hex digest, used for config/dataset provenance stamps.
std::string fnv1a_hex(const std::string& bytes);

/// Loads the CSV, projects feature columns, imputes and normalizes.
Dataset load_experiment_dataset(const ExperimentConfig& config);

}  // namespace hemo
