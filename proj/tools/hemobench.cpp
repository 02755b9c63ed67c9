#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hemo/harness.hpp"
#include "hemo/rng.hpp"
#include "hemo/stats.hpp"
#include "hemo/synth.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

int run_command(const std::string& config_path) {
  const hemo::ExperimentConfig config =
      hemo::experiment_config_from_json(read_file(config_path));
  const hemo::ExperimentReport report = hemo::run_experiment(config);

  std::filesystem::create_directories(config.output_dir);
  const auto out = [&](const char* name) {
    return (std::filesystem::path(config.output_dir) / name).string();
  };
  write_file(out("report.json"),
             hemo::render_report(report, hemo::ReportFormat::kJson));
  write_file(out("report.md"),
             hemo::render_report(report, hemo::ReportFormat::kMarkdown));
  write_file(out("report.csv"),
             hemo::render_report(report, hemo::ReportFormat::kCsv));
  std::cout << "wrote report.{json,md,csv} to " << config.output_dir << "\n";
  return 0;
}

int stats_command(const std::string& data_path, const std::string& label_column,
                  const std::string& output_dir, int top_k) {
  const hemo::RawTable raw = hemo::load_csv(data_path, label_column);
  const hemo::Dataset dataset = hemo::impute_and_normalize(raw);

  const hemo::Matrix cov = hemo::covariance(dataset.features);
  const hemo::Vector spectrum = hemo::eigen_spectrum(cov);
  const hemo::Matrix corr =
      hemo::pearson_matrix(dataset.features, dataset.labels.cast<double>());
  const int k = std::min<int>(top_k, static_cast<int>(dataset.n_features()));
  const auto top = hemo::select_top_features(corr, static_cast<std::size_t>(k));

  std::filesystem::create_directories(output_dir);
  const auto out = [&](const char* name) {
    return (std::filesystem::path(output_dir) / name).string();
  };
  hemo::save_matrix_csv(cov, out("covariance.csv"), dataset.feature_names);
  std::vector<std::string> corr_header = dataset.feature_names;
  corr_header.push_back(label_column);
  hemo::save_matrix_csv(corr, out("correlation.csv"), corr_header);
  hemo::save_matrix_csv(spectrum.transpose(), out("eigenvalues.csv"));

  std::cout << "covariance eigenvalues (descending):\n";
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    std::cout << "  " << spectrum[i] << "\n";
  }
  std::cout << "top-" << k << " features by |Pearson correlation with label|:\n";
  for (const std::size_t index : top) {
    std::cout << "  " << dataset.feature_names[index] << "  (r = "
              << corr(static_cast<Eigen::Index>(index), corr.cols() - 1)
              << ")\n";
  }
  std::cout << "matrices written to " << output_dir << "\n";
  return 0;
}

int train_command(const std::string& model_name, const std::string& data_path,
                  const std::string& label_column, std::uint64_t seed,
                  const std::string& out_path, const std::string& config_path) {
  hemo::ExperimentConfig config;
  if (!config_path.empty()) {
    config = hemo::experiment_config_from_json(read_file(config_path));
  }
  config.dataset_path = data_path;
  config.label_column = label_column;

  const hemo::Dataset dataset = hemo::load_experiment_dataset(config);
  std::vector<std::size_t> all(static_cast<std::size_t>(dataset.n_samples()));
  std::iota(all.begin(), all.end(), 0);
  const hemo::Matrix x = dataset.rows(all);
  const Eigen::VectorXi y = dataset.labels;

  std::string json;
  if (model_name == "anfis") {
    config.anfis.n_rules = config.anfis_rules.empty() ? 14 : config.anfis_rules[0];
    const auto model = hemo::anfis_train(dataset, all, config.anfis, seed);
    json = hemo::anfis_to_json(model, config.anfis, seed);
  } else if (model_name == "knn") {
    json = hemo::knn_to_json(hemo::knn_fit(x, y, config.knn_k));
  } else if (model_name == "rf") {
    json = hemo::forest_to_json(hemo::forest_train(x, y, config.forest, seed));
  } else if (model_name == "mlp") {
    json = hemo::mlp_to_json(hemo::mlp_train(x, y, config.mlp, seed), config.mlp,
                             seed);
  } else if (model_name == "svm") {
    json = hemo::svm_to_json(hemo::svm_train(x, y, config.svm, seed).model);
  } else if (model_name == "sae") {
    const auto model = hemo::stack_and_finetune(dataset, all, config.sae, seed);
    json = hemo::sae_to_json(model, config.sae, seed);
  } else if (model_name == "ensemble") {
    const auto model = hemo::ensemble_train(dataset, all, config.ensemble, seed);
    json = hemo::ensemble_to_json(model, config.ensemble, seed);
  } else {
    throw std::runtime_error("unknown model '" + model_name + "'");
  }
  write_file(out_path, json);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int report_command(const std::string& in_path, const std::string& format_name,
                   const std::string& out_path) {
  const hemo::ExperimentReport report =
      hemo::report_from_json(read_file(in_path));
  const std::string rendered =
      hemo::render_report(report, hemo::report_format_from_name(format_name));
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    write_file(out_path, rendered);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blood-test COVID-19 classification workbench"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the full cross-validated experiment");
  std::string run_config;
  run->add_option("--config", run_config, "experiment config JSON")->required();

  auto* stats = app.add_subcommand("stats", "preprocessing statistics");
  std::string stats_data, stats_label = "label", stats_out = "stats_out";
  int stats_top_k = 10;
  stats->add_option("--data", stats_data, "input CSV")->required();
  stats->add_option("--label", stats_label, "label column name");
  stats->add_option("--out", stats_out, "output directory");
  stats->add_option("--top-k", stats_top_k, "features to select");

  auto* train = app.add_subcommand("train", "train one model on the full dataset");
  std::string train_model, train_data, train_label = "label";
  std::string train_out = "model.json", train_config;
  std::uint64_t train_seed = 42;
  train->add_option("--model", train_model,
                    "anfis|knn|rf|mlp|svm|sae|ensemble")->required();
  train->add_option("--data", train_data, "input CSV")->required();
  train->add_option("--label", train_label, "label column name");
  train->add_option("--seed", train_seed, "training seed");
  train->add_option("--out", train_out, "output model JSON");
  train->add_option("--config", train_config, "hyper-parameter config JSON");

  auto* report = app.add_subcommand("report", "re-render a saved report");
  std::string report_in, report_format = "md", report_out;
  report->add_option("--in", report_in, "report JSON")->required();
  report->add_option("--format", report_format, "md|csv|json");
  report->add_option("--out", report_out, "output path (default stdout)");

  auto* synth = app.add_subcommand("synth", "generate the surrogate blood CSV");
  std::string synth_out = "blood.csv";
  std::uint64_t synth_seed = hemo::SynthConfig{}.seed;
  synth->add_option("--out", synth_out, "output CSV path");
  synth->add_option("--seed", synth_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_config);
    if (stats->parsed()) {
      return stats_command(stats_data, stats_label, stats_out, stats_top_k);
    }
    if (train->parsed()) {
      return train_command(train_model, train_data, train_label, train_seed,
                           train_out, train_config);
    }
    if (report->parsed()) {
      return report_command(report_in, report_format, report_out);
    }
    if (synth->parsed()) {
      hemo::SynthConfig config;
      config.seed = synth_seed;
      hemo::write_synthetic_blood_csv(config, synth_out);
      std::cout << "wrote " << synth_out << "\n";
      return 0;
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
