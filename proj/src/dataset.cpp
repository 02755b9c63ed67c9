#include "hemo/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "hemo/rng.hpp"

namespace hemo {

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

Matrix Dataset::rows(const std::vector<std::size_t>& indices) const {
  Matrix out(static_cast<Eigen::Index>(indices.size()), features.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(indices[i]));
  }
  return out;
}

Eigen::VectorXi Dataset::labels_at(const std::vector<std::size_t>& indices) const {
  Eigen::VectorXi out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        labels[static_cast<Eigen::Index>(indices[i])];
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t test_fold) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f == test_fold) continue;
    out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dataset impute_and_normalize(const RawTable& table) {
  const std::size_t n = table.n_rows();
  if (n < 2) {
    throw std::runtime_error("impute_and_normalize: need at least 2 rows, got " +
                             std::to_string(n));
  }
  const std::size_t label_idx = table.label_index();

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < table.n_columns(); ++c) {
    if (c != label_idx) feature_cols.push_back(c);
  }
  const std::size_t d = feature_cols.size();

  Dataset dataset;
  dataset.features.resize(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(d));
  dataset.labels.resize(static_cast<Eigen::Index>(n));
  dataset.norm_stats.resize(d);

  for (std::size_t i = 0; i < n; ++i) {
    dataset.labels[static_cast<Eigen::Index>(i)] =
        static_cast<int>(*table.rows[i][label_idx]);
  }

  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t col = feature_cols[j];
    dataset.feature_names.push_back(table.column_names[col]);

    std::vector<double> present;
    present.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (table.rows[i][col]) present.push_back(*table.rows[i][col]);
    }
    if (present.empty()) {
      throw std::runtime_error("impute_and_normalize: column '" +
                               table.column_names[col] + "' is all-missing");
    }
    const double fill = median_of(present);

    double lo = present[0], hi = present[0];
    for (const double v : present) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) {
      throw std::runtime_error("impute_and_normalize: column '" +
                               table.column_names[col] +
                               "' is constant (max == min)");
    }
    dataset.norm_stats[j] = {lo, hi};

    const double scale = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < n; ++i) {
      const double raw = table.rows[i][col] ? *table.rows[i][col] : fill;
      dataset.features(static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j)) = (raw - lo) * scale;
    }
  }
  return dataset;
}

FoldPlan make_folds(std::size_t n_samples, int k, std::uint64_t seed) {
  if (k < 2) throw std::runtime_error("make_folds: k must be at least 2");
  if (static_cast<std::size_t>(k) > n_samples) {
    throw std::runtime_error("make_folds: k = " + std::to_string(k) +
                             " exceeds n_samples = " + std::to_string(n_samples));
  }

  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "fold-plan"));
  rng.shuffle(order);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(static_cast<std::size_t>(k), {});
  for (std::size_t i = 0; i < n_samples; ++i) {
    plan.folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
  }
  return plan;
}

Matrix apply_norm_stats(const Matrix& raw, const std::vector<NormStats>& stats) {
  if (static_cast<std::size_t>(raw.cols()) != stats.size()) {
    throw std::runtime_error("apply_norm_stats: column count mismatch");
  }
  Matrix out = raw;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const auto& s = stats[static_cast<std::size_t>(j)];
    out.col(j) = (out.col(j).array() - s.min) / (s.max - s.min);
  }
  return out;
}

Matrix invert_norm_stats(const Matrix& normalized,
                         const std::vector<NormStats>& stats) {
  if (static_cast<std::size_t>(normalized.cols()) != stats.size()) {
    throw std::runtime_error("invert_norm_stats: column count mismatch");
  }
  Matrix out = normalized;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const auto& s = stats[static_cast<std::size_t>(j)];
    out.col(j) = out.col(j).array() * (s.max - s.min) + s.min;
  }
  return out;
}

std::string dataset_to_json(const Dataset& dataset) {
  nlohmann::json j;
  j["feature_names"] = dataset.feature_names;
  j["labels"] = std::vector<int>(dataset.labels.data(),
                                 dataset.labels.data() + dataset.labels.size());
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& s : dataset.norm_stats) {
    stats.push_back({{"min", s.min}, {"max", s.max}});
  }
  j["norm_stats"] = stats;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < dataset.features.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < dataset.features.cols(); ++c) {
      row.push_back(dataset.features(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["features"] = std::move(rows);
  return j.dump(2);
}

Dataset dataset_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  Dataset dataset;
  dataset.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  const auto labels = j.at("labels").get<std::vector<int>>();
  dataset.labels.resize(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    dataset.labels[static_cast<Eigen::Index>(i)] = labels[i];
  }
  for (const auto& s : j.at("norm_stats")) {
    dataset.norm_stats.push_back({s.at("min").get<double>(),
                                  s.at("max").get<double>()});
  }
  const auto& rows = j.at("features");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(dataset.feature_names.size());
  dataset.features.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < d; ++c) {
      dataset.features(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return dataset;
}

std::string fold_plan_to_json(const FoldPlan& plan) {
  nlohmann::json j;
  j["k"] = plan.k;
  j["seed"] = plan.seed;
  j["folds"] = plan.folds;
  return j.dump(2);
}

FoldPlan fold_plan_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  FoldPlan plan;
  plan.k = j.at("k").get<int>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.folds = j.at("folds").get<std::vector<std::vector<std::size_t>>>();
  return plan;
}

}  // namespace hemo
