#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hemo/csv.hpp"

namespace hemo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-feature min/max recorded at normalization time.
struct NormStats {
  double min = 0.0;
  double max = 1.0;
};

/// Cleaned, median-imputed, min-max normalized feature matrix with binary
/// labels. Immutable after construction; safe to share across threads.
struct Dataset {
  Matrix features;                     // n_samples x n_features, each in [0,1]
  Eigen::VectorXi labels;              // entries in {0,1}
  std::vector<std::string> feature_names;
  std::vector<NormStats> norm_stats;   // one per feature

  Eigen::Index n_samples() const { return features.rows(); }
  Eigen::Index n_features() const { return features.cols(); }

  /// Row slice by sample indices.
  Matrix rows(const std::vector<std::size_t>& indices) const;
  Eigen::VectorXi labels_at(const std::vector<std::size_t>& indices) const;
};

/// Deterministic k-way partition of {0..n-1}.
struct FoldPlan {
  int k = 5;
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;

  /// All indices not in fold `test_fold`, ascending.
  std::vector<std::size_t> train_indices(std::size_t test_fold) const;
  const std::vector<std::size_t>& test_indices(std::size_t test_fold) const {
    return folds.at(test_fold);
  }
};

/// Median-imputes missing cells per feature, then maps each feature through
/// x -> (x - min) / (max - min). Throws on fewer than 2 rows, an all-missing
/// column, or a constant column (max == min).
Dataset impute_and_normalize(const RawTable& table);

/// Seeded shuffle of {0..n-1} dealt round-robin into k folds. Same
/// (n_samples, k, seed) always produces an identical plan.
/// Throws if k > n_samples or k < 2.
FoldPlan make_folds(std::size_t n_samples, int k, std::uint64_t seed);

/// Re-applies recorded stats to raw-scale features (x - min) / (max - min).
Matrix apply_norm_stats(const Matrix& raw, const std::vector<NormStats>& stats);
/// Inverts normalization: x * (max - min) + min.
Matrix invert_norm_stats(const Matrix& normalized,
                         const std::vector<NormStats>& stats);

/// JSON serialization for reproducibility audits. Serialization is
/// deterministic: equal values produce byte-identical strings.
std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& json_text);
std::string fold_plan_to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const std::string& json_text);

}  // namespace hemo
