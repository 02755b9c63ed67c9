#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hemo/dataset.hpp"

namespace hemo {

/// Binary CART node in flat storage; feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<long long, 2> counts = {0, 0};  // class counts at a leaf
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::uint64_t bootstrap_seed = 0;
};

struct ForestConfig {
  int n_trees = 100;
  /// Features drawn per node; 0 means floor(sqrt(n_features)).
  int features_per_split = 0;
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestConfig config;
};

/// Grows each tree on a bootstrap resample (n draws with replacement) with
/// Gini-impurity best splits over a random feature subset per node, until
/// nodes are pure, hold fewer than 2 samples, or admit no impurity-reducing
/// split. Per-tree seeds derive deterministically from `seed`.
ForestModel forest_train(const Eigen::Ref<const Matrix>& features,
                         const Eigen::VectorXi& labels,
                         const ForestConfig& config, std::uint64_t seed);

/// Leaf majority within a tree (tie toward 1).
int tree_predict(const Tree& tree, const Vector& x);

/// Majority vote over trees, tie toward label 1.
int forest_predict(const ForestModel& model, const Vector& x);
Eigen::VectorXi forest_predict_batch(const ForestModel& model,
                                     const Eigen::Ref<const Matrix>& x);

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& json_text);

}  // namespace hemo
