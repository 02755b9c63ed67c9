#include "hemo/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "hemo/rng.hpp"

namespace hemo {

namespace {

double gini(long long n0, long long n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0.0) return 0.0;
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::Ref<const Matrix>& features,
              const Eigen::VectorXi& labels, int features_per_split,
              std::uint64_t seed)
      : features_(features),
        labels_(labels),
        features_per_split_(features_per_split),
        rng_(seed) {}

  Tree build(std::vector<Eigen::Index> sample) {
    Tree tree;
    tree.bootstrap_seed = 0;
    grow(tree, std::move(sample));
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<Eigen::Index> sample) {
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    long long n0 = 0, n1 = 0;
    for (const Eigen::Index i : sample) (labels_[i] ? n1 : n0)++;

    const bool pure = n0 == 0 || n1 == 0;
    if (pure || sample.size() < 2) {
      tree.nodes[node_index].counts = {n0, n1};
      return node_index;
    }

    const SplitCandidate split = best_split(sample, gini(n0, n1));
    if (!split.found) {
      tree.nodes[node_index].counts = {n0, n1};
      return node_index;
    }

    std::vector<Eigen::Index> left, right;
    for (const Eigen::Index i : sample) {
      (features_(i, split.feature) <= split.threshold ? left : right)
          .push_back(i);
    }
    sample.clear();
    sample.shrink_to_fit();

    tree.nodes[node_index].feature = split.feature;
    tree.nodes[node_index].threshold = split.threshold;
    const int left_index = grow(tree, std::move(left));
    tree.nodes[node_index].left = left_index;
    const int right_index = grow(tree, std::move(right));
    tree.nodes[node_index].right = right_index;
    return node_index;
  }

  std::vector<int> draw_features() {
    const int d = static_cast<int>(features_.cols());
    const int m = std::min(features_per_split_, d);
    std::vector<int> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), 0);
    // Partial Fisher-Yates: the first m entries are the draw.
    for (int i = 0; i < m; ++i) {
      const int j = i + static_cast<int>(rng_.bounded(
                            static_cast<std::uint64_t>(d - i)));
      std::swap(all[static_cast<std::size_t>(i)],
                all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(m));
    return all;
  }

  SplitCandidate best_split(const std::vector<Eigen::Index>& sample,
                            double parent_impurity) {
    SplitCandidate best;
    best.impurity = parent_impurity;

    std::vector<std::pair<double, int>> column(sample.size());
    for (const int feature : draw_features()) {
      for (std::size_t i = 0; i < sample.size(); ++i) {
        column[i] = {features_(sample[i], feature), labels_[sample[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      long long left0 = 0, left1 = 0;
      long long right0 = 0, right1 = 0;
      for (const auto& [value, label] : column) (label ? right1 : right0)++;
      const double total = static_cast<double>(sample.size());

      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        (column[i].second ? left1 : left0)++;
        (column[i].second ? right1 : right0)--;
        if (column[i].first == column[i + 1].first) continue;

        const double n_left = static_cast<double>(i + 1);
        const double n_right = total - n_left;
        const double weighted =
            (n_left * gini(left0, left1) + n_right * gini(right0, right1)) /
            total;
        if (weighted < best.impurity) {
          best.found = true;
          best.feature = feature;
          best.threshold = 0.5 * (column[i].first + column[i + 1].first);
          best.impurity = weighted;
        }
      }
    }
    return best;
  }

  const Eigen::Ref<const Matrix>& features_;
  const Eigen::VectorXi& labels_;
  int features_per_split_;
  Rng rng_;
};

}  // namespace

ForestModel forest_train(const Eigen::Ref<const Matrix>& features,
                         const Eigen::VectorXi& labels,
                         const ForestConfig& config, std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  if (n == 0) throw std::runtime_error("forest_train: empty training set");
  if (features.rows() != labels.size()) {
    throw std::runtime_error("forest_train: feature/label length mismatch");
  }
  if (config.n_trees < 1) throw std::runtime_error("forest_train: n_trees < 1");

  int per_split = config.features_per_split;
  if (per_split <= 0) {
    per_split = std::max(
        1, static_cast<int>(std::sqrt(static_cast<double>(features.cols()))));
  }

  ForestModel model;
  model.config = config;
  model.config.features_per_split = per_split;
  model.trees.reserve(static_cast<std::size_t>(config.n_trees));

  for (int t = 0; t < config.n_trees; ++t) {
    const std::uint64_t tree_seed =
        derive_seed(seed, "forest-tree", static_cast<std::uint64_t>(t));
    Rng bootstrap_rng(tree_seed);

    std::vector<Eigen::Index> sample(static_cast<std::size_t>(n));
    if (config.bootstrap) {
      for (auto& s : sample) {
        s = static_cast<Eigen::Index>(
            bootstrap_rng.bounded(static_cast<std::uint64_t>(n)));
      }
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }

    TreeBuilder builder(features, labels, per_split,
                        derive_seed(tree_seed, "tree-splits"));
    Tree tree = builder.build(std::move(sample));
    tree.bootstrap_seed = tree_seed;
    model.trees.push_back(std::move(tree));
  }
  return model;
}

int tree_predict(const Tree& tree, const Vector& x) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  const auto& counts = tree.nodes[static_cast<std::size_t>(node)].counts;
  return counts[1] >= counts[0] ? 1 : 0;
}

int forest_predict(const ForestModel& model, const Vector& x) {
  if (x.size() == 0 || model.trees.empty()) {
    throw std::runtime_error("forest_predict: model not trained");
  }
  long long votes_one = 0;
  for (const auto& tree : model.trees) votes_one += tree_predict(tree, x);
  const long long total = static_cast<long long>(model.trees.size());
  return 2 * votes_one >= total ? 1 : 0;
}

Eigen::VectorXi forest_predict_batch(const ForestModel& model,
                                     const Eigen::Ref<const Matrix>& x) {
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = forest_predict(model, x.row(i).transpose());
  }
  return out;
}

std::string forest_to_json(const ForestModel& model) {
  nlohmann::json j;
  j["type"] = "forest";
  j["config"] = {{"n_trees", model.config.n_trees},
                 {"features_per_split", model.config.features_per_split},
                 {"bootstrap", model.config.bootstrap}};
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"counts", n.counts}});
    }
    trees.push_back({{"bootstrap_seed", tree.bootstrap_seed},
                     {"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump(2);
}

ForestModel forest_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ForestModel model;
  model.config.n_trees = j.at("config").at("n_trees").get<int>();
  model.config.features_per_split =
      j.at("config").at("features_per_split").get<int>();
  model.config.bootstrap = j.at("config").at("bootstrap").get<bool>();
  for (const auto& tj : j.at("trees")) {
    Tree tree;
    tree.bootstrap_seed = tj.at("bootstrap_seed").get<std::uint64_t>();
    for (const auto& nj : tj.at("nodes")) {
      TreeNode node;
      node.feature = nj.at("feature").get<int>();
      node.threshold = nj.at("threshold").get<double>();
      node.left = nj.at("left").get<int>();
      node.right = nj.at("right").get<int>();
      node.counts = nj.at("counts").get<std::array<long long, 2>>();
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace hemo
