#include "hemo/ensemble.hpp"

#include <stdexcept>

#include <json.hpp>

#include "hemo/rng.hpp"

namespace hemo {

int majority_vote(int a, int b, int c) { return a + b + c >= 2 ? 1 : 0; }

EnsembleModel ensemble_train(const Dataset& dataset,
                             const std::vector<std::size_t>& train_indices,
                             const EnsembleConfig& config, std::uint64_t seed) {
  if (train_indices.empty()) {
    throw std::runtime_error("ensemble_train: empty training set");
  }
  const Matrix x = dataset.rows(train_indices);
  const Eigen::VectorXi y = dataset.labels_at(train_indices);
  const int positives = y.sum();
  if (positives == 0 || positives == y.size()) {
    throw std::runtime_error("ensemble_train: training set contains a single class");
  }

  EnsembleModel model;
  model.mlp = mlp_train(x, y, config.mlp, derive_seed(seed, "ensemble-mlp"));
  model.knn = knn_fit(x, y, config.knn_k);
  model.forest =
      forest_train(x, y, config.forest, derive_seed(seed, "ensemble-forest"));
  return model;
}

int ensemble_predict(const EnsembleModel& model, const Vector& x) {
  return majority_vote(mlp_predict(model.mlp, x), knn_predict(model.knn, x),
                       forest_predict(model.forest, x));
}

Eigen::VectorXi ensemble_predict_batch(const EnsembleModel& model,
                                       const Eigen::Ref<const Matrix>& x) {
  const Eigen::VectorXi mlp_votes = mlp_predict_batch(model.mlp, x);
  const Eigen::VectorXi knn_votes = knn_predict_batch(model.knn, x);
  const Eigen::VectorXi forest_votes = forest_predict_batch(model.forest, x);
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = majority_vote(mlp_votes[i], knn_votes[i], forest_votes[i]);
  }
  return out;
}

std::string ensemble_to_json(const EnsembleModel& model,
                             const EnsembleConfig& config, std::uint64_t seed) {
  nlohmann::json j;
  j["type"] = "ensemble";
  j["mlp"] = nlohmann::json::parse(mlp_to_json(model.mlp, config.mlp, seed));
  j["knn"] = nlohmann::json::parse(knn_to_json(model.knn));
  j["forest"] = nlohmann::json::parse(forest_to_json(model.forest));
  j["seed"] = seed;
  return j.dump(2);
}

EnsembleModel ensemble_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  EnsembleModel model;
  model.mlp = mlp_from_json(j.at("mlp").dump());
  model.knn = knn_from_json(j.at("knn").dump());
  model.forest = forest_from_json(j.at("forest").dump());
  return model;
}

}  // namespace hemo
