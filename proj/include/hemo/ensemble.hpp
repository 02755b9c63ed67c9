#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemo/dataset.hpp"
#include "hemo/forest.hpp"
#include "hemo/knn.hpp"
#include "hemo/mlp.hpp"

namespace hemo {

/// Hard-voting combination of exactly three members: with three binary
/// voters the majority is always strict.
struct EnsembleModel {
  MlpModel mlp;
  KnnModel knn;
  ForestModel forest;
};

struct EnsembleConfig {
  MlpConfig mlp;
  int knn_k = 5;
  ForestConfig forest;
};

int majority_vote(int a, int b, int c);

/// Trains all three members on the identical training slice; member seeds
/// derive from the master seed. Throws if the slice holds a single class.
EnsembleModel ensemble_train(const Dataset& dataset,
                             const std::vector<std::size_t>& train_indices,
                             const EnsembleConfig& config, std::uint64_t seed);

int ensemble_predict(const EnsembleModel& model, const Vector& x);
Eigen::VectorXi ensemble_predict_batch(const EnsembleModel& model,
                                       const Eigen::Ref<const Matrix>& x);

std::string ensemble_to_json(const EnsembleModel& model,
                             const EnsembleConfig& config, std::uint64_t seed);
EnsembleModel ensemble_from_json(const std::string& json_text);

}  // namespace hemo
