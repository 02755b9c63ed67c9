#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemo/dataset.hpp"

namespace hemo {

/// Feed-forward softmax classifier, ReLU hidden layers.
struct MlpModel {
  std::vector<Matrix> weights;  // per layer, out_dim x in_dim
  std::vector<Vector> biases;
};

struct MlpConfig {
  std::vector<int> hidden_dims = {16, 8};
  double learning_rate = 0.001;  // Adam
  int epochs = 200;
  int batch_size = 32;
};

struct MlpGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Class probabilities, rows summing to 1.
Matrix mlp_probabilities(const MlpModel& model, const Eigen::Ref<const Matrix>& x);

/// Mean cross-entropy over the batch; analytic gradients on request.
double mlp_cross_entropy(const MlpModel& model, const Eigen::Ref<const Matrix>& x,
                         const Eigen::VectorXi& labels,
                         MlpGradients* grads = nullptr);

/// Adam on cross-entropy over shuffled mini-batches; weights start uniform
/// in +-1/sqrt(fan_in), biases at zero. Deterministic for a given seed.
MlpModel mlp_train(const Eigen::Ref<const Matrix>& features,
                   const Eigen::VectorXi& labels, const MlpConfig& config,
                   std::uint64_t seed);

/// Argmax class; an exact probability tie reads as label 1.
int mlp_predict(const MlpModel& model, const Vector& x);
Eigen::VectorXi mlp_predict_batch(const MlpModel& model,
                                  const Eigen::Ref<const Matrix>& x);

std::string mlp_to_json(const MlpModel& model, const MlpConfig& config,
                        std::uint64_t seed);
MlpModel mlp_from_json(const std::string& json_text);

}  // namespace hemo
