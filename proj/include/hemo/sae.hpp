#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemo/dataset.hpp"

namespace hemo {

/// One autoencoder: leaky-ReLU encoder, linear reconstruction decoder.
struct AutoencoderLayer {
  Matrix enc_weights;  // hidden_dim x input_dim
  Vector enc_bias;     // hidden_dim
  Matrix dec_weights;  // input_dim x hidden_dim
  Vector dec_bias;     // input_dim
  double slope = 0.01;

  Eigen::Index input_dim() const { return enc_weights.cols(); }
  Eigen::Index hidden_dim() const { return enc_weights.rows(); }
};

/// Encoder stage retained for the stacked classifier once the decoder half
/// is dropped.
struct EncoderStage {
  Matrix weights;  // out x in
  Vector bias;
  double slope = 0.01;
};

/// Encoders of the three pretrained autoencoders chained 10->20->15->8,
/// topped by an affine 8->2 map with softmax.
struct StackedAutoencoder {
  std::vector<EncoderStage> encoders;
  Matrix head_weights;  // 2 x last hidden dim
  Vector head_bias;     // 2
};

struct SaeTrainConfig {
  std::vector<int> hidden_dims = {20, 15, 8};
  double learning_rate = 0.008;   // pretraining, momentum SGD
  double momentum = 0.9;
  double l2_lambda = 0.001;
  int epochs = 250;
  int batch_size = 128;
  double fine_tune_learning_rate = 0.001;  // Adam
  int fine_tune_epochs = 250;
  int fine_tune_batch_size = 128;
};

struct AutoencoderGradients {
  Matrix enc_weights;
  Vector enc_bias;
  Matrix dec_weights;
  Vector dec_bias;
};

struct SaeGradients {
  std::vector<Matrix> encoder_weights;
  std::vector<Vector> encoder_biases;
  Matrix head_weights;
  Vector head_bias;
};

Matrix encode(const AutoencoderLayer& layer, const Eigen::Ref<const Matrix>& x);
Matrix decode(const AutoencoderLayer& layer, const Eigen::Ref<const Matrix>& h);

/// (1/M) sum_d 0.5 ||x - decode(encode(x))||^2 + (lambda/2) sum weights^2.
/// Biases are excluded from the penalty. `grads`, when given, receives the
/// analytic gradient of this exact expression.
double ae_loss(const AutoencoderLayer& layer, const Eigen::Ref<const Matrix>& batch,
               double l2_lambda, AutoencoderGradients* grads = nullptr);

/// Momentum SGD over shuffled mini-batches. Weights start uniform in
/// +-1/sqrt(fan_in); biases start at zero. Deterministic for a given seed.
AutoencoderLayer pretrain_layer(Eigen::Index input_dim, Eigen::Index hidden_dim,
                                const Eigen::Ref<const Matrix>& inputs,
                                const SaeTrainConfig& config, std::uint64_t seed);

/// Class probabilities (rows sum to 1) of the stacked network.
Matrix sae_probabilities(const StackedAutoencoder& sae,
                         const Eigen::Ref<const Matrix>& x);

/// Mean cross-entropy -sum_i y_i log yhat_i over the batch (y one-hot from
/// the integer labels). `grads`, when given, receives analytic gradients.
double sae_cross_entropy(const StackedAutoencoder& sae,
                         const Eigen::Ref<const Matrix>& x,
                         const Eigen::VectorXi& labels,
                         SaeGradients* grads = nullptr);

/// Greedy pipeline: AE1 on the inputs, AE2 on AE1 encodings, AE3 on AE2
/// encodings; decoders dropped; softmax head attached; whole network
/// fine-tuned with Adam on cross-entropy.
StackedAutoencoder stack_and_finetune(const Dataset& dataset,
                                      const std::vector<std::size_t>& train_indices,
                                      const SaeTrainConfig& config,
                                      std::uint64_t seed);

/// Argmax of the softmax pair; an exact tie reads as label 1.
int sae_predict(const StackedAutoencoder& sae, const Vector& x);
Eigen::VectorXi sae_predict_batch(const StackedAutoencoder& sae,
                                  const Eigen::Ref<const Matrix>& x);

std::string sae_to_json(const StackedAutoencoder& sae, const SaeTrainConfig& config,
                        std::uint64_t seed);
StackedAutoencoder sae_from_json(const std::string& json_text);

}  // namespace hemo
