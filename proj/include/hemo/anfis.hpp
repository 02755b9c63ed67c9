#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemo/dataset.hpp"

namespace hemo {

/// Takagi-Sugeno neuro-fuzzy classifier with R scatter-partition rules:
/// each rule owns one Gaussian-type membership function per input plus a
/// linear (first-order) consequent.
struct AnfisModel {
  // Premise parameters, one triple (a, b, c) per (rule, input).
  Matrix widths;   // a > 0
  Matrix shapes;   // b > 0, exponent of the squared displacement
  Matrix centers;  // c, MF center
  // Consequent parameters, one linear map per rule.
  Matrix coeffs;   // R x n_inputs
  Vector biases;   // R

  Eigen::Index n_rules() const { return centers.rows(); }
  Eigen::Index n_inputs() const { return centers.cols(); }
};

struct AnfisTrainConfig {
  double learning_rate = 0.001;
  int epochs = 4000;
  int n_rules = 14;
  // Adam moment parameters.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Parameter-by-parameter gradients of the training loss, same shapes as the
/// model fields. Exposed so the finite-difference suite can check them.
struct AnfisGradients {
  Matrix widths;
  Matrix shapes;
  Matrix centers;
  Matrix coeffs;
  Vector biases;
};

/// Gaussian-type membership exp(-((x-c)/a)^(2b)). Requires a > 0, b > 0.
double membership(double x, double a, double b, double c);

/// Layer 2: w_r = prod_i membership(x_i; rule r). Each w_r in (0,1].
Vector firing_strengths(const AnfisModel& model, const Vector& x);

/// Layer 3: w_r / sum_k w_k. Throws if the strengths sum to zero.
Vector normalize_strengths(const Vector& w);

/// Layers 1-5 composed: sum_r normalized_r * (coeffs_r . x + bias_r).
double anfis_forward(const AnfisModel& model, const Vector& x);

/// anfis_forward over every row of X.
Vector anfis_forward_batch(const AnfisModel& model,
                           const Eigen::Ref<const Matrix>& X);

/// Mean squared error between anfis_forward(x) and the {0,1} target.
/// When `grads` is non-null it receives the analytic gradients.
double anfis_mse_loss(const AnfisModel& model, const Eigen::Ref<const Matrix>& X,
                      const Eigen::Ref<const Vector>& targets,
                      AnfisGradients* grads = nullptr);

/// Full-batch Adam on the MSE loss. Premise widths are clamped to >= 1e-3
/// and shape exponents to [0.5, 5] after every step. Centers start at
/// sampled training points, widths at the per-feature standard deviation,
/// shapes at 1, consequents at 0. Throws on an empty training slice.
AnfisModel anfis_train(const Dataset& dataset,
                       const std::vector<std::size_t>& train_indices,
                       const AnfisTrainConfig& config, std::uint64_t seed);

/// 1 when anfis_forward(x) >= 0.5, else 0.
int anfis_predict(const AnfisModel& model, const Vector& x);
Eigen::VectorXi anfis_predict_batch(const AnfisModel& model,
                                    const Eigen::Ref<const Matrix>& X);

std::string anfis_to_json(const AnfisModel& model, const AnfisTrainConfig& config,
                          std::uint64_t seed);
AnfisModel anfis_from_json(const std::string& json_text,
                           AnfisTrainConfig* config = nullptr,
                           std::uint64_t* seed = nullptr);

}  // namespace hemo
