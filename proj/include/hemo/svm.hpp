#pragma once

#include <cstdint>
#include <string>

#include "hemo/dataset.hpp"

namespace hemo {

enum class SvmKernel { kLinear, kRbf, kSigmoid };

struct SvmConfig {
  SvmKernel kernel = SvmKernel::kRbf;
  double c = 1.0;
  double gamma = 0.0;  // 0 means 1 / n_features
  double coef0 = 0.0;
  double kkt_tolerance = 1e-3;
  int max_passes = 10000;
};

/// Soft-margin SVM in dual form. Internally labels live in {-1,+1};
/// the public interface speaks {0,1}.
struct SvmModel {
  SvmKernel kernel = SvmKernel::kRbf;
  double gamma = 0.1;
  double coef0 = 0.0;
  double c = 1.0;
  Matrix support_vectors;
  Vector dual_coeffs;  // alpha_i * y_i for each support vector
  double bias = 0.0;
  bool converged = true;
};

struct SvmTrainResult {
  SvmModel model;
  Vector alphas;       // one per training point, including zeros
  bool converged = true;
  int passes = 0;
};

double kernel_value(SvmKernel kernel, double gamma, double coef0,
                    const Vector& u, const Vector& v);

/// SMO-style dual optimization. Converges when a full sweep finds every KKT
/// violation below the tolerance; a non-positive-definite kernel (sigmoid)
/// may exhaust max_passes, in which case the iterate with the fewest KKT
/// violations seen is returned with converged = false.
/// Throws if only one class is present.
SvmTrainResult svm_train(const Eigen::Ref<const Matrix>& features,
                         const Eigen::VectorXi& labels, const SvmConfig& config,
                         std::uint64_t seed);

/// Decision value sum_i alpha_i y_i k(sv_i, x) + b.
double svm_decision(const SvmModel& model, const Vector& x);

/// 1 when the decision value is >= 0, else 0.
int svm_predict(const SvmModel& model, const Vector& x);
Eigen::VectorXi svm_predict_batch(const SvmModel& model,
                                  const Eigen::Ref<const Matrix>& x);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij for a
/// full training set; used by the optimality checks.
double svm_dual_objective(const Eigen::Ref<const Matrix>& features,
                          const Eigen::VectorXi& labels, const Vector& alphas,
                          const SvmConfig& config);

std::string svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const std::string& json_text);

SvmKernel svm_kernel_from_name(const std::string& name);
std::string svm_kernel_name(SvmKernel kernel);

}  // namespace hemo
