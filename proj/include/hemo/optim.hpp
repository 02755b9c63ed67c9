#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace hemo {

/// Adam over a flat parameter vector. Classic defaults: beta1 0.9,
/// beta2 0.999, eps 1e-8.
class Adam {
 public:
  Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate),
        beta1_(beta1),
        beta2_(beta2),
        eps_(epsilon),
        m_(Eigen::VectorXd::Zero(size)),
        v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::Ref<Eigen::VectorXd> params,
            const Eigen::Ref<const Eigen::VectorXd>& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_.array() + (1.0 - beta2_) * grad.array().square();
    const double bias1 = 1.0 - std::pow(beta1_, t_);
    const double bias2 = 1.0 - std::pow(beta2_, t_);
    params.array() -= lr_ * (m_.array() / bias1) /
                      ((v_.array() / bias2).sqrt() + eps_);
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

/// Classical momentum SGD: v <- mu v - lr g; p <- p + v.
class MomentumSgd {
 public:
  MomentumSgd(Eigen::Index size, double learning_rate, double momentum)
      : lr_(learning_rate),
        momentum_(momentum),
        velocity_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::Ref<Eigen::VectorXd> params,
            const Eigen::Ref<const Eigen::VectorXd>& grad) {
    velocity_ = momentum_ * velocity_ - lr_ * grad;
    params += velocity_;
  }

 private:
  double lr_, momentum_;
  Eigen::VectorXd velocity_;
};

inline double leaky_relu(double x, double slope) {
  return x >= 0.0 ? x : slope * x;
}

inline double leaky_relu_grad(double x, double slope) {
  return x >= 0.0 ? 1.0 : slope;
}

/// Row-wise softmax of a logits matrix, numerically shifted by the row max.
inline Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd shifted =
      logits.colwise() - logits.rowwise().maxCoeff();
  Eigen::MatrixXd expd = shifted.array().exp();
  return expd.array().colwise() / expd.rowwise().sum().array();
}

/// -sum_i y_i log yhat_i for one-hot targets given as class indices,
/// averaged over rows.
inline double cross_entropy(const Eigen::MatrixXd& probabilities,
                            const Eigen::VectorXi& classes) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    const double p = std::max(probabilities(i, classes[i]), 1e-300);
    loss -= std::log(p);
  }
  return loss / static_cast<double>(probabilities.rows());
}

}  // namespace hemo
