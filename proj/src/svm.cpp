#include "hemo/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "hemo/rng.hpp"

namespace hemo {

namespace {

double effective_gamma(double gamma, Eigen::Index n_features) {
  return gamma > 0.0 ? gamma : 1.0 / static_cast<double>(n_features);
}

Matrix kernel_matrix(SvmKernel kernel, double gamma, double coef0,
                     const Eigen::Ref<const Matrix>& x) {
  const Eigen::Index n = x.rows();
  Matrix k(n, n);
  switch (kernel) {
    case SvmKernel::kLinear:
      k = x * x.transpose();
      break;
    case SvmKernel::kRbf: {
      const Vector sq = x.rowwise().squaredNorm();
      k = -2.0 * (x * x.transpose());
      k.colwise() += sq;
      k.rowwise() += sq.transpose();
      k = (-gamma * k.array()).exp();
      break;
    }
    case SvmKernel::kSigmoid:
      k = ((gamma * (x * x.transpose()).array()) + coef0).tanh();
      break;
  }
  return k;
}

// Platt-style SMO over a precomputed kernel matrix.
class SmoSolver {
 public:
  SmoSolver(const Matrix& k, const Vector& y, double c, double tol,
            std::uint64_t seed)
      : k_(k),
        y_(y),
        c_(c),
        tol_(tol),
        n_(y.size()),
        alpha_(Vector::Zero(y.size())),
        errors_(-y),
        rng_(seed) {}

  // Returns true on convergence within max_passes.
  bool solve(int max_passes, int* passes_used) {
    best_alpha_ = alpha_;
    best_bias_ = bias_;
    best_violations_ = count_violations();

    int passes = 0;
    bool examine_all = true;
    while (passes < max_passes) {
      ++passes;
      int changed = 0;
      for (Eigen::Index i = 0; i < n_; ++i) {
        if (!examine_all && !is_non_bound(i)) continue;
        changed += examine(i);
      }
      if (passes % 50 == 0) refresh_errors();

      int violations = count_violations();
      if (violations == 0) {
        // The cheap count reads the incremental error cache; confirm against
        // exactly recomputed decisions before declaring convergence.
        refresh_errors();
        violations = count_violations();
      }
      if (violations < best_violations_) {
        best_violations_ = violations;
        best_alpha_ = alpha_;
        best_bias_ = bias_;
      }
      if (violations == 0) {
        if (passes_used) *passes_used = passes;
        return true;
      }
      if (examine_all) {
        examine_all = changed == 0;  // nothing moved: keep scanning everything
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    if (passes_used) *passes_used = max_passes;
    return false;
  }

  const Vector& alphas() const { return best_alpha_; }
  double bias() const { return best_bias_; }

 private:
  bool is_non_bound(Eigen::Index i) const {
    return alpha_[i] > 0.0 && alpha_[i] < c_;
  }

  double decision(Eigen::Index i) const {
    return (alpha_.array() * y_.array() * k_.col(i).array()).sum() + bias_;
  }

  void refresh_errors() {
    for (Eigen::Index i = 0; i < n_; ++i) errors_[i] = decision(i) - y_[i];
  }

  // Uses the incremental error cache: y f(x_i) = y_i E_i + 1.
  int count_violations() const {
    int violations = 0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double margin = y_[i] * errors_[i] + 1.0;
      if (alpha_[i] < c_ - 1e-12 && margin < 1.0 - tol_) ++violations;
      else if (alpha_[i] > 1e-12 && margin > 1.0 + tol_) ++violations;
    }
    return violations;
  }

  int examine(Eigen::Index i2) {
    const double y2 = y_[i2];
    const double alpha2 = alpha_[i2];
    const double e2 = errors_[i2];
    const double r2 = e2 * y2;

    const bool violates = (r2 < -tol_ && alpha2 < c_) ||
                          (r2 > tol_ && alpha2 > 0.0);
    if (!violates) return 0;

    // Heuristic 1: partner with the largest |E1 - E2| among non-bound points.
    Eigen::Index best = -1;
    double best_gap = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (!is_non_bound(i)) continue;
      const double gap = std::abs(errors_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    // Heuristic 2: any non-bound point, then any point, random start.
    const Eigen::Index start =
        static_cast<Eigen::Index>(rng_.bounded(static_cast<std::uint64_t>(n_)));
    for (Eigen::Index offset = 0; offset < n_; ++offset) {
      const Eigen::Index i = (start + offset) % n_;
      if (is_non_bound(i) && take_step(i, i2)) return 1;
    }
    for (Eigen::Index offset = 0; offset < n_; ++offset) {
      const Eigen::Index i = (start + offset) % n_;
      if (take_step(i, i2)) return 1;
    }
    return 0;
  }

  bool take_step(Eigen::Index i1, Eigen::Index i2) {
    if (i1 == i2) return false;

    const double alpha1 = alpha_[i1];
    const double alpha2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = errors_[i1];
    const double e2 = errors_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0.0) {
      lo = std::max(0.0, alpha2 - alpha1);
      hi = std::min(c_, c_ + alpha2 - alpha1);
    } else {
      lo = std::max(0.0, alpha1 + alpha2 - c_);
      hi = std::min(c_, alpha1 + alpha2);
    }
    if (lo >= hi) return false;

    const double k11 = k_(i1, i1);
    const double k12 = k_(i1, i2);
    const double k22 = k_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = alpha2 + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, lo, hi);
    } else {
      // Indefinite kernel: the objective is evaluated at both clip bounds.
      const double f1 = y1 * e1 - alpha1 * k11 - s * alpha2 * k12;
      const double f2 = y2 * e2 - alpha2 * k22 - s * alpha1 * k12;
      const double l1 = alpha1 + s * (alpha2 - lo);
      const double h1 = alpha1 + s * (alpha2 - hi);
      const double lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                          0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                          0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (lobj < hobj - 1e-12) a2 = lo;
      else if (lobj > hobj + 1e-12) a2 = hi;
      else a2 = alpha2;
    }
    if (std::abs(a2 - alpha2) < 1e-12 * (a2 + alpha2 + 1e-12)) return false;

    const double a1 = alpha1 + s * (alpha2 - a2);
    const double delta1 = y1 * (a1 - alpha1);
    const double delta2 = y2 * (a2 - alpha2);

    const double b1 = bias_ - e1 - delta1 * k11 - delta2 * k12;
    const double b2 = bias_ - e2 - delta1 * k12 - delta2 * k22;
    double new_bias;
    if (a1 > 0.0 && a1 < c_) new_bias = b1;
    else if (a2 > 0.0 && a2 < c_) new_bias = b2;
    else new_bias = 0.5 * (b1 + b2);

    const double delta_bias = new_bias - bias_;
    errors_ += delta1 * k_.col(i1) + delta2 * k_.col(i2);
    errors_.array() += delta_bias;

    alpha_[i1] = a1;
    alpha_[i2] = a2;
    bias_ = new_bias;
    return true;
  }

  const Matrix& k_;
  const Vector& y_;
  double c_;
  double tol_;
  Eigen::Index n_;
  Vector alpha_;
  Vector errors_;
  double bias_ = 0.0;
  Rng rng_;

  Vector best_alpha_;
  double best_bias_ = 0.0;
  int best_violations_ = 0;
};

}  // namespace

double kernel_value(SvmKernel kernel, double gamma, double coef0,
                    const Vector& u, const Vector& v) {
  switch (kernel) {
    case SvmKernel::kLinear:
      return u.dot(v);
    case SvmKernel::kRbf:
      return std::exp(-gamma * (u - v).squaredNorm());
    case SvmKernel::kSigmoid:
      return std::tanh(gamma * u.dot(v) + coef0);
  }
  throw std::logic_error("kernel_value: unknown kernel");
}

SvmTrainResult svm_train(const Eigen::Ref<const Matrix>& features,
                         const Eigen::VectorXi& labels, const SvmConfig& config,
                         std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  if (n == 0) throw std::runtime_error("svm_train: empty training set");
  if (labels.size() != n) {
    throw std::runtime_error("svm_train: feature/label length mismatch");
  }

  Vector y(n);
  int positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = labels[i] == 1 ? 1.0 : -1.0;
    positives += labels[i];
  }
  if (positives == 0 || positives == n) {
    throw std::runtime_error("svm_train: training set contains a single class");
  }

  const double gamma = effective_gamma(config.gamma, features.cols());
  const Matrix k = kernel_matrix(config.kernel, gamma, config.coef0, features);

  SmoSolver solver(k, y, config.c, config.kkt_tolerance,
                   derive_seed(seed, "svm-smo"));
  int passes = 0;
  const bool converged = solver.solve(config.max_passes, &passes);

  SvmTrainResult result;
  result.alphas = solver.alphas();
  result.converged = converged;
  result.passes = passes;

  SvmModel& model = result.model;
  model.kernel = config.kernel;
  model.gamma = gamma;
  model.coef0 = config.coef0;
  model.c = config.c;
  model.bias = solver.bias();
  model.converged = converged;

  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (result.alphas[i] > 1e-12) support.push_back(i);
  }
  if (support.empty()) {
    // Degenerate but possible on non-converged indefinite kernels: keep the
    // point nearest the boundary so the model stays usable.
    support.push_back(0);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(support.size()),
                               features.cols());
  model.dual_coeffs.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    model.support_vectors.row(static_cast<Eigen::Index>(i)) =
        features.row(support[i]);
    model.dual_coeffs[static_cast<Eigen::Index>(i)] =
        result.alphas[support[i]] * y[support[i]];
  }
  return result;
}

double svm_decision(const SvmModel& model, const Vector& x) {
  if (x.size() != model.support_vectors.cols()) {
    throw std::invalid_argument("svm_decision: dimension mismatch");
  }
  double sum = model.bias;
  for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
    sum += model.dual_coeffs[i] *
           kernel_value(model.kernel, model.gamma, model.coef0,
                        model.support_vectors.row(i).transpose(), x);
  }
  return sum;
}

int svm_predict(const SvmModel& model, const Vector& x) {
  return svm_decision(model, x) >= 0.0 ? 1 : 0;
}

Eigen::VectorXi svm_predict_batch(const SvmModel& model,
                                  const Eigen::Ref<const Matrix>& x) {
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = svm_predict(model, x.row(i).transpose());
  }
  return out;
}

double svm_dual_objective(const Eigen::Ref<const Matrix>& features,
                          const Eigen::VectorXi& labels, const Vector& alphas,
                          const SvmConfig& config) {
  const Eigen::Index n = features.rows();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;
  const double gamma = effective_gamma(config.gamma, features.cols());
  const Matrix k = kernel_matrix(config.kernel, gamma, config.coef0, features);
  const Vector weighted = alphas.array() * y.array();
  return alphas.sum() - 0.5 * weighted.dot(k * weighted);
}

std::string svm_to_json(const SvmModel& model) {
  nlohmann::json j;
  j["type"] = "svm";
  j["kernel"] = svm_kernel_name(model.kernel);
  j["gamma"] = model.gamma;
  j["coef0"] = model.coef0;
  j["C"] = model.c;
  j["bias"] = model.bias;
  j["converged"] = model.converged;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < model.support_vectors.cols(); ++c) {
      row.push_back(model.support_vectors(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["support_vectors"] = std::move(rows);
  j["dual_coeffs"] =
      std::vector<double>(model.dual_coeffs.data(),
                          model.dual_coeffs.data() + model.dual_coeffs.size());
  return j.dump(2);
}

SvmModel svm_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  SvmModel model;
  model.kernel = svm_kernel_from_name(j.at("kernel").get<std::string>());
  model.gamma = j.at("gamma").get<double>();
  model.coef0 = j.at("coef0").get<double>();
  model.c = j.at("C").get<double>();
  model.bias = j.at("bias").get<double>();
  model.converged = j.at("converged").get<bool>();
  const auto& rows = j.at("support_vectors");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = n ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
  model.support_vectors.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      model.support_vectors(i, c) = rows.at(static_cast<std::size_t>(i))
                                        .at(static_cast<std::size_t>(c))
                                        .get<double>();
    }
  }
  const auto coeffs = j.at("dual_coeffs").get<std::vector<double>>();
  model.dual_coeffs = Eigen::Map<const Vector>(
      coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return model;
}

SvmKernel svm_kernel_from_name(const std::string& name) {
  if (name == "linear") return SvmKernel::kLinear;
  if (name == "rbf") return SvmKernel::kRbf;
  if (name == "sigmoid") return SvmKernel::kSigmoid;
  throw std::runtime_error("unknown SVM kernel '" + name + "'");
}

std::string svm_kernel_name(SvmKernel kernel) {
  switch (kernel) {
    case SvmKernel::kLinear: return "linear";
    case SvmKernel::kRbf: return "rbf";
    case SvmKernel::kSigmoid: return "sigmoid";
  }
  throw std::logic_error("svm_kernel_name: unknown kernel");
}

}  // namespace hemo
