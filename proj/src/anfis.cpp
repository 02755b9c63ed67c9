#include "hemo/anfis.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "hemo/optim.hpp"
#include "hemo/rng.hpp"

namespace hemo {

namespace {

constexpr double kMinWidth = 1e-3;
constexpr double kMinShape = 0.5;
constexpr double kMaxShape = 5.0;
constexpr double kTinyT = 1e-300;

void check_input_dim(const AnfisModel& model, Eigen::Index dim) {
  if (dim != model.n_inputs()) {
    throw std::invalid_argument("anfis: input has dimension " +
                                std::to_string(dim) + ", model expects " +
                                std::to_string(model.n_inputs()));
  }
}

// Reusable buffers for the fused forward/backward pass; sized for one
// (n_samples, n_rules, n_inputs) problem and reused across epochs.
struct AnfisWorkspace {
  Matrix z;     // n x (R*d): displacement / width, column block per (r, i)
  Matrix t;     // z^2, floored away from zero
  Matrix logt;
  Matrix u;     // t^b
  Matrix logw;  // n x R
  Matrix normalized;
  Matrix rule_outputs;
  Vector output;

  void resize(Eigen::Index n, Eigen::Index rules, Eigen::Index inputs) {
    z.resize(n, rules * inputs);
    t.resize(n, rules * inputs);
    logt.resize(n, rules * inputs);
    u.resize(n, rules * inputs);
    logw.resize(n, rules);
    normalized.resize(n, rules);
    rule_outputs.resize(n, rules);
    output.resize(n);
  }
};

// Log firing strengths for all samples: logw(s, r) = -sum_i ((x-c)/a)^(2b).
// Fills the z/t/logt/u blocks for reuse in the backward pass.
void log_strengths(const AnfisModel& model, const Eigen::Ref<const Matrix>& X,
                   AnfisWorkspace& ws) {
  const Eigen::Index n = X.rows();
  const Eigen::Index R = model.n_rules();
  const Eigen::Index d = model.n_inputs();
  ws.resize(n, R, d);
  for (Eigen::Index r = 0; r < R; ++r) {
    ws.logw.col(r).setZero();
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index col = r * d + i;
      ws.z.col(col) =
          (X.col(i).array() - model.centers(r, i)) / model.widths(r, i);
      ws.t.col(col) = ws.z.col(col).array().square().max(kTinyT);
      ws.logt.col(col) = ws.t.col(col).array().log();
      ws.u.col(col) = (model.shapes(r, i) * ws.logt.col(col).array()).exp();
      ws.logw.col(r) -= ws.u.col(col);
    }
  }
}

// Softmax across rules; identical to normalizing exp(logw) but stable when
// strengths underflow.
Matrix normalized_from_logs(const Matrix& logw) {
  Matrix shifted = logw.colwise() - logw.rowwise().maxCoeff();
  Matrix w = shifted.array().exp();
  return w.array().colwise() / w.rowwise().sum().array();
}

// Fused loss + gradient evaluation over a shared workspace.
double mse_loss_with_workspace(const AnfisModel& model,
                               const Eigen::Ref<const Matrix>& X,
                               const Eigen::Ref<const Vector>& targets,
                               AnfisGradients* grads, AnfisWorkspace& ws) {
  const Eigen::Index n = X.rows();
  const Eigen::Index R = model.n_rules();
  const Eigen::Index d = model.n_inputs();

  log_strengths(model, X, ws);
  ws.normalized = normalized_from_logs(ws.logw);
  ws.rule_outputs.noalias() = X * model.coeffs.transpose();
  ws.rule_outputs.rowwise() += model.biases.transpose();
  ws.output = (ws.normalized.array() * ws.rule_outputs.array()).rowwise().sum();

  const Vector residual = ws.output - targets;
  const double loss = residual.squaredNorm() / static_cast<double>(n);
  if (!grads) return loss;

  const Vector dout = 2.0 * residual / static_cast<double>(n);
  const Matrix weighted = ws.normalized.array().colwise() * dout.array();
  grads->coeffs.noalias() = weighted.transpose() * X;
  grads->biases = weighted.colwise().sum().transpose();

  // d output / d logw_r = normalized_r * (rule_output_r - output).
  const Matrix dlogw =
      (ws.normalized.array() * (ws.rule_outputs.colwise() - ws.output).array())
          .colwise() *
      dout.array();

  grads->widths.resize(R, d);
  grads->shapes.resize(R, d);
  grads->centers.resize(R, d);
  for (Eigen::Index r = 0; r < R; ++r) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index col = r * d + i;
      const double b = model.shapes(r, i);
      const double inv_a = 1.0 / model.widths(r, i);
      const auto dl = dlogw.col(r).array();
      const auto u = ws.u.col(col).array();
      const auto t = ws.t.col(col).array();
      const auto z = ws.z.col(col).array();
      const auto logt = ws.logt.col(col).array();
      // logw = -sum u with u = t^b; dt/dc = -2z/a, dt/da = -2t/a,
      // du/db = u ln t.
      const auto p = b * u / t;
      grads->centers(r, i) = (dl * p * z).sum() * 2.0 * inv_a;
      grads->widths(r, i) = (dl * p * t).sum() * 2.0 * inv_a;
      grads->shapes(r, i) = -(dl * u * logt).sum();
    }
  }
  return loss;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols =
      rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = j.at(static_cast<std::size_t>(i))
                    .at(static_cast<std::size_t>(c))
                    .get<double>();
    }
  }
  return m;
}

}  // namespace

double membership(double x, double a, double b, double c) {
  const double z = (x - c) / a;
  const double t = z * z;
  if (t <= 0.0) return 1.0;
  return std::exp(-std::pow(t, b));
}

Vector firing_strengths(const AnfisModel& model, const Vector& x) {
  check_input_dim(model, x.size());
  Vector w(model.n_rules());
  for (Eigen::Index r = 0; r < model.n_rules(); ++r) {
    double log_w = 0.0;
    for (Eigen::Index i = 0; i < model.n_inputs(); ++i) {
      const double z = (x[i] - model.centers(r, i)) / model.widths(r, i);
      const double t = z * z;
      if (t > 0.0) log_w -= std::pow(t, model.shapes(r, i));
    }
    w[r] = std::exp(log_w);
  }
  return w;
}

Vector normalize_strengths(const Vector& w) {
  const double sum = w.sum();
  if (!(sum > 0.0)) {
    throw std::runtime_error("normalize_strengths: strengths sum to zero");
  }
  return w / sum;
}

double anfis_forward(const AnfisModel& model, const Vector& x) {
  check_input_dim(model, x.size());
  return anfis_forward_batch(model, x.transpose())[0];
}

Vector anfis_forward_batch(const AnfisModel& model,
                           const Eigen::Ref<const Matrix>& X) {
  check_input_dim(model, X.cols());
  AnfisWorkspace ws;
  log_strengths(model, X, ws);
  const Matrix normalized = normalized_from_logs(ws.logw);
  const Matrix rule_outputs =
      (X * model.coeffs.transpose()).rowwise() + model.biases.transpose();
  return (normalized.array() * rule_outputs.array()).rowwise().sum();
}

double anfis_mse_loss(const AnfisModel& model, const Eigen::Ref<const Matrix>& X,
                      const Eigen::Ref<const Vector>& targets,
                      AnfisGradients* grads) {
  check_input_dim(model, X.cols());
  const Eigen::Index n = X.rows();
  if (n == 0) throw std::runtime_error("anfis_mse_loss: empty batch");
  if (targets.size() != n) {
    throw std::runtime_error("anfis_mse_loss: target length mismatch");
  }
  AnfisWorkspace ws;
  return mse_loss_with_workspace(model, X, targets, grads, ws);
}

namespace {

Eigen::Index parameter_count(const AnfisModel& m) {
  return 4 * m.n_rules() * m.n_inputs() + m.n_rules();
}

void pack(const Matrix& widths, const Matrix& shapes, const Matrix& centers,
          const Matrix& coeffs, const Vector& biases, Vector& flat) {
  Eigen::Index offset = 0;
  for (const Matrix* m : {&widths, &shapes, &centers, &coeffs}) {
    flat.segment(offset, m->size()) =
        Eigen::Map<const Vector>(m->data(), m->size());
    offset += m->size();
  }
  flat.segment(offset, biases.size()) = biases;
}

void unpack(const Vector& flat, AnfisModel& model) {
  Eigen::Index offset = 0;
  for (Matrix* m : {&model.widths, &model.shapes, &model.centers,
                    &model.coeffs}) {
    Eigen::Map<Vector>(m->data(), m->size()) = flat.segment(offset, m->size());
    offset += m->size();
  }
  model.biases = flat.segment(offset, model.biases.size());
}

}  // namespace

AnfisModel anfis_train(const Dataset& dataset,
                       const std::vector<std::size_t>& train_indices,
                       const AnfisTrainConfig& config, std::uint64_t seed) {
  if (train_indices.empty()) {
    throw std::runtime_error("anfis_train: empty training set");
  }
  if (config.n_rules < 1) throw std::runtime_error("anfis_train: n_rules < 1");

  const Matrix X = dataset.rows(train_indices);
  const Vector targets = dataset.labels_at(train_indices).cast<double>();
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const Eigen::Index R = config.n_rules;

  Rng rng(derive_seed(seed, "anfis-init"));

  AnfisModel model;
  model.centers.resize(R, d);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (Eigen::Index r = 0; r < R; ++r) {
    // Sample training points as rule centers; wraps when R > n.
    model.centers.row(r) =
        X.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(r) %
                                              order.size()]));
  }

  const Vector mean = X.colwise().mean();
  Vector stddev(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var =
        (X.col(j).array() - mean[j]).square().sum() / std::max<double>(1, n - 1);
    stddev[j] = std::max(std::sqrt(var), kMinWidth);
  }
  model.widths = stddev.transpose().replicate(R, 1);
  model.shapes = Matrix::Ones(R, d);
  model.coeffs = Matrix::Zero(R, d);
  model.biases = Vector::Zero(R);

  Vector flat(parameter_count(model));
  Vector flat_grad(parameter_count(model));
  Adam adam(flat.size(), config.learning_rate, config.beta1, config.beta2,
            config.epsilon);
  AnfisGradients grads;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    anfis_mse_loss(model, X, targets, &grads);
    pack(model.widths, model.shapes, model.centers, model.coeffs, model.biases,
         flat);
    pack(grads.widths, grads.shapes, grads.centers, grads.coeffs, grads.biases,
         flat_grad);
    adam.step(flat, flat_grad);
    unpack(flat, model);
    model.widths = model.widths.cwiseMax(kMinWidth);
    model.shapes = model.shapes.cwiseMax(kMinShape).cwiseMin(kMaxShape);
  }
  return model;
}

int anfis_predict(const AnfisModel& model, const Vector& x) {
  return anfis_forward(model, x) >= 0.5 ? 1 : 0;
}

Eigen::VectorXi anfis_predict_batch(const AnfisModel& model,
                                    const Eigen::Ref<const Matrix>& X) {
  const Vector out = anfis_forward_batch(model, X);
  Eigen::VectorXi labels(out.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    labels[i] = out[i] >= 0.5 ? 1 : 0;
  }
  return labels;
}

std::string anfis_to_json(const AnfisModel& model, const AnfisTrainConfig& config,
                          std::uint64_t seed) {
  nlohmann::json j;
  j["type"] = "anfis";
  j["widths"] = matrix_to_json(model.widths);
  j["shapes"] = matrix_to_json(model.shapes);
  j["centers"] = matrix_to_json(model.centers);
  j["coeffs"] = matrix_to_json(model.coeffs);
  j["biases"] = std::vector<double>(model.biases.data(),
                                    model.biases.data() + model.biases.size());
  j["config"] = {{"learning_rate", config.learning_rate},
                 {"epochs", config.epochs},
                 {"n_rules", config.n_rules},
                 {"beta1", config.beta1},
                 {"beta2", config.beta2},
                 {"epsilon", config.epsilon}};
  j["seed"] = seed;
  return j.dump(2);
}

AnfisModel anfis_from_json(const std::string& json_text,
                           AnfisTrainConfig* config, std::uint64_t* seed) {
  const auto j = nlohmann::json::parse(json_text);
  AnfisModel model;
  model.widths = matrix_from_json(j.at("widths"));
  model.shapes = matrix_from_json(j.at("shapes"));
  model.centers = matrix_from_json(j.at("centers"));
  model.coeffs = matrix_from_json(j.at("coeffs"));
  const auto biases = j.at("biases").get<std::vector<double>>();
  model.biases = Eigen::Map<const Vector>(biases.data(),
                                          static_cast<Eigen::Index>(biases.size()));
  if (config) {
    const auto& c = j.at("config");
    config->learning_rate = c.at("learning_rate").get<double>();
    config->epochs = c.at("epochs").get<int>();
    config->n_rules = c.at("n_rules").get<int>();
    config->beta1 = c.at("beta1").get<double>();
    config->beta2 = c.at("beta2").get<double>();
    config->epsilon = c.at("epsilon").get<double>();
  }
  if (seed) *seed = j.at("seed").get<std::uint64_t>();
  return model;
}

}  // namespace hemo
