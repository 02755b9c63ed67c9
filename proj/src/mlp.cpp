#include "hemo/mlp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "hemo/optim.hpp"
#include "hemo/rng.hpp"

namespace hemo {

namespace {

Matrix relu(const Matrix& pre) { return pre.cwiseMax(0.0); }

Matrix relu_mask(const Matrix& pre) {
  return (pre.array() > 0.0).cast<double>();
}

Matrix uniform_init(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Matrix w(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      w(i, j) = rng.uniform(-bound, bound);
    }
  }
  return w;
}

}  // namespace

Matrix mlp_probabilities(const MlpModel& model, const Eigen::Ref<const Matrix>& x) {
  Matrix h = x;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    if (h.cols() != model.weights[l].cols()) {
      throw std::invalid_argument("mlp: dimension mismatch at layer " +
                                  std::to_string(l));
    }
    h = (h * model.weights[l].transpose()).rowwise() +
        model.biases[l].transpose();
    if (l + 1 < model.weights.size()) h = relu(h);
  }
  return softmax_rows(h);
}

double mlp_cross_entropy(const MlpModel& model, const Eigen::Ref<const Matrix>& x,
                         const Eigen::VectorXi& labels, MlpGradients* grads) {
  const Eigen::Index n = x.rows();
  if (n == 0) throw std::runtime_error("mlp_cross_entropy: empty batch");
  if (labels.size() != n) {
    throw std::runtime_error("mlp_cross_entropy: label length mismatch");
  }

  const std::size_t n_layers = model.weights.size();
  std::vector<Matrix> activations{x};
  std::vector<Matrix> pre_activations;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Matrix pre = (activations.back() * model.weights[l].transpose())
                           .rowwise() +
                       model.biases[l].transpose();
    pre_activations.push_back(pre);
    activations.push_back(l + 1 < n_layers ? relu(pre) : pre);
  }
  const Matrix probs = softmax_rows(activations.back());
  const double loss = cross_entropy(probs, labels);
  if (!grads) return loss;

  Matrix delta = probs;
  for (Eigen::Index i = 0; i < n; ++i) delta(i, labels[i]) -= 1.0;
  delta /= static_cast<double>(n);

  grads->weights.assign(n_layers, {});
  grads->biases.assign(n_layers, {});
  for (std::size_t l = n_layers; l-- > 0;) {
    grads->weights[l] = delta.transpose() * activations[l];
    grads->biases[l] = delta.colwise().sum().transpose();
    if (l) {
      delta = (delta * model.weights[l])
                  .cwiseProduct(relu_mask(pre_activations[l - 1]));
    }
  }
  return loss;
}

MlpModel mlp_train(const Eigen::Ref<const Matrix>& features,
                   const Eigen::VectorXi& labels, const MlpConfig& config,
                   std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  if (n == 0) throw std::runtime_error("mlp_train: empty training set");
  if (labels.size() != n) {
    throw std::runtime_error("mlp_train: feature/label length mismatch");
  }

  std::vector<Eigen::Index> dims;
  dims.push_back(features.cols());
  for (const int h : config.hidden_dims) dims.push_back(h);
  dims.push_back(2);

  Rng rng(derive_seed(seed, "mlp-init"));
  MlpModel model;
  Eigen::Index n_params = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    model.weights.push_back(uniform_init(dims[l + 1], dims[l], rng));
    model.biases.push_back(Vector::Zero(dims[l + 1]));
    n_params += dims[l + 1] * dims[l] + dims[l + 1];
  }

  Vector flat(n_params), flat_grad(n_params);
  const auto pack = [&](const std::vector<Matrix>& ws,
                        const std::vector<Vector>& bs, Vector& out) {
    Eigen::Index offset = 0;
    for (std::size_t l = 0; l < ws.size(); ++l) {
      out.segment(offset, ws[l].size()) =
          Eigen::Map<const Vector>(ws[l].data(), ws[l].size());
      offset += ws[l].size();
      out.segment(offset, bs[l].size()) = bs[l];
      offset += bs[l].size();
    }
  };
  const auto unpack = [&](const Vector& in, MlpModel& m) {
    Eigen::Index offset = 0;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      Eigen::Map<Vector>(m.weights[l].data(), m.weights[l].size()) =
          in.segment(offset, m.weights[l].size());
      offset += m.weights[l].size();
      m.biases[l] = in.segment(offset, m.biases[l].size());
      offset += m.biases[l].size();
    }
  };

  Adam adam(n_params, config.learning_rate);
  MlpGradients grads;
  Rng batch_rng(derive_seed(seed, "mlp-batches"));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    batch_rng.shuffle(order);
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index end = std::min<Eigen::Index>(start + config.batch_size, n);
      Matrix batch(end - start, features.cols());
      Eigen::VectorXi batch_labels(end - start);
      for (Eigen::Index i = start; i < end; ++i) {
        batch.row(i - start) = features.row(order[static_cast<std::size_t>(i)]);
        batch_labels[i - start] = labels[order[static_cast<std::size_t>(i)]];
      }
      mlp_cross_entropy(model, batch, batch_labels, &grads);
      pack(model.weights, model.biases, flat);
      pack(grads.weights, grads.biases, flat_grad);
      adam.step(flat, flat_grad);
      unpack(flat, model);
    }
  }
  return model;
}

int mlp_predict(const MlpModel& model, const Vector& x) {
  const Matrix probs = mlp_probabilities(model, x.transpose());
  return probs(0, 1) >= probs(0, 0) ? 1 : 0;
}

Eigen::VectorXi mlp_predict_batch(const MlpModel& model,
                                  const Eigen::Ref<const Matrix>& x) {
  const Matrix probs = mlp_probabilities(model, x);
  Eigen::VectorXi out(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    out[i] = probs(i, 1) >= probs(i, 0) ? 1 : 0;
  }
  return out;
}

std::string mlp_to_json(const MlpModel& model, const MlpConfig& config,
                        std::uint64_t seed) {
  nlohmann::json j;
  j["type"] = "mlp";
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.weights[l].rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < model.weights[l].cols(); ++c) {
        row.push_back(model.weights[l](i, c));
      }
      rows.push_back(std::move(row));
    }
    layers.push_back(
        {{"weights", std::move(rows)},
         {"bias", std::vector<double>(model.biases[l].data(),
                                      model.biases[l].data() +
                                          model.biases[l].size())}});
  }
  j["layers"] = std::move(layers);
  j["config"] = {{"hidden_dims", config.hidden_dims},
                 {"learning_rate", config.learning_rate},
                 {"epochs", config.epochs},
                 {"batch_size", config.batch_size}};
  j["seed"] = seed;
  return j.dump(2);
}

MlpModel mlp_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  MlpModel model;
  for (const auto& layer : j.at("layers")) {
    const auto& rows = layer.at("weights");
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = r ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    Matrix w(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index k = 0; k < c; ++k) {
        w(i, k) = rows.at(static_cast<std::size_t>(i))
                      .at(static_cast<std::size_t>(k))
                      .get<double>();
      }
    }
    model.weights.push_back(std::move(w));
    const auto bias = layer.at("bias").get<std::vector<double>>();
    model.biases.push_back(Eigen::Map<const Vector>(
        bias.data(), static_cast<Eigen::Index>(bias.size())));
  }
  return model;
}

}  // namespace hemo
