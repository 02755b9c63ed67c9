#include "hemo/sae.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "hemo/optim.hpp"
#include "hemo/rng.hpp"

namespace hemo {

namespace {

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

Matrix apply_leaky(const Matrix& pre, double slope) {
  return pre.unaryExpr([slope](double v) { return leaky_relu(v, slope); });
}

Matrix leaky_grad_mask(const Matrix& pre, double slope) {
  return pre.unaryExpr([slope](double v) { return leaky_relu_grad(v, slope); });
}

std::vector<std::vector<Eigen::Index>> minibatches(Eigen::Index n, int batch_size,
                                                   Rng& rng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::vector<Eigen::Index>> batches;
  for (Eigen::Index start = 0; start < n; start += batch_size) {
    const Eigen::Index end = std::min<Eigen::Index>(start + batch_size, n);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

Matrix take_rows(const Eigen::Ref<const Matrix>& x,
                 const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  }
  return out;
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
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
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

nlohmann::json vector_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Eigen::Index>(values.size()));
}

}  // namespace

Matrix encode(const AutoencoderLayer& layer, const Eigen::Ref<const Matrix>& x) {
  if (x.cols() != layer.input_dim()) {
    throw std::invalid_argument("encode: dimension mismatch");
  }
  const Matrix pre =
      (x * layer.enc_weights.transpose()).rowwise() + layer.enc_bias.transpose();
  return apply_leaky(pre, layer.slope);
}

Matrix decode(const AutoencoderLayer& layer, const Eigen::Ref<const Matrix>& h) {
  if (h.cols() != layer.hidden_dim()) {
    throw std::invalid_argument("decode: dimension mismatch");
  }
  return (h * layer.dec_weights.transpose()).rowwise() +
         layer.dec_bias.transpose();
}

double ae_loss(const AutoencoderLayer& layer, const Eigen::Ref<const Matrix>& batch,
               double l2_lambda, AutoencoderGradients* grads) {
  if (batch.cols() != layer.input_dim()) {
    throw std::invalid_argument("ae_loss: dimension mismatch");
  }
  const Eigen::Index m = batch.rows();
  if (m == 0) throw std::runtime_error("ae_loss: empty batch");

  const Matrix pre =
      (batch * layer.enc_weights.transpose()).rowwise() +
      layer.enc_bias.transpose();
  const Matrix hidden = apply_leaky(pre, layer.slope);
  const Matrix reconstruction =
      (hidden * layer.dec_weights.transpose()).rowwise() +
      layer.dec_bias.transpose();
  const Matrix error = reconstruction - batch;

  const double mse = 0.5 * error.squaredNorm() / static_cast<double>(m);
  const double reg = 0.5 * l2_lambda *
                     (layer.enc_weights.squaredNorm() +
                      layer.dec_weights.squaredNorm());
  if (!grads) return mse + reg;

  const Matrix d_reconstruction = error / static_cast<double>(m);
  grads->dec_weights =
      d_reconstruction.transpose() * hidden + l2_lambda * layer.dec_weights;
  grads->dec_bias = d_reconstruction.colwise().sum().transpose();

  const Matrix d_hidden = d_reconstruction * layer.dec_weights;
  const Matrix d_pre = d_hidden.cwiseProduct(leaky_grad_mask(pre, layer.slope));
  grads->enc_weights = d_pre.transpose() * batch + l2_lambda * layer.enc_weights;
  grads->enc_bias = d_pre.colwise().sum().transpose();
  return mse + reg;
}

namespace {

Eigen::Index ae_param_count(const AutoencoderLayer& l) {
  return l.enc_weights.size() + l.enc_bias.size() + l.dec_weights.size() +
         l.dec_bias.size();
}

void ae_pack(const Matrix& ew, const Vector& eb, const Matrix& dw,
             const Vector& db, Vector& flat) {
  Eigen::Index offset = 0;
  flat.segment(offset, ew.size()) = Eigen::Map<const Vector>(ew.data(), ew.size());
  offset += ew.size();
  flat.segment(offset, eb.size()) = eb;
  offset += eb.size();
  flat.segment(offset, dw.size()) = Eigen::Map<const Vector>(dw.data(), dw.size());
  offset += dw.size();
  flat.segment(offset, db.size()) = db;
}

void ae_unpack(const Vector& flat, AutoencoderLayer& l) {
  Eigen::Index offset = 0;
  Eigen::Map<Vector>(l.enc_weights.data(), l.enc_weights.size()) =
      flat.segment(offset, l.enc_weights.size());
  offset += l.enc_weights.size();
  l.enc_bias = flat.segment(offset, l.enc_bias.size());
  offset += l.enc_bias.size();
  Eigen::Map<Vector>(l.dec_weights.data(), l.dec_weights.size()) =
      flat.segment(offset, l.dec_weights.size());
  offset += l.dec_weights.size();
  l.dec_bias = flat.segment(offset, l.dec_bias.size());
}

}  // namespace

AutoencoderLayer pretrain_layer(Eigen::Index input_dim, Eigen::Index hidden_dim,
                                const Eigen::Ref<const Matrix>& inputs,
                                const SaeTrainConfig& config, std::uint64_t seed) {
  if (inputs.rows() == 0) throw std::runtime_error("pretrain_layer: empty input");
  if (inputs.cols() != input_dim) {
    throw std::invalid_argument("pretrain_layer: dimension mismatch");
  }

  Rng rng(derive_seed(seed, "ae-pretrain"));
  AutoencoderLayer layer;
  layer.enc_weights = uniform_init(hidden_dim, input_dim, rng);
  layer.enc_bias = Vector::Zero(hidden_dim);
  layer.dec_weights = uniform_init(input_dim, hidden_dim, rng);
  layer.dec_bias = Vector::Zero(input_dim);

  Vector flat(ae_param_count(layer));
  Vector flat_grad(ae_param_count(layer));
  MomentumSgd sgd(flat.size(), config.learning_rate, config.momentum);
  AutoencoderGradients grads;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch_rows :
         minibatches(inputs.rows(), config.batch_size, rng)) {
      const Matrix batch = take_rows(inputs, batch_rows);
      ae_loss(layer, batch, config.l2_lambda, &grads);
      ae_pack(layer.enc_weights, layer.enc_bias, layer.dec_weights,
              layer.dec_bias, flat);
      ae_pack(grads.enc_weights, grads.enc_bias, grads.dec_weights,
              grads.dec_bias, flat_grad);
      sgd.step(flat, flat_grad);
      ae_unpack(flat, layer);
    }
  }
  return layer;
}

Matrix sae_probabilities(const StackedAutoencoder& sae,
                         const Eigen::Ref<const Matrix>& x) {
  Matrix h = x;
  for (const auto& stage : sae.encoders) {
    if (h.cols() != stage.weights.cols()) {
      throw std::invalid_argument("sae: dimension mismatch");
    }
    h = apply_leaky(
        (h * stage.weights.transpose()).rowwise() + stage.bias.transpose(),
        stage.slope);
  }
  const Matrix logits =
      (h * sae.head_weights.transpose()).rowwise() + sae.head_bias.transpose();
  return softmax_rows(logits);
}

double sae_cross_entropy(const StackedAutoencoder& sae,
                         const Eigen::Ref<const Matrix>& x,
                         const Eigen::VectorXi& labels, SaeGradients* grads) {
  const Eigen::Index n = x.rows();
  if (n == 0) throw std::runtime_error("sae_cross_entropy: empty batch");
  if (labels.size() != n) {
    throw std::runtime_error("sae_cross_entropy: label length mismatch");
  }

  // Forward pass keeping pre-activations for backprop.
  std::vector<Matrix> activations;  // input to each stage / head
  std::vector<Matrix> pre_activations;
  activations.push_back(x);
  for (const auto& stage : sae.encoders) {
    const Matrix pre = (activations.back() * stage.weights.transpose()).rowwise() +
                       stage.bias.transpose();
    pre_activations.push_back(pre);
    activations.push_back(apply_leaky(pre, stage.slope));
  }
  const Matrix logits = (activations.back() * sae.head_weights.transpose())
                            .rowwise() +
                        sae.head_bias.transpose();
  const Matrix probs = softmax_rows(logits);
  const double loss = cross_entropy(probs, labels);
  if (!grads) return loss;

  Matrix d_logits = probs;
  for (Eigen::Index i = 0; i < n; ++i) d_logits(i, labels[i]) -= 1.0;
  d_logits /= static_cast<double>(n);

  grads->head_weights = d_logits.transpose() * activations.back();
  grads->head_bias = d_logits.colwise().sum().transpose();

  grads->encoder_weights.assign(sae.encoders.size(), {});
  grads->encoder_biases.assign(sae.encoders.size(), {});
  Matrix d_act = d_logits * sae.head_weights;
  for (std::size_t s = sae.encoders.size(); s-- > 0;) {
    const auto& stage = sae.encoders[s];
    const Matrix d_pre =
        d_act.cwiseProduct(leaky_grad_mask(pre_activations[s], stage.slope));
    grads->encoder_weights[s] = d_pre.transpose() * activations[s];
    grads->encoder_biases[s] = d_pre.colwise().sum().transpose();
    if (s) d_act = d_pre * stage.weights;
  }
  return loss;
}

StackedAutoencoder stack_and_finetune(const Dataset& dataset,
                                      const std::vector<std::size_t>& train_indices,
                                      const SaeTrainConfig& config,
                                      std::uint64_t seed) {
  if (train_indices.empty()) {
    throw std::runtime_error("stack_and_finetune: empty training set");
  }

  StackedAutoencoder sae;
  Matrix current = dataset.rows(train_indices);
  Eigen::Index in_dim = current.cols();
  for (std::size_t s = 0; s < config.hidden_dims.size(); ++s) {
    const Eigen::Index hidden = config.hidden_dims[s];
    const AutoencoderLayer layer =
        pretrain_layer(in_dim, hidden, current, config,
                       derive_seed(seed, "sae-layer", s));
    current = encode(layer, current);
    sae.encoders.push_back({layer.enc_weights, layer.enc_bias, layer.slope});
    in_dim = hidden;
  }

  Rng head_rng(derive_seed(seed, "sae-head"));
  sae.head_weights = uniform_init(2, in_dim, head_rng);
  sae.head_bias = Vector::Zero(2);

  const Matrix x = dataset.rows(train_indices);
  const Eigen::VectorXi labels = dataset.labels_at(train_indices);

  // Global fine-tuning phase.
  Eigen::Index n_params = sae.head_weights.size() + sae.head_bias.size();
  for (const auto& stage : sae.encoders) {
    n_params += stage.weights.size() + stage.bias.size();
  }
  Vector flat(n_params), flat_grad(n_params);
  const auto pack_all = [&](const StackedAutoencoder& net,
                            const SaeGradients* g, Vector& out) {
    Eigen::Index offset = 0;
    for (std::size_t s = 0; s < net.encoders.size(); ++s) {
      const Matrix& w = g ? g->encoder_weights[s] : net.encoders[s].weights;
      const Vector& b = g ? g->encoder_biases[s] : net.encoders[s].bias;
      out.segment(offset, w.size()) = Eigen::Map<const Vector>(w.data(), w.size());
      offset += w.size();
      out.segment(offset, b.size()) = b;
      offset += b.size();
    }
    const Matrix& hw = g ? g->head_weights : net.head_weights;
    const Vector& hb = g ? g->head_bias : net.head_bias;
    out.segment(offset, hw.size()) = Eigen::Map<const Vector>(hw.data(), hw.size());
    offset += hw.size();
    out.segment(offset, hb.size()) = hb;
  };
  const auto unpack_all = [&](const Vector& in, StackedAutoencoder& net) {
    Eigen::Index offset = 0;
    for (auto& stage : net.encoders) {
      Eigen::Map<Vector>(stage.weights.data(), stage.weights.size()) =
          in.segment(offset, stage.weights.size());
      offset += stage.weights.size();
      stage.bias = in.segment(offset, stage.bias.size());
      offset += stage.bias.size();
    }
    Eigen::Map<Vector>(net.head_weights.data(), net.head_weights.size()) =
        in.segment(offset, net.head_weights.size());
    offset += net.head_weights.size();
    net.head_bias = in.segment(offset, net.head_bias.size());
  };

  Adam adam(n_params, config.fine_tune_learning_rate);
  SaeGradients grads;
  Rng batch_rng(derive_seed(seed, "sae-finetune"));
  for (int epoch = 0; epoch < config.fine_tune_epochs; ++epoch) {
    for (const auto& batch_rows :
         minibatches(x.rows(), config.fine_tune_batch_size, batch_rng)) {
      const Matrix batch = take_rows(x, batch_rows);
      Eigen::VectorXi batch_labels(static_cast<Eigen::Index>(batch_rows.size()));
      for (std::size_t i = 0; i < batch_rows.size(); ++i) {
        batch_labels[static_cast<Eigen::Index>(i)] = labels[batch_rows[i]];
      }
      sae_cross_entropy(sae, batch, batch_labels, &grads);
      pack_all(sae, nullptr, flat);
      pack_all(sae, &grads, flat_grad);
      adam.step(flat, flat_grad);
      unpack_all(flat, sae);
    }
  }
  return sae;
}

int sae_predict(const StackedAutoencoder& sae, const Vector& x) {
  const Matrix probs = sae_probabilities(sae, x.transpose());
  return probs(0, 1) >= probs(0, 0) ? 1 : 0;
}

Eigen::VectorXi sae_predict_batch(const StackedAutoencoder& sae,
                                  const Eigen::Ref<const Matrix>& x) {
  const Matrix probs = sae_probabilities(sae, x);
  Eigen::VectorXi labels(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    labels[i] = probs(i, 1) >= probs(i, 0) ? 1 : 0;
  }
  return labels;
}

std::string sae_to_json(const StackedAutoencoder& sae, const SaeTrainConfig& config,
                        std::uint64_t seed) {
  nlohmann::json j;
  j["type"] = "sae";
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& stage : sae.encoders) {
    stages.push_back({{"weights", matrix_to_json(stage.weights)},
                      {"bias", vector_to_json(stage.bias)},
                      {"slope", stage.slope}});
  }
  j["encoders"] = std::move(stages);
  j["head_weights"] = matrix_to_json(sae.head_weights);
  j["head_bias"] = vector_to_json(sae.head_bias);
  j["config"] = {{"hidden_dims", config.hidden_dims},
                 {"learning_rate", config.learning_rate},
                 {"momentum", config.momentum},
                 {"l2_lambda", config.l2_lambda},
                 {"epochs", config.epochs},
                 {"batch_size", config.batch_size},
                 {"fine_tune_learning_rate", config.fine_tune_learning_rate},
                 {"fine_tune_epochs", config.fine_tune_epochs},
                 {"fine_tune_batch_size", config.fine_tune_batch_size}};
  j["seed"] = seed;
  return j.dump(2);
}

StackedAutoencoder sae_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  StackedAutoencoder sae;
  for (const auto& stage : j.at("encoders")) {
    sae.encoders.push_back({matrix_from_json(stage.at("weights")),
                            vector_from_json(stage.at("bias")),
                            stage.at("slope").get<double>()});
  }
  sae.head_weights = matrix_from_json(j.at("head_weights"));
  sae.head_bias = vector_from_json(j.at("head_bias"));
  return sae;
}

}  // namespace hemo
