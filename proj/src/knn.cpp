#include "hemo/knn.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace hemo {

KnnModel knn_fit(const Eigen::Ref<const Matrix>& features,
                 const Eigen::VectorXi& labels, int k) {
  if (features.rows() != labels.size()) {
    throw std::runtime_error("knn_fit: feature/label length mismatch");
  }
  if (k < 1 || k > features.rows()) {
    throw std::runtime_error("knn_fit: k = " + std::to_string(k) +
                             " out of range [1, " +
                             std::to_string(features.rows()) + "]");
  }
  return {k, features, labels};
}

int knn_predict(const KnnModel& model, const Vector& x) {
  if (x.size() != model.train_features.cols()) {
    throw std::invalid_argument("knn_predict: dimension mismatch");
  }
  const Eigen::Index n = model.train_features.rows();
  const Vector dist2 =
      (model.train_features.rowwise() - x.transpose()).rowwise().squaredNorm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto closer = [&](Eigen::Index a, Eigen::Index b) {
    if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + model.k, order.end(), closer);

  int votes_one = 0;
  for (int i = 0; i < model.k; ++i) {
    votes_one += model.train_labels[order[static_cast<std::size_t>(i)]];
  }
  return 2 * votes_one >= model.k ? 1 : 0;
}

Eigen::VectorXi knn_predict_batch(const KnnModel& model,
                                  const Eigen::Ref<const Matrix>& x) {
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = knn_predict(model, x.row(i).transpose());
  }
  return out;
}

std::string knn_to_json(const KnnModel& model) {
  nlohmann::json j;
  j["type"] = "knn";
  j["k"] = model.k;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.train_features.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < model.train_features.cols(); ++c) {
      row.push_back(model.train_features(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["train_features"] = std::move(rows);
  j["train_labels"] =
      std::vector<int>(model.train_labels.data(),
                       model.train_labels.data() + model.train_labels.size());
  return j.dump(2);
}

KnnModel knn_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  KnnModel model;
  model.k = j.at("k").get<int>();
  const auto& rows = j.at("train_features");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = n ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
  model.train_features.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      model.train_features(i, c) = rows.at(static_cast<std::size_t>(i))
                                       .at(static_cast<std::size_t>(c))
                                       .get<double>();
    }
  }
  const auto labels = j.at("train_labels").get<std::vector<int>>();
  model.train_labels = Eigen::Map<const Eigen::VectorXi>(
      labels.data(), static_cast<Eigen::Index>(labels.size()));
  return model;
}

}  // namespace hemo
