#pragma once

#include "hemo/dataset.hpp"

namespace hemo {

/// k-nearest-neighbour classifier; stores the training slice verbatim.
struct KnnModel {
  int k = 5;
  Matrix train_features;
  Eigen::VectorXi train_labels;
};

/// Throws if k < 1 or k > n_train.
KnnModel knn_fit(const Eigen::Ref<const Matrix>& features,
                 const Eigen::VectorXi& labels, int k);

/// Majority label among the k nearest by Euclidean distance. Distance ties
/// break toward the lower training index; a label tie (even k) breaks
/// toward label 1.
int knn_predict(const KnnModel& model, const Vector& x);
Eigen::VectorXi knn_predict_batch(const KnnModel& model,
                                  const Eigen::Ref<const Matrix>& x);

std::string knn_to_json(const KnnModel& model);
KnnModel knn_from_json(const std::string& json_text);

}  // namespace hemo
