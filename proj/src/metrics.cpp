#include "hemo/metrics.hpp"

#include <stdexcept>

namespace hemo {

ConfusionMatrix confusion(const Eigen::VectorXi& predictions,
                          const Eigen::VectorXi& truths) {
  if (predictions.size() != truths.size()) {
    throw std::runtime_error("confusion: prediction/truth length mismatch");
  }
  ConfusionMatrix cm;
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int t = truths[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1)) {
      throw std::runtime_error("confusion: labels must be 0 or 1");
    }
    if (p == 1 && t == 1) ++cm.tp;
    else if (p == 0 && t == 0) ++cm.tn;
    else if (p == 1 && t == 0) ++cm.fp;
    else ++cm.fn;
  }
  return cm;
}

namespace {

std::optional<double> ratio(long long num, long long den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsRow compute_metrics(const ConfusionMatrix& cm, InverseRecallRule rule) {
  if (cm.total() == 0) throw std::runtime_error("compute_metrics: empty matrix");

  MetricsRow row;
  row.accuracy = ratio(cm.tn + cm.tp, cm.total());
  row.recall = ratio(cm.tp, cm.tp + cm.fn);
  row.precision = ratio(cm.tp, cm.tp + cm.fp);
  if (row.recall && row.precision && (*row.recall + *row.precision) > 0.0) {
    row.f1 = 2.0 * (*row.recall * *row.precision) /
             (*row.recall + *row.precision);
  }
  row.inverse_recall = rule == InverseRecallRule::kSpecificity
                           ? ratio(cm.tn, cm.tn + cm.fp)
                           : ratio(cm.tp, cm.tp + cm.fn);
  return row;
}

MetricsRow fold_average(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) throw std::runtime_error("fold_average: empty list");

  const auto mean_of = [&](std::optional<double> MetricsRow::*field) {
    double sum = 0.0;
    int count = 0;
    for (const auto& row : rows) {
      if (row.*field) {
        sum += *(row.*field);
        ++count;
      }
    }
    return count ? std::optional<double>(sum / count) : std::nullopt;
  };

  MetricsRow avg;
  avg.accuracy = mean_of(&MetricsRow::accuracy);
  avg.precision = mean_of(&MetricsRow::precision);
  avg.recall = mean_of(&MetricsRow::recall);
  avg.f1 = mean_of(&MetricsRow::f1);
  avg.inverse_recall = mean_of(&MetricsRow::inverse_recall);
  return avg;
}

Eigen::Matrix2d average_confusion(const std::vector<ConfusionMatrix>& cms) {
  if (cms.empty()) throw std::runtime_error("average_confusion: empty list");
  Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
  for (const auto& cm : cms) {
    sum(0, 0) += static_cast<double>(cm.tn);
    sum(0, 1) += static_cast<double>(cm.fp);
    sum(1, 0) += static_cast<double>(cm.fn);
    sum(1, 1) += static_cast<double>(cm.tp);
  }
  return sum / static_cast<double>(cms.size());
}

}  // namespace hemo
