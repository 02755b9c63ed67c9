#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace hemo {

/// 2x2 integer counts. Index convention follows the report layout:
/// element (1,1) is TN (non-COVID recognized), element (2,2) is TP.
struct ConfusionMatrix {
  long long tn = 0;
  long long fp = 0;
  long long fn = 0;
  long long tp = 0;

  long long total() const { return tn + fp + fn + tp; }
};

/// Which definition the inverse-recall column reports. The printed formula
/// in the source material duplicates recall verbatim; specificity is what a
/// "94% specificity" claim actually requires, so it is the default.
enum class InverseRecallRule { kSpecificity, kLiteralRecall };

/// One row of a results table. A metric whose ratio is 0/0 is left empty
/// (undefined) rather than coerced to 0, so averages stay honest.
struct MetricsRow {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> inverse_recall;
};

/// Tallies predictions against truths. Throws on length mismatch or a label
/// outside {0,1}.
ConfusionMatrix confusion(const Eigen::VectorXi& predictions,
                          const Eigen::VectorXi& truths);

/// accuracy = (tn+tp)/total, recall = tp/(tp+fn), precision = tp/(tp+fp),
/// f1 = harmonic mean, inverse_recall per `rule`. Throws on an empty matrix.
MetricsRow compute_metrics(const ConfusionMatrix& cm,
                           InverseRecallRule rule = InverseRecallRule::kSpecificity);

/// Arithmetic mean per metric over the rows where that metric is defined.
/// A metric undefined in every row stays undefined. Throws on an empty list.
MetricsRow fold_average(const std::vector<MetricsRow>& rows);

/// Entry-wise mean of confusion counts, as displayed in averaged-fold
/// confusion figures. Layout: (0,0)=tn, (0,1)=fp, (1,0)=fn, (1,1)=tp.
Eigen::Matrix2d average_confusion(const std::vector<ConfusionMatrix>& cms);

}  // namespace hemo
