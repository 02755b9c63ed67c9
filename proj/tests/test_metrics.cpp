#include <doctest.h>

#include "hemo/metrics.hpp"
#include "hemo/rng.hpp"

namespace {

Eigen::VectorXi random_labels(Eigen::Index n, hemo::Rng& rng) {
  Eigen::VectorXi v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform() < 0.5 ? 0 : 1;
  return v;
}

// Per-element counting oracle.
hemo::ConfusionMatrix confusion_oracle(const Eigen::VectorXi& pred,
                                       const Eigen::VectorXi& truth) {
  hemo::ConfusionMatrix cm;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    if (pred[i] == 1 && truth[i] == 1) cm.tp++;
    if (pred[i] == 0 && truth[i] == 0) cm.tn++;
    if (pred[i] == 1 && truth[i] == 0) cm.fp++;
    if (pred[i] == 0 && truth[i] == 1) cm.fn++;
  }
  return cm;
}

}  // namespace

TEST_CASE("confusion tallies the stated examples") {
  Eigen::VectorXi p(3), t(3);
  p << 1, 0, 1;
  t << 1, 0, 1;
  const auto cm = hemo::confusion(p, t);
  CHECK(cm.tp == 2);
  CHECK(cm.tn == 1);
  CHECK(cm.fp == 0);
  CHECK(cm.fn == 0);

  Eigen::VectorXi all_one = Eigen::VectorXi::Ones(4);
  Eigen::VectorXi all_zero = Eigen::VectorXi::Zero(4);
  const auto cm2 = hemo::confusion(all_one, all_zero);
  CHECK(cm2.fp == 4);
  CHECK(cm2.tp + cm2.tn + cm2.fn == 0);
}

TEST_CASE("confusion validates inputs") {
  Eigen::VectorXi p(2), t(3);
  p << 0, 1;
  t << 0, 1, 0;
  CHECK_THROWS(hemo::confusion(p, t));
  Eigen::VectorXi bad(3), t3(3);
  bad << 0, 2, 1;
  t3 << 0, 1, 0;
  CHECK_THROWS(hemo::confusion(bad, t3));
}

TEST_CASE("confusion matches the counting oracle on random vectors") {
  hemo::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pred = random_labels(50, rng);
    const auto truth = random_labels(50, rng);
    const auto cm = hemo::confusion(pred, truth);
    const auto expected = confusion_oracle(pred, truth);
    CHECK(cm.tp == expected.tp);
    CHECK(cm.tn == expected.tn);
    CHECK(cm.fp == expected.fp);
    CHECK(cm.fn == expected.fn);
    CHECK(cm.total() == 50);
  }
}

TEST_CASE("compute_metrics on tn=41 fp=5 fn=4 tp=50 gives accuracy 0.91") {
  const auto row = hemo::compute_metrics({41, 5, 4, 50});
  CHECK(*row.accuracy == doctest::Approx(0.91));
  CHECK(*row.recall == doctest::Approx(50.0 / 54.0));
  CHECK(*row.precision == doctest::Approx(50.0 / 55.0));
  CHECK(*row.inverse_recall == doctest::Approx(41.0 / 46.0));
}

TEST_CASE("perfect prediction yields all ones") {
  const auto row = hemo::compute_metrics({10, 0, 0, 15});
  CHECK(*row.accuracy == 1.0);
  CHECK(*row.precision == 1.0);
  CHECK(*row.recall == 1.0);
  CHECK(*row.f1 == 1.0);
  CHECK(*row.inverse_recall == 1.0);
}

TEST_CASE("0/0 metrics are undefined, not zero") {
  // No positive predictions and no positive truths: precision, recall, f1
  // all undefined.
  const auto row = hemo::compute_metrics({5, 0, 0, 0});
  CHECK(row.accuracy.has_value());
  CHECK_FALSE(row.precision.has_value());
  CHECK_FALSE(row.recall.has_value());
  CHECK_FALSE(row.f1.has_value());
  CHECK_THROWS(hemo::compute_metrics({0, 0, 0, 0}));
}

TEST_CASE("literal inverse-recall rule reproduces the printed formula") {
  const hemo::ConfusionMatrix cm{41, 5, 4, 50};
  const auto spec = hemo::compute_metrics(cm, hemo::InverseRecallRule::kSpecificity);
  const auto literal =
      hemo::compute_metrics(cm, hemo::InverseRecallRule::kLiteralRecall);
  CHECK(*spec.inverse_recall == doctest::Approx(41.0 / 46.0));
  CHECK(*literal.inverse_recall == doctest::Approx(*literal.recall));
}

TEST_CASE("fold_average reproduces the reference test-fold averages") {
  // Per-fold ensemble test metrics from the reference tables.
  const auto row_of = [](double acc, double prec, double rec, double f1) {
    hemo::MetricsRow row;
    row.accuracy = acc;
    row.precision = prec;
    row.recall = rec;
    row.f1 = f1;
    return row;
  };
  const std::vector<hemo::MetricsRow> folds = {
      row_of(0.912, 0.923, 0.923, 0.923), row_of(0.934, 0.932, 0.950, 0.941),
      row_of(0.967, 0.980, 0.963, 0.971), row_of(0.923, 0.895, 0.955, 0.924),
      row_of(0.967, 0.961, 0.980, 0.971)};
  const auto avg = hemo::fold_average(folds);
  CHECK(*avg.accuracy == doctest::Approx(0.9406).epsilon(1e-12));
  CHECK(*avg.accuracy == doctest::Approx(0.940).epsilon(5e-4));
  CHECK(*avg.precision == doctest::Approx(0.938).epsilon(5e-4));
  CHECK(*avg.recall == doctest::Approx(0.954).epsilon(5e-4));
  CHECK(*avg.f1 == doctest::Approx(0.946).epsilon(5e-4));
}

TEST_CASE("fold_average of identical rows reproduces the row") {
  hemo::MetricsRow row;
  row.accuracy = 0.8;
  row.precision = 0.7;
  const auto avg = hemo::fold_average({row, row, row});
  CHECK(*avg.accuracy == doctest::Approx(0.8));
  CHECK(*avg.precision == doctest::Approx(0.7));
  CHECK_FALSE(avg.recall.has_value());
}

TEST_CASE("fold_average skips undefined entries and averages {0.8, 1.0} to 0.9") {
  hemo::MetricsRow a, b, c;
  a.accuracy = 0.8;
  b.accuracy = 1.0;
  c.accuracy = std::nullopt;
  const auto avg = hemo::fold_average({a, b, c});
  CHECK(*avg.accuracy == doctest::Approx(0.9));
  CHECK_THROWS(hemo::fold_average({}));
}

TEST_CASE("f1 sits between precision and recall") {
  hemo::Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const hemo::ConfusionMatrix cm{
        static_cast<long long>(rng.bounded(40)),
        static_cast<long long>(rng.bounded(40)),
        static_cast<long long>(rng.bounded(40)),
        static_cast<long long>(1 + rng.bounded(40))};
    const auto row = hemo::compute_metrics(cm);
    if (!row.f1) continue;
    const double lo = std::min(*row.precision, *row.recall);
    const double hi = std::max(*row.precision, *row.recall);
    CHECK(*row.f1 >= lo - 1e-12);
    CHECK(*row.f1 <= hi + 1e-12);
    CHECK((*row.accuracy * cm.total()) ==
          doctest::Approx(static_cast<double>(cm.tn + cm.tp)));
  }
}

TEST_CASE("swapping the positive class maps recall onto specificity") {
  const hemo::ConfusionMatrix cm{30, 7, 12, 40};
  // Relabelling 0<->1 turns tn<->tp and fp<->fn.
  const hemo::ConfusionMatrix swapped{cm.tp, cm.fn, cm.fp, cm.tn};
  const auto row = hemo::compute_metrics(cm);
  const auto row_swapped = hemo::compute_metrics(swapped);
  CHECK(*row.inverse_recall == doctest::Approx(*row_swapped.recall));
  CHECK(*row.recall == doctest::Approx(*row_swapped.inverse_recall));
}

TEST_CASE("average_confusion is the entry-wise mean") {
  const hemo::ConfusionMatrix a{1, 2, 3, 1};
  const hemo::ConfusionMatrix b{3, 2, 1, 3};
  const auto avg = hemo::average_confusion({a, b});
  CHECK(avg(0, 0) == doctest::Approx(2.0));  // tn
  CHECK(avg(0, 1) == doctest::Approx(2.0));  // fp
  CHECK(avg(1, 0) == doctest::Approx(2.0));  // fn
  CHECK(avg(1, 1) == doctest::Approx(2.0));  // tp

  const auto same = hemo::average_confusion({a, a, a});
  CHECK(same(1, 1) == doctest::Approx(1.0));
  CHECK_THROWS(hemo::average_confusion({}));
}

TEST_CASE("average_confusion matches the entry-loop oracle on random matrices") {
  hemo::Rng rng(123);
  std::vector<hemo::ConfusionMatrix> cms;
  double sums[4] = {0, 0, 0, 0};
  for (int i = 0; i < 5; ++i) {
    hemo::ConfusionMatrix cm{static_cast<long long>(rng.bounded(100)),
                             static_cast<long long>(rng.bounded(100)),
                             static_cast<long long>(rng.bounded(100)),
                             static_cast<long long>(rng.bounded(100))};
    sums[0] += cm.tn;
    sums[1] += cm.fp;
    sums[2] += cm.fn;
    sums[3] += cm.tp;
    cms.push_back(cm);
  }
  const auto avg = hemo::average_confusion(cms);
  CHECK(avg(0, 0) == doctest::Approx(sums[0] / 5.0));
  CHECK(avg(0, 1) == doctest::Approx(sums[1] / 5.0));
  CHECK(avg(1, 0) == doctest::Approx(sums[2] / 5.0));
  CHECK(avg(1, 1) == doctest::Approx(sums[3] / 5.0));
}
