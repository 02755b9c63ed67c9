#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <doctest.h>

#include "hemo/csv.hpp"
#include "hemo/dataset.hpp"
#include "hemo/rng.hpp"
#include "hemo/synth.hpp"

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

const std::string& synthetic_csv_path() {
  static const std::string path = [] {
    const auto p =
        (std::filesystem::temp_directory_path() / "hemo_synth_dataio.csv")
            .string();
    hemo::write_synthetic_blood_csv(hemo::SynthConfig{}, p);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("load_csv reads the bundled surrogate with the reference counts") {
  const auto table = hemo::load_csv(synthetic_csv_path(), "label");
  CHECK(table.n_rows() == 915);
  CHECK(table.count_label(1) == 505);
  CHECK(table.count_label(0) == 410);
}

TEST_CASE("load_csv accepts a header-only file") {
  const auto path = write_temp("hemo_header_only.csv", "a,b,label\n");
  const auto table = hemo::load_csv(path, "label");
  CHECK(table.n_rows() == 0);
  CHECK(table.n_columns() == 3);
}

TEST_CASE("load_csv rejects a row of wrong arity, naming the row") {
  const auto path =
      write_temp("hemo_bad_arity.csv", "a,b,label\n1,2,0\n3,4\n");
  try {
    hemo::load_csv(path, "label");
    FAIL("expected arity error");
  } catch (const std::runtime_error& error) {
    CHECK(std::string(error.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("load_csv rejects non-binary labels") {
  const auto path = write_temp("hemo_bad_label.csv", "a,label\n1,2\n");
  CHECK_THROWS(hemo::load_csv(path, "label"));
  const auto missing = write_temp("hemo_missing_label.csv", "a,label\n1,\n");
  CHECK_THROWS(hemo::load_csv(missing, "label"));
}

TEST_CASE("load_csv preserves missing cells") {
  const auto path = write_temp("hemo_missing.csv", "a,b,label\n1,,0\nNA,4,1\n");
  const auto table = hemo::load_csv(path, "label");
  REQUIRE(table.n_rows() == 2);
  CHECK(table.rows[0][0].has_value());
  CHECK_FALSE(table.rows[0][1].has_value());
  CHECK_FALSE(table.rows[1][0].has_value());
}

TEST_CASE("select_columns projects the ten analytes") {
  const auto table = hemo::load_csv(synthetic_csv_path(), "label");
  const auto projected = hemo::select_columns(table, hemo::analyte_columns());
  CHECK(projected.n_columns() == 11);  // 10 analytes + label
  CHECK(projected.column_names.back() == "label");
  CHECK(projected.n_rows() == table.n_rows());
}

TEST_CASE("select_columns error cases") {
  const auto table = hemo::load_csv(synthetic_csv_path(), "label");
  CHECK_THROWS(hemo::select_columns(table, {}));
  CHECK_THROWS(hemo::select_columns(table, {"ALT", "ALT"}));
  CHECK_THROWS(hemo::select_columns(table, {"NoSuchColumn"}));
}

TEST_CASE("impute_and_normalize maps {2,4,6} to {0,0.5,1}") {
  const auto path = write_temp("hemo_minmax.csv", "x,label\n2,0\n4,1\n6,0\n");
  const auto dataset = hemo::impute_and_normalize(hemo::load_csv(path, "label"));
  CHECK(dataset.features(0, 0) == doctest::Approx(0.0));
  CHECK(dataset.features(1, 0) == doctest::Approx(0.5));
  CHECK(dataset.features(2, 0) == doctest::Approx(1.0));
  CHECK(dataset.norm_stats[0].min == 2.0);
  CHECK(dataset.norm_stats[0].max == 6.0);
}

TEST_CASE("impute_and_normalize fills the median into missing cells") {
  const auto path = write_temp("hemo_median.csv", "x,label\n1,0\n,1\n3,0\n");
  const auto dataset = hemo::impute_and_normalize(hemo::load_csv(path, "label"));
  // median of {1,3} is 2, normalized to 0.5
  CHECK(dataset.features(1, 0) == doctest::Approx(0.5));
  CHECK(dataset.features(0, 0) == doctest::Approx(0.0));
  CHECK(dataset.features(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("impute_and_normalize rejects degenerate columns") {
  const auto constant = write_temp("hemo_const.csv", "x,label\n5,0\n5,1\n5,0\n");
  CHECK_THROWS(hemo::impute_and_normalize(hemo::load_csv(constant, "label")));
  const auto all_missing = write_temp("hemo_allmiss.csv", "x,label\n,0\n,1\n");
  CHECK_THROWS(hemo::impute_and_normalize(hemo::load_csv(all_missing, "label")));
  const auto one_row = write_temp("hemo_onerow.csv", "x,label\n1,0\n");
  CHECK_THROWS(hemo::impute_and_normalize(hemo::load_csv(one_row, "label")));
}

TEST_CASE("make_folds deals 915 samples into five folds of 183") {
  const auto plan = hemo::make_folds(915, 5, 7);
  REQUIRE(plan.folds.size() == 5);
  for (const auto& fold : plan.folds) CHECK(fold.size() == 183);
}

TEST_CASE("make_folds with n == k yields singletons") {
  const auto plan = hemo::make_folds(5, 5, 123);
  for (const auto& fold : plan.folds) CHECK(fold.size() == 1);
}

TEST_CASE("make_folds is deterministic and validates inputs") {
  const auto a = hemo::make_folds(100, 5, 99);
  const auto b = hemo::make_folds(100, 5, 99);
  CHECK(a.folds == b.folds);
  CHECK_THROWS(hemo::make_folds(3, 5, 0));
  CHECK_THROWS(hemo::make_folds(10, 1, 0));
}

TEST_CASE("fold plans partition the index set exactly") {
  hemo::Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 10 + rng.bounded(500);
    const int k = 2 + static_cast<int>(rng.bounded(8));
    if (static_cast<std::size_t>(k) > n) continue;
    const auto plan = hemo::make_folds(n, k, rng.next_u64());

    std::set<std::size_t> seen;
    std::size_t min_size = n, max_size = 0;
    for (const auto& fold : plan.folds) {
      min_size = std::min(min_size, fold.size());
      max_size = std::max(max_size, fold.size());
      for (const std::size_t i : fold) {
        CHECK(i < n);
        CHECK(seen.insert(i).second);  // disjoint
      }
    }
    CHECK(seen.size() == n);           // covering
    CHECK(max_size - min_size <= 1);   // balanced
  }
}

TEST_CASE("train_indices excludes exactly the held-out fold") {
  const auto plan = hemo::make_folds(23, 4, 5);
  for (std::size_t f = 0; f < 4; ++f) {
    const auto train = plan.train_indices(f);
    std::set<std::size_t> train_set(train.begin(), train.end());
    for (const std::size_t i : plan.test_indices(f)) {
      CHECK(train_set.count(i) == 0);
    }
    CHECK(train.size() + plan.test_indices(f).size() == 23);
  }
}

TEST_CASE("normalization round-trips and is idempotent on recorded stats") {
  const auto dataset = hemo::impute_and_normalize(
      hemo::select_columns(hemo::load_csv(synthetic_csv_path(), "label"),
                           hemo::analyte_columns()));
  const hemo::Matrix raw =
      hemo::invert_norm_stats(dataset.features, dataset.norm_stats);
  const hemo::Matrix renormalized =
      hemo::apply_norm_stats(raw, dataset.norm_stats);
  CHECK((renormalized - dataset.features).cwiseAbs().maxCoeff() < 1e-12);

  // Normalizing an already-[0,1] column with stats {0,1} reproduces it.
  std::vector<hemo::NormStats> unit_stats(
      static_cast<std::size_t>(dataset.n_features()), {0.0, 1.0});
  const hemo::Matrix again =
      hemo::apply_norm_stats(dataset.features, unit_stats);
  CHECK((again - dataset.features).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dataset and fold plan serialize byte-identically across runs") {
  const auto load = [] {
    return hemo::impute_and_normalize(
        hemo::select_columns(hemo::load_csv(synthetic_csv_path(), "label"),
                             hemo::analyte_columns()));
  };
  const auto a = hemo::dataset_to_json(load());
  const auto b = hemo::dataset_to_json(load());
  CHECK(a == b);

  const auto plan_a = hemo::fold_plan_to_json(hemo::make_folds(915, 5, 42));
  const auto plan_b = hemo::fold_plan_to_json(hemo::make_folds(915, 5, 42));
  CHECK(plan_a == plan_b);

  // Round-trip.
  const auto dataset = load();
  const auto reparsed = hemo::dataset_from_json(a);
  CHECK(reparsed.feature_names == dataset.feature_names);
  CHECK((reparsed.features - dataset.features).cwiseAbs().maxCoeff() == 0.0);
  const auto plan = hemo::make_folds(915, 5, 42);
  CHECK(hemo::fold_plan_from_json(plan_a).folds == plan.folds);
}

TEST_CASE("synthetic generator is byte-deterministic") {
  const auto p1 = (std::filesystem::temp_directory_path() / "hemo_synth_a.csv").string();
  const auto p2 = (std::filesystem::temp_directory_path() / "hemo_synth_b.csv").string();
  hemo::write_synthetic_blood_csv(hemo::SynthConfig{}, p1);
  hemo::write_synthetic_blood_csv(hemo::SynthConfig{}, p2);
  std::ifstream f1(p1), f2(p2);
  const std::string s1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  CHECK(!s1.empty());
}
