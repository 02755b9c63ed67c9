#include <algorithm>
#include <numeric>

#include <doctest.h>

#include "hemo/rng.hpp"
#include "hemo/stats.hpp"

namespace {

hemo::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, hemo::Rng& rng) {
  hemo::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

// Brute-force double-loop covariance, independent of the Eigen path.
hemo::Matrix covariance_oracle(const hemo::Matrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  hemo::Matrix cov(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    double mean_a = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean_a += x(i, a);
    mean_a /= static_cast<double>(n);
    for (Eigen::Index b = 0; b < d; ++b) {
      double mean_b = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) mean_b += x(i, b);
      mean_b /= static_cast<double>(n);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        sum += (x(i, a) - mean_a) * (x(i, b) - mean_b);
      }
      cov(a, b) = sum / static_cast<double>(n - 1);
    }
  }
  return cov;
}

// Textbook Pearson r for two columns.
double pearson_oracle(const hemo::Vector& a, const hemo::Vector& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  double num = 0.0, da = 0.0, db = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace

TEST_CASE("covariance diagonal is the sample variance") {
  hemo::Matrix x(4, 1);
  x << 1.0, 2.0, 4.0, 7.0;
  const auto cov = hemo::covariance(x);
  const double mean = 3.5;
  const double expected = ((1 - mean) * (1 - mean) + (2 - mean) * (2 - mean) +
                           (4 - mean) * (4 - mean) + (7 - mean) * (7 - mean)) /
                          3.0;
  CHECK(cov(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("perfectly correlated columns give sigma_a * sigma_b off-diagonal") {
  hemo::Matrix x(5, 2);
  for (int i = 0; i < 5; ++i) {
    x(i, 0) = i;
    x(i, 1) = 3.0 * i + 2.0;  // correlation exactly +1
  }
  const auto cov = hemo::covariance(x);
  const double sd0 = std::sqrt(cov(0, 0));
  const double sd1 = std::sqrt(cov(1, 1));
  CHECK(cov(0, 1) == doctest::Approx(sd0 * sd1).epsilon(1e-12));
}

TEST_CASE("covariance matches the double-loop oracle within 1e-12") {
  hemo::Rng rng(11);
  const auto x = random_matrix(4, 3, rng);
  const auto cov = hemo::covariance(x);
  const auto expected = covariance_oracle(x);
  CHECK((cov - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(hemo::is_symmetric(cov));
  CHECK_THROWS(hemo::covariance(x.topRows(1)));
}

TEST_CASE("eigen_spectrum of the identity is all ones") {
  const auto values = hemo::eigen_spectrum(hemo::Matrix::Identity(10, 10));
  REQUIRE(values.size() == 10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    CHECK(values[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("eigen_spectrum of diag(3,1) is {3,1}") {
  hemo::Matrix m = hemo::Matrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  const auto values = hemo::eigen_spectrum(m);
  CHECK(values[0] == doctest::Approx(3.0));
  CHECK(values[1] == doctest::Approx(1.0));
}

TEST_CASE("eigen_spectrum preserves trace and Frobenius norm") {
  hemo::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.bounded(7));
    hemo::Matrix m = random_matrix(n, n, rng);
    m = (0.5 * (m + m.transpose())).eval();
    const auto values = hemo::eigen_spectrum(m);

    CHECK(values.sum() == doctest::Approx(m.trace()).epsilon(1e-10));
    CHECK(values.squaredNorm() ==
          doctest::Approx(m.squaredNorm()).epsilon(1e-10));
    CHECK(std::is_sorted(values.data(), values.data() + values.size(),
                         std::greater<double>()));
  }
}

TEST_CASE("eigen_spectrum of a covariance matrix is non-negative") {
  hemo::Rng rng(23);
  const auto x = random_matrix(40, 6, rng);
  const auto values = hemo::eigen_spectrum(hemo::covariance(x));
  for (Eigen::Index i = 0; i < values.size(); ++i) CHECK(values[i] >= -1e-10);
}

TEST_CASE("eigen_spectrum rejects a non-symmetric input") {
  hemo::Matrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS(hemo::eigen_spectrum(m));
}

TEST_CASE("pearson_matrix diagonal, self-correlation and antisymmetry") {
  hemo::Rng rng(31);
  hemo::Matrix x(6, 2);
  for (Eigen::Index i = 0; i < 6; ++i) {
    x(i, 0) = rng.uniform(0.0, 1.0);
    x(i, 1) = -x(i, 0);  // exact negation
  }
  hemo::Vector labels(6);
  labels << 0, 1, 0, 1, 1, 0;
  const auto corr = hemo::pearson_matrix(x, labels);

  REQUIRE(corr.rows() == 3);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(corr(i, i) == 1.0);
  CHECK(corr(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));

  // Every entry within [-1, 1] up to rounding.
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(corr(i, j) <= 1.0 + 1e-12);
      CHECK(corr(i, j) >= -1.0 - 1e-12);
    }
  }
}

TEST_CASE("pearson_matrix matches the textbook formula on a 6-sample table") {
  hemo::Rng rng(37);
  const auto x = random_matrix(6, 3, rng);
  hemo::Vector labels(6);
  labels << 1, 0, 1, 1, 0, 0;
  const auto corr = hemo::pearson_matrix(x, labels);
  for (Eigen::Index a = 0; a < 3; ++a) {
    for (Eigen::Index b = a + 1; b < 3; ++b) {
      CHECK(corr(a, b) ==
            doctest::Approx(pearson_oracle(x.col(a), x.col(b))).epsilon(1e-12));
    }
    CHECK(corr(a, 3) ==
          doctest::Approx(pearson_oracle(x.col(a), labels)).epsilon(1e-12));
  }
}

TEST_CASE("pearson_matrix rejects constant columns") {
  hemo::Matrix x(4, 1);
  x << 2.0, 2.0, 2.0, 2.0;
  hemo::Vector labels(4);
  labels << 0, 1, 0, 1;
  CHECK_THROWS(hemo::pearson_matrix(x, labels));
}

TEST_CASE("select_top_features ranks by |corr with label| with index ties") {
  // Hand-built correlation matrix: 3 features + label.
  hemo::Matrix corr = hemo::Matrix::Identity(4, 4);
  corr(0, 3) = corr(3, 0) = -0.8;
  corr(1, 3) = corr(3, 1) = 0.8;   // same magnitude as feature 0
  corr(2, 3) = corr(3, 2) = 0.3;

  const auto top2 = hemo::select_top_features(corr, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0] == 0);  // tie with feature 1 broken toward the lower index
  CHECK(top2[1] == 1);

  const auto all = hemo::select_top_features(corr, 3);
  CHECK(all == std::vector<std::size_t>{0, 1, 2});

  CHECK_THROWS(hemo::select_top_features(corr, 0));
  CHECK_THROWS(hemo::select_top_features(corr, 4));
}

TEST_CASE("select_top_features is permutation-equivariant") {
  hemo::Rng rng(41);
  const auto x = random_matrix(30, 5, rng);
  hemo::Vector labels(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    labels[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
  }
  const auto corr = hemo::pearson_matrix(x, labels);
  const auto top = hemo::select_top_features(corr, 3);

  // Permute the feature columns and re-run.
  std::vector<Eigen::Index> perm = {3, 0, 4, 1, 2};  // new position of old cols
  hemo::Matrix xp(30, 5);
  for (Eigen::Index j = 0; j < 5; ++j) xp.col(perm[static_cast<std::size_t>(j)]) = x.col(j);
  const auto corr_p = hemo::pearson_matrix(xp, labels);
  const auto top_p = hemo::select_top_features(corr_p, 3);

  std::vector<std::size_t> expected;
  for (const std::size_t i : top) {
    expected.push_back(static_cast<std::size_t>(perm[i]));
  }
  CHECK(top_p == expected);
}
