#include "hemo/stats.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace hemo {

Matrix covariance(const Eigen::Ref<const Matrix>& features) {
  const Eigen::Index n = features.rows();
  if (n < 2) throw std::runtime_error("covariance: need at least 2 samples");
  const Matrix centered = features.rowwise() - features.colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov;
}

bool is_symmetric(const Eigen::Ref<const Matrix>& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    }
  }
  return true;
}

Vector eigen_spectrum(const Eigen::Ref<const Matrix>& m) {
  return jacobi_eigenvalues(m);
}

Matrix pearson_matrix(const Eigen::Ref<const Matrix>& features,
                      const Eigen::Ref<const Vector>& labels) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (labels.size() != n) {
    throw std::runtime_error("pearson_matrix: label length mismatch");
  }

  Matrix all(n, d + 1);
  all.leftCols(d) = features;
  all.col(d) = labels;

  const Matrix centered = all.rowwise() - all.colwise().mean();
  Vector norms(d + 1);
  for (Eigen::Index j = 0; j <= d; ++j) {
    norms[j] = centered.col(j).norm();
    if (norms[j] == 0.0) {
      throw std::runtime_error("pearson_matrix: constant column at index " +
                               std::to_string(j));
    }
  }

  Matrix corr(d + 1, d + 1);
  for (Eigen::Index i = 0; i <= d; ++i) {
    corr(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j <= d; ++j) {
      const double r =
          centered.col(i).dot(centered.col(j)) / (norms[i] * norms[j]);
      corr(i, j) = r;
      corr(j, i) = r;
    }
  }
  return corr;
}

std::vector<std::size_t> select_top_features(const Eigen::Ref<const Matrix>& corr,
                                             std::size_t k) {
  if (corr.rows() < 2 || corr.rows() != corr.cols()) {
    throw std::runtime_error("select_top_features: malformed correlation matrix");
  }
  const std::size_t d = static_cast<std::size_t>(corr.rows()) - 1;
  if (k < 1 || k > d) {
    throw std::runtime_error("select_top_features: k = " + std::to_string(k) +
                             " out of range [1, " + std::to_string(d) + "]");
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::Index label = static_cast<Eigen::Index>(d);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) {
                     const double a = std::abs(corr(static_cast<Eigen::Index>(lhs), label));
                     const double b = std::abs(corr(static_cast<Eigen::Index>(rhs), label));
                     if (a != b) return a > b;
                     return lhs < rhs;
                   });
  order.resize(k);
  return order;
}

void save_matrix_csv(const Eigen::Ref<const Matrix>& m, const std::string& path,
                     const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix_csv: cannot write '" + path + "'");
  out.precision(12);
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out << ',';
      out << header[c];
    }
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace hemo
