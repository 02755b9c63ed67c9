#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hemo/dataset.hpp"

namespace hemo {

/// Sample covariance with denominator n-1, symmetrized exactly.
/// Throws if fewer than 2 samples.
Matrix covariance(const Eigen::Ref<const Matrix>& features);

/// True when max_{i!=j} |m(i,j) - m(j,i)| <= tol.
bool is_symmetric(const Eigen::Ref<const Matrix>& m, double tol = 1e-12);

/// All eigenvalues of a symmetric matrix, sorted descending, via cyclic
/// Jacobi rotations. Sweeps run until the largest off-diagonal magnitude
/// drops below 1e-12 (relative to unit scale); throws after 100 sweeps
/// without convergence, or if the input is not symmetric.
///
/// Templated on the Eigen matrix type so it applies to blocks and maps as
/// well as plain matrices.
template <typename Derived>
Vector jacobi_eigenvalues(const Eigen::MatrixBase<Derived>& input);

/// jacobi_eigenvalues of a covariance-like matrix (the Fig. 2 analogue).
Vector eigen_spectrum(const Eigen::Ref<const Matrix>& m);

/// (d+1) x (d+1) Pearson correlation over the feature columns plus the label
/// column (label last). Diagonal is exactly 1. Throws on a constant column.
Matrix pearson_matrix(const Eigen::Ref<const Matrix>& features,
                      const Eigen::Ref<const Vector>& labels);

/// Indices of the k features with the largest |correlation with the label|,
/// ordered by that magnitude descending, ties broken toward the lower index.
/// `corr` is the pearson_matrix output (label in the last row/column).
std::vector<std::size_t> select_top_features(const Eigen::Ref<const Matrix>& corr,
                                             std::size_t k);

/// Writes a matrix as CSV (for plotting eigenvalue/correlation figures).
void save_matrix_csv(const Eigen::Ref<const Matrix>& m, const std::string& path,
                     const std::vector<std::string>& header = {});

// --- implementation ---

template <typename Derived>
Vector jacobi_eigenvalues(const Eigen::MatrixBase<Derived>& input) {
  Matrix a = input;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi: matrix not square");
  if (!is_symmetric(a, 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("jacobi: matrix not symmetric");
  }

  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        off = std::max(off, std::abs(a(p, q)));
      }
    }
    if (off < tol) {
      Vector values = a.diagonal();
      std::sort(values.data(), values.data() + n, std::greater<double>());
      return values;
    }

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < tol) continue;

        // Rotation angle zeroing a(p,q); standard stable formulas.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index i = 0; i < n; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double api = a(p, i);
          const double aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  throw std::runtime_error("jacobi: no convergence after 100 sweeps");
}

}  // namespace hemo
