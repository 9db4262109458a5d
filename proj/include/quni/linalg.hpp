#pragma once

#include "quni/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <limits>
#include <random>

namespace quni {

/// Relative threshold below which an eigenvalue of a PSD matrix counts as zero.
inline constexpr double kZeroThreshold = 1e-9;
/// Minimum ratio between the smallest retained and the largest discarded
/// eigenvalue for a dimension count to be certain.
inline constexpr double kCertaintyGap = 1e3;
/// Gap ratios are clamped to this value so reports stay finite.
inline constexpr double kGapCap = 1e16;

/// Outcome of splitting a nonnegative spectrum into a zero cluster and the rest.
struct ZeroCluster {
  std::size_t zeros = 0;
  double gap_ratio = kGapCap;
  double threshold = 0.0;
  bool certain = true;
};

/// Counts eigenvalues below `rel_tol` · max(max|λ|, `min_scale`) in an
/// ascending PSD spectrum.
inline ZeroCluster split_zero_cluster(const Eigen::VectorXd& ascending, double rel_tol = kZeroThreshold,
                                      double min_scale = 0.0) {
  ZeroCluster out;
  const auto n = static_cast<std::size_t>(ascending.size());
  if (n == 0) {
    return out;
  }
  const double scale = std::max(ascending.cwiseAbs().maxCoeff(), min_scale);
  if (scale == 0.0) {
    out.zeros = n;
    return out;
  }
  out.threshold = rel_tol * scale;
  while (out.zeros < n && ascending[static_cast<Eigen::Index>(out.zeros)] < out.threshold) {
    ++out.zeros;
  }
  const double floor = scale * std::numeric_limits<double>::epsilon();
  if (out.zeros < n) {
    const double largest_zero =
        out.zeros > 0 ? std::max(ascending[static_cast<Eigen::Index>(out.zeros - 1)], floor) : floor;
    out.gap_ratio = std::min(ascending[static_cast<Eigen::Index>(out.zeros)] / largest_zero, kGapCap);
  }
  out.certain = out.gap_ratio >= kCertaintyGap;
  return out;
}

inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericallyAmbiguous, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

/// Orthonormal basis of the column span of x (thin Householder Q).
inline Matrix orthonormalize(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  return qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
}

/// Complex Ginibre block with i.i.d. standard normal real and imaginary parts.
inline Matrix gaussian_block(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      x(i, j) = cplx(re, im);
    }
  }
  return x;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// diag(R) moved into Q.
inline Matrix haar_unitary(int dim, std::mt19937_64& rng) {
  const Matrix z = gaussian_block(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag == 0.0) ? cplx(1.0, 0.0) : d / mag;
  }
  return q;
}

/// Unitary eigendecomposition g = Q diag(λ) Q^† of a normal matrix.
/// Diagonal inputs are returned exactly with Q = I.
struct UnitaryEigen {
  Vector values;
  Matrix vectors;
};

inline UnitaryEigen unitary_eigen(const Matrix& g) {
  const Matrix off = g - Matrix(g.diagonal().asDiagonal());
  if (max_abs_entry(off) == 0.0) {
    return {g.diagonal(), Matrix::Identity(g.rows(), g.cols())};
  }
  Eigen::ComplexSchur<Matrix> schur(g);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericallyAmbiguous, "Schur decomposition did not converge");
  }
  return {schur.matrixT().diagonal(), schur.matrixU()};
}

}  // namespace quni
