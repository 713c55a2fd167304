#pragma once

// Dense complex linear algebra used throughout genconc: Hermitian
// eigendecomposition, PSD square roots, Takagi factorization of complex
// symmetric matrices and Haar-random unitaries.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genconc/errors.hpp"

namespace genconc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Threshold under which a negative eigenvalue is treated as rounding dust,
/// relative to max(1, spectral scale).
inline constexpr double kNegativeDust = 1e-10;

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorKind::Dimension, std::string(what) + ": expected a non-empty square matrix, got " +
                                   std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    fail(ErrorKind::Validation, std::string(what) + ": matrix has non-finite entries");
  }
}

/// Indices that order `values` decreasingly; ties keep their original order.
inline std::vector<Index> decreasing_order(const RealVector& values) {
  std::vector<Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });
  return idx;
}

}  // namespace detail

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) / 2.0;
}

/// ||U^H U - I||_F
inline double unitarity_residual(const ComplexMatrix& u) {
  return (u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm();
}

struct EigDecomposition {
  RealVector eigenvalues;     // decreasing
  ComplexMatrix eigenvectors; // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (h + h^H)/2 before solving.
inline EigDecomposition herm_eig(const ComplexMatrix& h) {
  detail::require_square(h, "herm_eig");
  detail::require_finite(h, "herm_eig");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "herm_eig: eigensolver did not converge");
  }
  const RealVector& ascending = solver.eigenvalues();
  const auto order = detail::decreasing_order(ascending);
  EigDecomposition out;
  out.eigenvalues.resize(ascending.size());
  out.eigenvectors.resize(h.rows(), h.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto k = static_cast<Index>(i);
    out.eigenvalues(k) = ascending(order[i]);
    out.eigenvectors.col(k) = solver.eigenvectors().col(order[i]);
  }
  return out;
}

/// Hermitian PSD square root. Eigenvalues down to -1e-10 (relative to the
/// spectral scale) are clamped to zero; anything more negative is rejected.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& h) {
  const auto eig = herm_eig(h);
  const double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
  if (eig.eigenvalues.minCoeff() < -kNegativeDust * scale) {
    fail(ErrorKind::Validation, "psd_sqrt: matrix is not positive semidefinite (eigenvalue " +
                                    std::to_string(eig.eigenvalues.minCoeff()) + ")");
  }
  const RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix s =
      eig.eigenvectors * roots.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
  return hermitian_part(s);
}

struct TakagiFactorization {
  ComplexMatrix u;     // unitary, u * tau * u^T = diag(lambdas)
  RealVector lambdas;  // non-negative, decreasing
};

/// Takagi factorization of a complex symmetric matrix.
///
/// Works on the real symmetric embedding
///
///     M = [ Re(tau)   Im(tau) ]
///         [ Im(tau)  -Re(tau) ]
///
/// whose spectrum is {+sigma_i, -sigma_i}. A unit eigenvector [x; y] for
/// +sigma satisfies tau * conj(x + iy) = sigma * (x + iy), so the columns
/// x + iy form W with tau = W diag(sigma) W^T. Any real orthonormal basis of
/// a +sigma eigenspace stays orthonormal after the complex map, which takes
/// care of repeated singular values. Only the null block needs completing.
inline TakagiFactorization takagi(const ComplexMatrix& tau) {
  detail::require_square(tau, "takagi");
  detail::require_finite(tau, "takagi");
  const Index n = tau.rows();
  const double norm = tau.norm();
  if ((tau - tau.transpose()).norm() > 1e-10 * std::max(1.0, norm)) {
    fail(ErrorKind::Validation, "takagi: input is not complex symmetric");
  }
  TakagiFactorization out;
  out.lambdas = RealVector::Zero(n);
  if (norm == 0.0) {
    out.u = ComplexMatrix::Identity(n, n);
    return out;
  }
  const ComplexMatrix sym = (tau + tau.transpose()) / 2.0;

  RealMatrix embed(2 * n, 2 * n);
  embed.topLeftCorner(n, n) = sym.real();
  embed.topRightCorner(n, n) = sym.imag();
  embed.bottomLeftCorner(n, n) = sym.imag();
  embed.bottomRightCorner(n, n) = -sym.real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(embed);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "takagi: eigensolver did not converge");
  }
  const RealVector& ev = solver.eigenvalues();  // ascending
  const double top = ev(2 * n - 1);
  const double cut = 128.0 * std::numeric_limits<double>::epsilon() * top;

  ComplexMatrix w(n, n);
  Index positive = 0;
  for (Index i = 0; i < n; ++i) {
    const Index src = 2 * n - 1 - i;
    if (ev(src) <= cut) break;
    const RealVector v = solver.eigenvectors().col(src);
    for (Index r = 0; r < n; ++r) w(r, i) = Complex(v(r), v(n + r));
    out.lambdas(i) = ev(src);
    ++positive;
  }
  if (positive < n) {
    // Null block: any orthonormal basis of the complement of the positive
    // columns satisfies tau * conj(u) = 0.
    const ComplexMatrix wp = w.leftCols(positive);
    const ComplexMatrix projector = ComplexMatrix::Identity(n, n) - wp * wp.adjoint();
    const auto comp = herm_eig(projector);
    w.rightCols(n - positive) = comp.eigenvectors.leftCols(n - positive);
  }
  // Symmetric (Lowdin) re-orthonormalization: removes the O(eps/gap) drift
  // that near-null columns can pick up.
  Eigen::JacobiSVD<ComplexMatrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  w = svd.matrixU() * svd.matrixV().adjoint();

  out.u = w.adjoint();
  const ComplexMatrix diag = out.u * tau * out.u.transpose();
  const double residual =
      (diag - ComplexMatrix(out.lambdas.cast<Complex>().asDiagonal())).norm();
  if (residual > 1e-9 * std::max(1.0, norm)) {
    fail(ErrorKind::NumericalFailure,
         "takagi: factorization residual " + std::to_string(residual) + " above tolerance");
  }
  return out;
}

namespace detail {

inline ComplexMatrix complex_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix z(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) z(r, c) = Complex(normal(rng), normal(rng));
  return z;
}

}  // namespace detail

/// Haar-distributed rows x cols isometry (the first `cols` columns of a Haar
/// unitary): QR of a complex Gaussian matrix with R's diagonal phases moved
/// into Q.
inline ComplexMatrix haar_isometry(Index rows, Index cols, std::mt19937_64& rng) {
  if (rows < 1 || cols < 1 || cols > rows) {
    fail(ErrorKind::Dimension, "haar_isometry: need 1 <= cols <= rows");
  }
  const ComplexMatrix z = detail::complex_gaussian(rows, cols, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix& r = qr.matrixQR();
  for (Index c = 0; c < cols; ++c) {
    const Complex d = r(c, c);
    const double mag = std::abs(d);
    q.col(c) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

inline ComplexMatrix haar_unitary(Index n, std::mt19937_64& rng) {
  if (n < 1) fail(ErrorKind::Dimension, "haar_unitary: n must be at least 1");
  return haar_isometry(n, n, rng);
}

}  // namespace genconc
