#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "genconc/linalg.hpp"

namespace genconc {

/// Bipartite pure state on C^N (x) C^N, stored as its N x N amplitude matrix
/// A with |psi> = sum_ij a_ij e_i (x) e_j. Construct with make_pure().
class PureState {
 public:
  Index n() const { return a_.rows(); }
  const ComplexMatrix& amplitudes() const { return a_; }

  /// Row-major vectorization, alpha = i*N + j (zero-based).
  ComplexVector vectorized() const {
    ComplexVector v(n() * n());
    for (Index i = 0; i < n(); ++i)
      for (Index j = 0; j < n(); ++j) v(i * n() + j) = a_(i, j);
    return v;
  }

 private:
  explicit PureState(ComplexMatrix a) : a_(std::move(a)) {}
  friend PureState make_pure(const ComplexMatrix& a, bool normalize);

  ComplexMatrix a_;
};

inline PureState make_pure(const ComplexMatrix& a, bool normalize) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    fail(ErrorKind::Dimension, "make_pure: amplitude matrix must be square and non-empty");
  }
  detail::require_finite(a, "make_pure");
  const double norm = a.norm();
  if (normalize) {
    if (norm == 0.0) fail(ErrorKind::DegenerateInput, "make_pure: zero amplitude matrix");
    return PureState(a / norm);
  }
  if (std::abs(norm * norm - 1.0) > 1e-10) {
    fail(ErrorKind::Validation, "make_pure: amplitudes are not normalized (sum |a_ij|^2 = " +
                                    std::to_string(norm * norm) + ")");
  }
  return PureState(a);
}

/// Inverse of PureState::vectorized for a length N^2 vector.
inline ComplexMatrix unvectorize(const ComplexVector& v) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size() || n == 0) {
    fail(ErrorKind::Dimension, "unvectorize: length is not a perfect square");
  }
  ComplexMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = v(i * n + j);
  return a;
}

/// rho_1 = A A^dagger
inline ComplexMatrix reduced_density(const PureState& psi) {
  return hermitian_part(psi.amplitudes() * psi.amplitudes().adjoint());
}

namespace detail {

inline double shannon_bits(const RealVector& probabilities) {
  double s = 0.0;
  for (Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities(i);
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

}  // namespace detail

/// Von Neumann entropy in bits of a unit-trace PSD Hermitian matrix.
inline double entropy(const ComplexMatrix& rho1) {
  detail::require_square(rho1, "entropy");
  const double trace = rho1.trace().real();
  if (std::abs(trace - 1.0) > 1e-8) {
    fail(ErrorKind::Validation, "entropy: trace is " + std::to_string(trace) + ", expected 1");
  }
  const auto eig = herm_eig(rho1);
  if (eig.eigenvalues.minCoeff() < -kNegativeDust ||
      eig.eigenvalues.maxCoeff() > 1.0 + kNegativeDust) {
    fail(ErrorKind::Validation, "entropy: spectrum outside [0, 1]");
  }
  return detail::shannon_bits(eig.eigenvalues.cwiseMax(0.0).cwiseMin(1.0));
}

inline double eof_pure(const PureState& psi) { return entropy(reduced_density(psi)); }

/// Validated N^2 x N^2 density matrix.
class DensityMatrix {
 public:
  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  friend DensityMatrix make_density(const ComplexMatrix& m);

  ComplexMatrix m_;
};

inline DensityMatrix make_density(const ComplexMatrix& m) {
  detail::require_square(m, "make_density");
  detail::require_finite(m, "make_density");
  if ((m - m.adjoint()).norm() > 1e-10 * std::max(1.0, m.norm())) {
    fail(ErrorKind::Validation, "make_density: matrix is not Hermitian");
  }
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > 1e-10) {
    fail(ErrorKind::Validation, "make_density: trace is " + std::to_string(trace));
  }
  const auto eig = herm_eig(m);
  if (eig.eigenvalues.minCoeff() < -kNegativeDust) {
    fail(ErrorKind::Validation, "make_density: matrix is not positive semidefinite");
  }
  return DensityMatrix(hermitian_part(m));
}

/// Decomposition rho = sum_i |w_i><w_i| into subnormalized states; the
/// weights are the squared norms.
struct Ensemble {
  std::vector<ComplexVector> states;

  std::size_t size() const { return states.size(); }
  Index dim() const { return states.empty() ? 0 : states.front().size(); }
};

inline std::vector<double> weights(const Ensemble& e) {
  std::vector<double> w;
  w.reserve(e.size());
  for (const auto& s : e.states) w.push_back(s.squaredNorm());
  return w;
}

/// Builds subnormalized states sqrt(p_i) * psi_i / |psi_i|.
inline Ensemble from_weighted(const std::vector<double>& probabilities,
                              const std::vector<ComplexVector>& states) {
  if (probabilities.size() != states.size()) {
    fail(ErrorKind::Dimension, "from_weighted: probability and state counts differ");
  }
  Ensemble e;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (probabilities[i] < 0.0) fail(ErrorKind::Validation, "from_weighted: negative probability");
    const double norm = states[i].norm();
    if (norm == 0.0) fail(ErrorKind::DegenerateInput, "from_weighted: zero state");
    e.states.push_back(states[i] * (std::sqrt(probabilities[i]) / norm));
  }
  return e;
}

inline DensityMatrix ensemble_density(const Ensemble& e) {
  if (e.states.empty()) fail(ErrorKind::Validation, "ensemble_density: empty ensemble");
  const Index dim = e.dim();
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  double total = 0.0;
  for (const auto& s : e.states) {
    if (s.size() != dim) fail(ErrorKind::Dimension, "ensemble_density: mixed state lengths");
    rho += s * s.adjoint();
    total += s.squaredNorm();
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorKind::Validation, "ensemble_density: weights sum to " + std::to_string(total));
  }
  // Rescale away the sub-1e-9 weight drift so the trace check downstream holds.
  return make_density(rho / total);
}

/// z_i = sum_j conj(V_ij) y_j for a t x s matrix V with orthonormal columns.
inline Ensemble transform_ensemble(const Ensemble& e, const ComplexMatrix& v) {
  if (static_cast<std::size_t>(v.cols()) != e.size()) {
    fail(ErrorKind::Dimension, "transform_ensemble: V must have one column per state");
  }
  if (v.rows() < v.cols()) fail(ErrorKind::Dimension, "transform_ensemble: V has fewer rows than columns");
  if (unitarity_residual(v) > 1e-10) {
    fail(ErrorKind::Validation, "transform_ensemble: columns of V are not orthonormal");
  }
  ComplexMatrix y(e.dim(), v.cols());
  for (Index j = 0; j < v.cols(); ++j) y.col(j) = e.states[static_cast<std::size_t>(j)];
  const ComplexMatrix z = y * v.adjoint();
  Ensemble out;
  for (Index i = 0; i < z.cols(); ++i) out.states.emplace_back(z.col(i));
  return out;
}

}  // namespace genconc
