#pragma once

// Mixed states whose decompositions live on a d-computable family: the
// tau matrix, its Takagi values Lambda, d(rho) = Lambda_1 - sum_{i>1}
// Lambda_i, optimal and equal-concurrence decompositions, and a random
// search over decompositions as an independent check of the bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "genconc/concurrence.hpp"
#include "genconc/pmatrix.hpp"
#include "genconc/states.hpp"

namespace genconc {

/// Eigenvalues of rho at or below this count as numerical dust.
inline constexpr double kRankThreshold = 1e-10;
/// Maximum relative projection residual for an eigenvector of rho to count as
/// lying in the family subspace.
inline constexpr double kClassTolerance = 1e-8;

enum class LambdaMethod { TauTakagi, RhoPEig, RMatrix };

inline const char* to_string(LambdaMethod m) {
  switch (m) {
    case LambdaMethod::TauTakagi: return "tau-takagi";
    case LambdaMethod::RhoPEig: return "rho-p-eig";
    case LambdaMethod::RMatrix: return "R-matrix";
  }
  return "unknown";
}

struct LambdaSpectrum {
  RealVector lambdas;  // decreasing, non-negative
  LambdaMethod method = LambdaMethod::TauTakagi;
};

/// max_i |a_i - b_i| with the shorter spectrum padded by zeros.
inline double max_abs_difference(const LambdaSpectrum& a, const LambdaSpectrum& b) {
  const Index n = std::max(a.lambdas.size(), b.lambdas.size());
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double x = i < a.lambdas.size() ? a.lambdas(i) : 0.0;
    const double y = i < b.lambdas.size() ? b.lambdas(i) : 0.0;
    worst = std::max(worst, std::abs(x - y));
  }
  return worst;
}

namespace detail {

/// Square roots of the eigenvalues of rho p rho* p (or of R^2). Values below
/// dim * eps * largest are within the eigensolver's backward error of zero;
/// taking their square root would turn 1e-17 dust into 1e-8 noise, so they
/// are reported as exactly zero.
inline RealVector sqrt_above_floor(RealVector ev) {
  const double top = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;
  const double floor =
      static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() * top;
  for (Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > floor ? std::sqrt(ev(i)) : 0.0;
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  return ev;
}

}  // namespace detail

/// Columns v_i = sqrt(mu_i) * u_i for the eigenpairs of rho with mu_i above
/// the rank threshold, so <v_i|v_i> is the i-th eigenvalue.
inline ComplexMatrix support_vectors(const DensityMatrix& rho) {
  const auto eig = herm_eig(rho.matrix());
  Index rank = 0;
  while (rank < eig.eigenvalues.size() && eig.eigenvalues(rank) > kRankThreshold) ++rank;
  ComplexMatrix v(rho.dim(), rank);
  for (Index i = 0; i < rank; ++i) {
    v.col(i) = std::sqrt(eig.eigenvalues(i)) * eig.eigenvectors.col(i);
  }
  return v;
}

inline Index rank_of(const DensityMatrix& rho) { return support_vectors(rho).cols(); }

namespace detail {

inline void require_in_class(const ComplexMatrix& support, const BiformMatrix& p) {
  if (support.rows() != p.dim()) {
    fail(ErrorKind::Dimension, "density matrix dimension " + std::to_string(support.rows()) +
                                   " does not match p (" + std::to_string(p.dim()) + ")");
  }
  for (Index i = 0; i < support.cols(); ++i) {
    try {
      family_project(ComplexVector(support.col(i)), p.family, kClassTolerance);
    } catch (const NotInFamilyError& e) {
      fail(ErrorKind::NotInClass,
           "density matrix has support outside the " + std::string(to_string(p.family.family)) +
               " family: " + e.what());
    }
  }
}

inline ComplexMatrix class_support(const DensityMatrix& rho, const BiformMatrix& p) {
  ComplexMatrix v = support_vectors(rho);
  require_in_class(v, p);
  return v;
}

inline ComplexMatrix tau_from_support(const ComplexMatrix& v, const BiformMatrix& p) {
  const ComplexMatrix tau = v.adjoint() * p.p.cast<Complex>() * v.conjugate();
  return (tau + tau.transpose()) / 2.0;
}

}  // namespace detail

/// tau_ij = <<v_i|v_j>> over the eigenvectors of rho. Requires the support of
/// rho to lie in the family subspace of p.
inline ComplexMatrix tau_matrix(const DensityMatrix& rho, const BiformMatrix& p) {
  return detail::tau_from_support(detail::class_support(rho, p), p);
}

inline LambdaSpectrum lambda_spectrum(const DensityMatrix& rho, const BiformMatrix& p,
                                      LambdaMethod method) {
  if (rho.dim() != p.dim()) {
    fail(ErrorKind::Dimension, "lambda_spectrum: density matrix and p sizes differ");
  }
  LambdaSpectrum out;
  out.method = method;
  const ComplexMatrix pc = p.p.cast<Complex>();
  switch (method) {
    case LambdaMethod::TauTakagi: {
      out.lambdas = takagi(tau_matrix(rho, p)).lambdas;
      break;
    }
    case LambdaMethod::RhoPEig: {
      // X = rho p rho* p maps everything into range(rho). In the eigenbasis Q
      // of rho, Q^H X Q = [[X_ss, X_s0], [0, 0]], so the spectrum is eig(X_ss)
      // plus exact zeros. Deflating first matters: the complex Schur iteration
      // regularly fails to converge on the full matrix once N^2 = 64.
      const ComplexMatrix& r = rho.matrix();
      const ComplexMatrix x = r * pc * r.conjugate() * pc;
      const auto eig = herm_eig(r);
      Index rank = 0;
      while (rank < eig.eigenvalues.size() && eig.eigenvalues(rank) > kRankThreshold) ++rank;
      const ComplexMatrix qs = eig.eigenvectors.leftCols(rank);
      const ComplexMatrix block = qs.adjoint() * x * qs;
      Eigen::ComplexEigenSolver<ComplexMatrix> solver(block, false);
      if (solver.info() != Eigen::Success) {
        fail(ErrorKind::NumericalFailure, "rho-p-eig: eigensolver did not converge");
      }
      const ComplexVector& ev = solver.eigenvalues();
      const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
      RealVector re = RealVector::Zero(rho.dim());
      for (Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i).imag()) > 1e-8 * scale) {
          fail(ErrorKind::NumericalFailure,
               "rho-p-eig: eigenvalue with imaginary part " + std::to_string(ev(i).imag()));
        }
        re(i) = ev(i).real();
      }
      out.lambdas = detail::sqrt_above_floor(re);
      break;
    }
    case LambdaMethod::RMatrix: {
      const ComplexMatrix root = psd_sqrt(rho.matrix());
      const ComplexMatrix inner = root * pc * rho.matrix().conjugate() * pc * root;
      // eig(R) = sqrt(eig(R^2)); the floor is applied on the squared values.
      out.lambdas = detail::sqrt_above_floor(herm_eig(inner).eigenvalues);
      break;
    }
  }
  return out;
}

struct MixedConcurrenceResult {
  LambdaSpectrum spectrum;
  double raw = 0.0;      // Lambda_1 - sum_{i>1} Lambda_i, may be negative
  double clamped = 0.0;  // max(0, raw)
  double eof = 0.0;      // E(clamped) with n = 2^k, in bits
  /// raw < 0: eof is then only an upper-bound heuristic.
  bool caveat = false;
};

inline double concurrence_from_lambdas(const RealVector& lambdas) {
  if (lambdas.size() == 0) return 0.0;
  return lambdas(0) - lambdas.tail(lambdas.size() - 1).sum();
}

inline MixedConcurrenceResult mixed_concurrence(const DensityMatrix& rho, const BiformMatrix& p) {
  MixedConcurrenceResult out;
  out.spectrum = lambda_spectrum(rho, p, LambdaMethod::TauTakagi);
  out.raw = concurrence_from_lambdas(out.spectrum.lambdas);
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  out.caveat = out.raw < 0.0;
  out.eof = eof_from_d(out.clamped, Index{1} << p.family.k);
  return out;
}

/// Decomposition {w_i} with <<w_i|w_j>> = Lambda_i delta_ij, from the Takagi
/// factorization of tau: w_i = sum_j conj(U_ij) v_j.
inline Ensemble optimal_decomposition(const DensityMatrix& rho, const BiformMatrix& p) {
  const ComplexMatrix v = detail::class_support(rho, p);
  const auto tk = takagi(detail::tau_from_support(v, p));
  const ComplexMatrix w = v * tk.u.adjoint();
  Ensemble e;
  for (Index i = 0; i < w.cols(); ++i) e.states.emplace_back(w.col(i));
  return e;
}

/// Per-state concurrence |<<z|z>>| / <z|z>.
inline double state_concurrence(const ComplexVector& z, const BiformMatrix& p) {
  const double w = z.squaredNorm();
  if (w == 0.0) fail(ErrorKind::DegenerateInput, "state_concurrence: zero state");
  return std::abs(biform(z, p)) / w;
}

/// Decomposition in which every member has concurrence d(rho).
///
/// Starts from y_1 = w_1, y_j = i w_j, whose preconcurrences <<y_j|y_j>> are
/// (Lambda_1, -Lambda_2, ...) and sum to d(rho). With f_i = <<z_i|z_i>> -
/// d(rho) <z_i|z_i>, sum_i f_i = 0 is preserved by real rotations of pairs.
/// Each step picks two states with f of opposite sign and rotates them so the
/// one with smaller |f| lands exactly on zero (a quadratic in tan(theta) with
/// one positive root), so s - 1 steps suffice in exact arithmetic.
inline Ensemble equalized_decomposition(const DensityMatrix& rho, const BiformMatrix& p) {
  const ComplexMatrix v = detail::class_support(rho, p);
  const auto tk = takagi(detail::tau_from_support(v, p));
  const double d = concurrence_from_lambdas(tk.lambdas);
  if (d < 0.0) {
    fail(ErrorKind::Unsupported, "equalized_decomposition: d(rho) = " + std::to_string(d) +
                                     " is negative; no equal-concurrence decomposition");
  }
  ComplexMatrix z = v * tk.u.adjoint();
  for (Index j = 1; j < z.cols(); ++j) z.col(j) *= Complex(0.0, 1.0);
  const Index s = z.cols();

  const auto excess = [&](Index i) {
    const ComplexVector zi = z.col(i);
    return biform(zi, p).real() - d * zi.squaredNorm();
  };

  const int max_steps = 50 * static_cast<int>(s) + 10;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<double> f(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) f[static_cast<std::size_t>(i)] = excess(i);
    const auto worst = std::max_element(f.begin(), f.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (std::abs(*worst) <= 1e-14) break;
    const Index i = worst - f.begin();
    Index j = -1;
    for (Index c = 0; c < s; ++c) {
      if (f[static_cast<std::size_t>(c)] * f[static_cast<std::size_t>(i)] < 0.0 &&
          (j < 0 || std::abs(f[static_cast<std::size_t>(c)]) > std::abs(f[static_cast<std::size_t>(j)]))) {
        j = c;
      }
    }
    if (j < 0) break;  // all residual excess has one sign: rounding only
    const Index a = std::abs(f[static_cast<std::size_t>(i)]) <= std::abs(f[static_cast<std::size_t>(j)]) ? i : j;
    const Index b = a == i ? j : i;
    const ComplexVector za = z.col(a);
    const ComplexVector zb = z.col(b);
    const double m11 = f[static_cast<std::size_t>(a)];
    const double m22 = f[static_cast<std::size_t>(b)];
    const double m12 = biform_pair(za, zb, p).real() - d * za.dot(zb).real();
    // m22 t^2 + 2 m12 t + m11 = 0, m11 * m22 < 0: exactly one positive root.
    const double root = std::sqrt(m12 * m12 - m11 * m22);
    const double q = -(m12 + std::copysign(root, m12));
    const double t1 = q / m22;
    const double t2 = m11 / q;
    const double t = t1 > 0.0 ? t1 : t2;
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double sn = t * c;
    z.col(a) = c * za + sn * zb;
    z.col(b) = -sn * za + c * zb;
  }

  Ensemble e;
  for (Index i = 0; i < s; ++i) {
    const ComplexVector zi = z.col(i);
    if (std::abs(state_concurrence(zi, p) - d) > 1e-6) {
      fail(ErrorKind::NumericalFailure,
           "equalized_decomposition: member concurrence did not converge to d(rho)");
    }
    e.states.push_back(zi);
  }
  return e;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// sum_i |(V Y V^T)_ii| for Y = diag(Lambda_1, -Lambda_2, ..., -Lambda_s).
inline double average_concurrence(const ComplexMatrix& v, const RealVector& lambdas) {
  double total = 0.0;
  for (Index i = 0; i < v.rows(); ++i) {
    Complex pre = 0.0;
    for (Index j = 0; j < v.cols(); ++j) {
      const double y = j == 0 ? lambdas(0) : -lambdas(j);
      pre += v(i, j) * v(i, j) * y;
    }
    total += std::abs(pre);
  }
  return total;
}

/// Average concurrence of `trials` decompositions z_i = sum_j conj(V_ij) y_j
/// with V a Haar-random t x s isometry. Trial i draws from a generator seeded
/// by splitmix64(seed + i), so results do not depend on how trials are split
/// across worker threads.
inline std::vector<double> brute_force_averages(const DensityMatrix& rho, const BiformMatrix& p,
                                                std::size_t trials, Index t, std::uint64_t seed,
                                                unsigned workers = 0) {
  const ComplexMatrix v = detail::class_support(rho, p);
  const RealVector lambdas = takagi(detail::tau_from_support(v, p)).lambdas;
  const Index s = lambdas.size();
  if (t < s) {
    fail(ErrorKind::Dimension, "brute_force_min: t = " + std::to_string(t) +
                                   " is smaller than rank " + std::to_string(s));
  }
  if (trials == 0) fail(ErrorKind::Validation, "brute_force_min: need at least one trial");

  std::vector<double> out(trials);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
  const auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::mt19937_64 rng(detail::splitmix64(seed + i));
      out[i] = average_concurrence(haar_isometry(t, s, rng), lambdas);
    }
  };
  if (workers == 1) {
    run(0, trials);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t chunk = (trials + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        run(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

inline double brute_force_min(const DensityMatrix& rho, const BiformMatrix& p, std::size_t trials,
                              Index t, std::uint64_t seed) {
  const auto averages = brute_force_averages(rho, p, trials, t, seed);
  return *std::min_element(averages.begin(), averages.end());
}

/// Random in-class density matrix: `rank` random family states mixed with
/// weights drawn uniformly from [0.1, 1] and renormalized.
inline DensityMatrix random_class_density(const FamilySpec& spec, Index rank,
                                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<double> probs;
  std::vector<ComplexVector> states;
  double total = 0.0;
  for (Index i = 0; i < rank; ++i) {
    states.push_back(random_family_vector(spec, rng));
    probs.push_back(weight(rng));
    total += probs.back();
  }
  for (auto& q : probs) q /= total;
  return ensemble_density(from_weighted(probs, states));
}

}  // namespace genconc
