#pragma once

// Pure states whose reduced density matrix has two eigenvalue levels:
// generalized determinant D, entanglement of formation as a function of the
// levels, the generalized concurrence d and E(d).

#include <cmath>
#include <string>
#include <vector>

#include "genconc/states.hpp"

namespace genconc {

/// Two non-zero eigenvalue levels of A A^dagger with their multiplicities.
/// lambda2 = 0 represents the boundary where one level has vanished.
struct TwoLevelSpectrum {
  double lambda1 = 0.0;
  Index mult1 = 0;
  double lambda2 = 0.0;
  Index mult2 = 0;
};

inline void validate(const TwoLevelSpectrum& s) {
  if (s.lambda1 < 0.0 || s.lambda2 < 0.0 || s.lambda1 < s.lambda2) {
    fail(ErrorKind::Validation, "two-level spectrum: need lambda1 >= lambda2 >= 0");
  }
  const double trace = static_cast<double>(s.mult1) * s.lambda1 +
                       static_cast<double>(s.mult2) * s.lambda2;
  if (std::abs(trace - 1.0) > 1e-8) {
    fail(ErrorKind::Validation, "two-level spectrum: n*lambda1 + m*lambda2 = " +
                                    std::to_string(trace) + ", expected 1");
  }
}

inline constexpr double kDefaultClusterTol = 1e-8;

/// Clusters the eigenvalues of A A^dagger (gaps measured relative to the
/// largest eigenvalue).
///
/// - Two non-zero clusters: returned as they are; the zero cluster is dropped.
/// - One non-zero cluster plus a zero cluster: the zero cluster is the
///   lambda2 = 0 level, m = its size.
/// - One cluster filling the whole spectrum: split n = m when its size is
///   even, otherwise n = size, m = 0.
inline TwoLevelSpectrum spectrum_structure(const PureState& psi,
                                           double cluster_tol = kDefaultClusterTol) {
  const RealVector ev = herm_eig(reduced_density(psi)).eigenvalues;  // decreasing
  const double top = ev(0);
  const double gap = cluster_tol * top;

  struct Cluster {
    double sum = 0.0;
    Index count = 0;
  };
  std::vector<Cluster> clusters;
  Index zeros = 0;
  double prev = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    const double v = ev(i);
    if (v < gap) {
      ++zeros;
      continue;
    }
    if (clusters.empty() || prev - v > gap) clusters.push_back({});
    clusters.back().sum += v;
    ++clusters.back().count;
    prev = v;
  }
  if (clusters.size() > 2) {
    fail(ErrorKind::NotTwoLevel, "spectrum_structure: " + std::to_string(clusters.size()) +
                                     " distinct non-zero eigenvalue levels");
  }

  TwoLevelSpectrum s;
  const auto mean = [](const Cluster& c) { return c.sum / static_cast<double>(c.count); };
  if (clusters.size() == 2) {
    s = {mean(clusters[0]), clusters[0].count, mean(clusters[1]), clusters[1].count};
  } else if (zeros > 0) {
    s = {mean(clusters[0]), clusters[0].count, 0.0, zeros};
  } else if (clusters[0].count % 2 == 0) {
    const Index half = clusters[0].count / 2;
    s = {mean(clusters[0]), half, mean(clusters[0]), half};
  } else {
    s = {mean(clusters[0]), clusters[0].count, 0.0, 0};
  }
  return s;
}

/// D = lambda1^n * lambda2^m
inline double gen_determinant_D(const TwoLevelSpectrum& s) {
  return std::pow(s.lambda1, static_cast<double>(s.mult1)) *
         std::pow(s.lambda2, static_cast<double>(s.mult2));
}

inline double eof_two_level(const TwoLevelSpectrum& s) {
  const auto term = [](double lambda, Index mult) {
    return lambda > 0.0 ? -static_cast<double>(mult) * lambda * std::log2(lambda) : 0.0;
  };
  return term(s.lambda1, s.mult1) + term(s.lambda2, s.mult2);
}

/// d = 2n sqrt(lambda1 lambda2), defined only for equal multiplicities.
inline double gen_concurrence_d(const TwoLevelSpectrum& s) {
  if (s.mult1 != s.mult2) {
    fail(ErrorKind::Unsupported, "gen_concurrence_d: requires equal multiplicities (n = m)");
  }
  const double d = 2.0 * static_cast<double>(s.mult1) * std::sqrt(s.lambda1 * s.lambda2);
  return std::min(d, 1.0);
}

/// Binary entropy h(x) in bits.
inline double binary_entropy(double x) {
  const auto t = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return t(x) + t(1.0 - x);
}

/// E(d) = n * (-x log2 x - (1/n - x) log2(1/n - x)), x = (1 + sqrt(1-d^2)) / (2n).
inline double eof_from_d(double d, Index n) {
  if (n < 1) fail(ErrorKind::Domain, "eof_from_d: n must be at least 1");
  if (!(d >= -1e-12 && d <= 1.0 + 1e-12)) {
    fail(ErrorKind::Domain, "eof_from_d: d = " + std::to_string(d) + " outside [0, 1]");
  }
  d = std::clamp(d, 0.0, 1.0);
  const double nn = static_cast<double>(n);
  const double x = (1.0 + std::sqrt(1.0 - d * d)) / (2.0 * nn);
  const double rest = 1.0 / nn - x;
  const auto t = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return nn * (t(x) + t(rest));
}

/// Two-qubit concurrence C = 2 |a11 a22 - a12 a21|.
inline double wootters_C(const PureState& psi) {
  if (psi.n() != 2) fail(ErrorKind::Dimension, "wootters_C: requires N = 2");
  const auto& a = psi.amplitudes();
  return 2.0 * std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
}

}  // namespace genconc
