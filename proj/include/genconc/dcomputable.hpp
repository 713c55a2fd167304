#pragma once

// The two d-computable pure-state families:
//
//   * the 4x4 "sym" family with zero diagonal,
//       A = [[0, b, a1, b1], [-b, 0, c1, d1], [a1, c1, 0, -e], [b1, d1, e, 0]],
//     whose generalized concurrence is 4|b1 c1 - a1 d1 + b e|;
//
//   * the recursive family A_{2^{k+1}} built from A_2 = [[a, -c], [c, d]] by
//       A_{2^{l+1}} = [[b_l J_{2^l}, A_{2^l}], [s_l A_{2^l}^T, c_l J_{2^l}^T]],
//     s_l = (-1)^{l(l+1)/2}, for l = 1..k.
//
// For both, A A^dagger has two eigenvalue levels of multiplicity N/2 given by
// lambda^2 - ||A|| lambda + |[A]|^2 = 0.

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "genconc/concurrence.hpp"
#include "genconc/states.hpp"

namespace genconc {

enum class Family { Sym, Recursive };

inline const char* to_string(Family f) { return f == Family::Sym ? "sym" : "recursive"; }

/// Identifies one family subspace: the sym family (always k = 1, N = 4) or
/// the recursive family at level k (N = 2^{k+1}).
struct FamilySpec {
  Family family = Family::Recursive;
  int k = 1;

  Index n() const { return family == Family::Sym ? 4 : Index{1} << (k + 1); }
  Index param_count() const { return family == Family::Sym ? 6 : 3 + 2 * k; }

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

inline void validate(const FamilySpec& spec) {
  if (spec.family == Family::Sym && spec.k != 1) {
    fail(ErrorKind::Validation, "sym family is only defined for k = 1");
  }
  if (spec.k < 1) fail(ErrorKind::Domain, "family level k must be at least 1");
}

// ---------------------------------------------------------------------------
// Sym family

struct SymFamilyParams {
  Complex a1, b1, c1, d1, b, e;
};

inline ComplexVector to_vector(const SymFamilyParams& p) {
  ComplexVector v(6);
  v << p.a1, p.b1, p.c1, p.d1, p.b, p.e;
  return v;
}

inline SymFamilyParams sym_params_from_vector(const ComplexVector& v) {
  if (v.size() != 6) fail(ErrorKind::Dimension, "sym family takes 6 parameters");
  return {v(0), v(1), v(2), v(3), v(4), v(5)};
}

/// tr(A A^dagger) for the sym family: every parameter appears twice.
inline double sym_trace(const SymFamilyParams& p) { return 2.0 * to_vector(p).squaredNorm(); }

inline Complex sym_bracket(const SymFamilyParams& p) {
  return p.b1 * p.c1 - p.a1 * p.d1 + p.b * p.e;
}

inline ComplexMatrix build_A4_sym(const SymFamilyParams& p) {
  if (to_vector(p).squaredNorm() == 0.0) {
    fail(ErrorKind::DegenerateInput, "build_A4_sym: all parameters are zero");
  }
  ComplexMatrix a(4, 4);
  // clang-format off
  a << 0.0,   p.b,   p.a1,  p.b1,
       -p.b,  0.0,   p.c1,  p.d1,
       p.a1,  p.c1,  0.0,   -p.e,
       p.b1,  p.d1,  p.e,   0.0;
  // clang-format on
  return a;
}

inline SymFamilyParams normalized(const SymFamilyParams& p) {
  const double t = sym_trace(p);
  if (t == 0.0) fail(ErrorKind::DegenerateInput, "normalized: all parameters are zero");
  return sym_params_from_vector(to_vector(p) / std::sqrt(t));
}

/// d = 4 |b1 c1 - a1 d1 + b e| for normalized parameters.
inline double d_sym_closed(const SymFamilyParams& p) {
  if (std::abs(sym_trace(p) - 1.0) > 1e-10) {
    fail(ErrorKind::Validation, "d_sym_closed: parameters are not normalized");
  }
  return 4.0 * std::abs(sym_bracket(p));
}

// ---------------------------------------------------------------------------
// Recursive family

struct DComputableParams {
  int k = 1;
  Complex a, c, d;
  std::vector<std::pair<Complex, Complex>> ladder;  // (b_l, c_l), l = 1..k
};

inline void validate(const DComputableParams& p) {
  if (p.k < 1) fail(ErrorKind::Domain, "d-computable parameters need k >= 1");
  if (p.ladder.size() != static_cast<std::size_t>(p.k)) {
    fail(ErrorKind::Validation, "ladder length " + std::to_string(p.ladder.size()) +
                                    " does not match k = " + std::to_string(p.k));
  }
}

/// Parameter vector layout (a, c, d, b_1, c_1, ..., b_k, c_k).
inline ComplexVector to_vector(const DComputableParams& p) {
  validate(p);
  ComplexVector v(3 + 2 * p.k);
  v(0) = p.a;
  v(1) = p.c;
  v(2) = p.d;
  for (int l = 0; l < p.k; ++l) {
    v(3 + 2 * l) = p.ladder[static_cast<std::size_t>(l)].first;
    v(4 + 2 * l) = p.ladder[static_cast<std::size_t>(l)].second;
  }
  return v;
}

inline DComputableParams params_from_vector(int k, const ComplexVector& v) {
  if (k < 1 || v.size() != 3 + 2 * k) {
    fail(ErrorKind::Dimension, "recursive family at k=" + std::to_string(k) + " takes " +
                                   std::to_string(3 + 2 * k) + " parameters");
  }
  DComputableParams p;
  p.k = k;
  p.a = v(0);
  p.c = v(1);
  p.d = v(2);
  for (int l = 0; l < k; ++l) p.ladder.emplace_back(v(3 + 2 * l), v(4 + 2 * l));
  return p;
}

/// (-1)^{l(l+1)/2}
inline double ladder_sign(int l) { return ((l * (l + 1) / 2) % 2 == 0) ? 1.0 : -1.0; }

/// J_{2^k}: J_2 = [[0, 1], [-1, 0]], J_4 = antidiag(1, 1, -1, -1), and for
/// 2^k >= 8, J_{2^k} = [[0, J_{2^{k-1}}], [(-1)^{k(k+1)/2} J_{2^{k-1}}^T, 0]].
/// J_4 is fixed rather than derived: the recursion applied to J_2 would give
/// antidiag(1, -1, 1, -1), which breaks the two-level property from A_8 on.
inline RealMatrix build_J(int k) {
  if (k < 1) fail(ErrorKind::Domain, "build_J: k must be at least 1");
  RealMatrix j(2, 2);
  j << 0, 1, -1, 0;
  if (k == 1) return j;
  j = RealMatrix::Zero(4, 4);
  j(0, 3) = 1;
  j(1, 2) = 1;
  j(2, 1) = -1;
  j(3, 0) = -1;
  for (int level = 3; level <= k; ++level) {
    const Index h = j.rows();
    RealMatrix next = RealMatrix::Zero(2 * h, 2 * h);
    next.topRightCorner(h, h) = j;
    next.bottomLeftCorner(h, h) = ladder_sign(level) * j.transpose();
    j = std::move(next);
  }
  return j;
}

/// Raw (unnormalized) amplitude matrix A_{2^{k+1}}.
inline ComplexMatrix build_A(const DComputableParams& p) {
  validate(p);
  if (to_vector(p).squaredNorm() == 0.0) {
    fail(ErrorKind::DegenerateInput, "build_A: all parameters are zero");
  }
  ComplexMatrix a(2, 2);
  a << p.a, -p.c, p.c, p.d;
  for (int l = 1; l <= p.k; ++l) {
    const auto [bl, cl] = p.ladder[static_cast<std::size_t>(l - 1)];
    const ComplexMatrix j = build_J(l).cast<Complex>();
    const Index h = a.rows();
    ComplexMatrix next(2 * h, 2 * h);
    next.topLeftCorner(h, h) = bl * j;
    next.topRightCorner(h, h) = a;
    next.bottomLeftCorner(h, h) = ladder_sign(l) * a.transpose();
    next.bottomRightCorner(h, h) = cl * j.transpose();
    a = std::move(next);
  }
  return a;
}

/// [A]: b_1 c_1 + a d + c^2 at k = 1, then
/// [A_{2^{l+1}}] = (-1)^{l(l+1)/2} b_l c_l - [A_{2^l}] for l = 2..k.
/// This is the scalar in A^T J_N A = [A] J_N.
inline Complex bracket_form(const DComputableParams& p) {
  validate(p);
  Complex f = p.ladder[0].first * p.ladder[0].second + p.a * p.d + p.c * p.c;
  for (int l = 2; l <= p.k; ++l) {
    const auto [bl, cl] = p.ladder[static_cast<std::size_t>(l - 1)];
    f = ladder_sign(l) * bl * cl - f;
  }
  return f;
}

/// The sign-free sum b_k c_k + ... + b_1 c_1 + a d + c^2. Its modulus agrees
/// with |[A]| only up to k = 3; kept for comparison.
inline Complex bracket_form_unsigned(const DComputableParams& p) {
  validate(p);
  Complex f = p.a * p.d + p.c * p.c;
  for (const auto& [bl, cl] : p.ladder) f += bl * cl;
  return f;
}

/// ||A|| = |a|^2 + 2|c|^2 + |d|^2 + sum_l (|b_l|^2 + |c_l|^2), the sum of the
/// two eigenvalue levels.
inline double norm_form(const DComputableParams& p) {
  validate(p);
  double s = std::norm(p.a) + 2.0 * std::norm(p.c) + std::norm(p.d);
  for (const auto& [bl, cl] : p.ladder) s += std::norm(bl) + std::norm(cl);
  return s;
}

/// tr(A A^dagger) = 2^k ||A||
inline double trace_form(const DComputableParams& p) {
  return std::ldexp(norm_form(p), p.k);
}

inline DComputableParams normalized(const DComputableParams& p) {
  const double t = trace_form(p);
  if (t == 0.0) fail(ErrorKind::DegenerateInput, "normalized: all parameters are zero");
  return params_from_vector(p.k, to_vector(p) / std::sqrt(t));
}

inline bool is_normalized(const DComputableParams& p, double tol = 1e-10) {
  return std::abs(trace_form(p) - 1.0) <= tol;
}

/// d = 2^{k+1} |[A]| for normalized parameters.
inline double d_closed_form(const DComputableParams& p) {
  if (!is_normalized(p)) fail(ErrorKind::Validation, "d_closed_form: parameters are not normalized");
  return std::ldexp(std::abs(bracket_form(p)), p.k + 1);
}

// ---------------------------------------------------------------------------
// Generic family access by parameter vector

inline ComplexMatrix build_amplitudes(const FamilySpec& spec, const ComplexVector& theta) {
  validate(spec);
  return spec.family == Family::Sym ? build_A4_sym(sym_params_from_vector(theta))
                                    : build_A(params_from_vector(spec.k, theta));
}

/// q(theta) = 2^{k+1} [A(theta)]; |q| is the generalized concurrence of a
/// normalized family state.
inline Complex family_quadratic(const FamilySpec& spec, const ComplexVector& theta) {
  validate(spec);
  if (spec.family == Family::Sym) return 4.0 * sym_bracket(sym_params_from_vector(theta));
  return std::ldexp(1.0, spec.k + 1) * bracket_form(params_from_vector(spec.k, theta));
}

/// Columns are vec(A(e_x)) for each parameter direction e_x; the family is
/// the column span. Entries are in {-1, 0, 1}.
inline RealMatrix family_basis(const FamilySpec& spec) {
  validate(spec);
  const Index params = spec.param_count();
  const Index n = spec.n();
  RealMatrix basis = RealMatrix::Zero(n * n, params);
  for (Index x = 0; x < params; ++x) {
    const ComplexMatrix a = build_amplitudes(spec, ComplexVector::Unit(params, x));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) basis(i * n + j, x) = a(i, j).real();
  }
  return basis;
}

inline PureState family_state(const DComputableParams& p) { return make_pure(build_A(p), true); }
inline PureState family_state(const SymFamilyParams& p) { return make_pure(build_A4_sym(p), true); }

struct FamilyProjection {
  ComplexVector coords;  // parameter vector of the projected state
  double residual = 0.0; // |psi - P psi| / |psi|
};

/// Orthogonal projection of a length-N^2 vector onto the family subspace.
/// Throws NotInFamilyError when the relative residual exceeds `tol`.
inline FamilyProjection family_project(const ComplexVector& psi, const FamilySpec& spec,
                                       double tol) {
  const RealMatrix basis = family_basis(spec);
  if (psi.size() != basis.rows()) {
    fail(ErrorKind::Dimension, "family_project: state length " + std::to_string(psi.size()) +
                                   " does not match family dimension " +
                                   std::to_string(basis.rows()));
  }
  const ComplexMatrix m = basis.cast<Complex>();
  const ComplexMatrix gram = m.adjoint() * m;
  FamilyProjection out;
  out.coords = gram.ldlt().solve(m.adjoint() * psi);
  const double scale = psi.norm();
  out.residual = scale > 0.0 ? (psi - m * out.coords).norm() / scale : 0.0;
  if (out.residual > tol) {
    throw NotInFamilyError("state is not in the " + std::string(to_string(spec.family)) +
                               " family (k=" + std::to_string(spec.k) +
                               "), projection residual " + std::to_string(out.residual),
                           out.residual);
  }
  return out;
}

inline FamilyProjection family_project(const PureState& psi, const FamilySpec& spec, double tol) {
  if (psi.n() != spec.n()) {
    fail(ErrorKind::Dimension, "family_project: local dimension " + std::to_string(psi.n()) +
                                   " does not match family N = " + std::to_string(spec.n()));
  }
  return family_project(psi.vectorized(), spec, tol);
}

// ---------------------------------------------------------------------------
// Identity checks

struct IdentityReport {
  double det_residual = 0.0;       // |det(AA^+) - |[A]|^{2N}| relative
  double charpoly_residual = 0.0;  // max coefficient deviation, relative
  double level_spread = 0.0;       // spread inside each level / lambda_max
  Index mult1 = 0;
  Index mult2 = 0;
  bool multiplicity_ok = false;
  double max_residual = 0.0;
  bool passed = false;
};

namespace detail {

/// Coefficients (constant term first) of prod_i (x - r_i).
inline std::vector<double> poly_from_roots(const RealVector& roots) {
  std::vector<double> c{1.0};
  for (Index i = 0; i < roots.size(); ++i) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= roots(i) * c[j];
    }
    c = std::move(next);
  }
  return c;
}

inline std::vector<double> poly_power(const std::vector<double>& base, int power) {
  std::vector<double> out{1.0};
  for (int p = 0; p < power; ++p) {
    std::vector<double> next(out.size() + base.size() - 1, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < base.size(); ++j) next[i + j] += out[i] * base[j];
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Checks det(AA^+) = (|[A]|^2)^{2^k}, the characteristic polynomial
/// (lambda^2 - ||A|| lambda + |[A]|^2)^{2^k}, and that both eigenvalue levels
/// have multiplicity 2^k. Violations are reported, not thrown.
inline IdentityReport verify_identities(const DComputableParams& raw, double tol) {
  const DComputableParams p = normalized(raw);
  const ComplexMatrix a = build_A(p);
  const Index n = a.rows();
  const Index half = n / 2;
  const ComplexMatrix h = hermitian_part(a * a.adjoint());
  const double f2 = std::norm(bracket_form(p));
  const double nrm = norm_form(p);
  IdentityReport r;

  const double det_num = Eigen::PartialPivLU<ComplexMatrix>(h).determinant().real();
  const double det_expected = std::pow(f2, static_cast<double>(half));
  const double floor = 1e-14 * std::pow(1.0 / static_cast<double>(n), static_cast<double>(n));
  r.det_residual = std::abs(det_num - det_expected) / std::max(det_expected, floor);

  const RealVector ev = herm_eig(h).eigenvalues;
  const auto numeric = detail::poly_from_roots(ev);
  const auto expected = detail::poly_power({f2, -nrm, 1.0}, static_cast<int>(half));
  double cmax = 0.0;
  double cdiff = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    cmax = std::max(cmax, std::abs(expected[i]));
    cdiff = std::max(cdiff, std::abs(expected[i] - numeric[i]));
  }
  r.charpoly_residual = cdiff / cmax;

  const double top = ev(0);
  r.level_spread = std::max(ev(0) - ev(half - 1), ev(half) - ev(n - 1)) / top;
  try {
    const auto s = spectrum_structure(make_pure(a, false), kDefaultClusterTol);
    r.mult1 = s.mult1;
    r.mult2 = s.mult2;
    r.multiplicity_ok = s.mult1 == half && s.mult2 == half;
  } catch (const Error&) {
    r.multiplicity_ok = false;
  }
  r.max_residual = std::max({r.det_residual, r.charpoly_residual, r.level_spread});
  r.passed = r.multiplicity_ok && r.max_residual < tol;
  return r;
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

inline ComplexVector gaussian_vector(Index size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(size);
  for (Index i = 0; i < size; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v;
}

}  // namespace detail

/// Normalized recursive-family parameters with i.i.d. complex Gaussian entries.
inline DComputableParams random_params(int k, std::mt19937_64& rng) {
  return normalized(params_from_vector(k, detail::gaussian_vector(3 + 2 * k, rng)));
}

inline SymFamilyParams random_sym_params(std::mt19937_64& rng) {
  return normalized(sym_params_from_vector(detail::gaussian_vector(6, rng)));
}

/// Random normalized family state, vectorized.
inline ComplexVector random_family_vector(const FamilySpec& spec, std::mt19937_64& rng) {
  const ComplexVector theta = detail::gaussian_vector(spec.param_count(), rng);
  return make_pure(build_amplitudes(spec, theta), true).vectorized();
}

}  // namespace genconc
