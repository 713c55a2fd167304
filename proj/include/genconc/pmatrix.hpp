#pragma once

// Symmetric matrices p for which <<psi|psi>> = <psi| p |psi*> recovers the
// generalized concurrence of family states as |<<psi|psi>>|.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "genconc/dcomputable.hpp"

namespace genconc {

enum class PSource {
  Derived,             // polarization of 2^{k+1}[A] over the family coordinates
  ListedEntries,       // the published 16x16 entry list, verbatim
  LiteralAntidiagonal, // the published general anti-diagonal rule, literal
};

inline const char* to_string(PSource s) {
  switch (s) {
    case PSource::Derived: return "derived";
    case PSource::ListedEntries: return "paper-explicit";
    case PSource::LiteralAntidiagonal: return "paper-antidiagonal";
  }
  return "unknown";
}

struct BiformMatrix {
  FamilySpec family;
  RealMatrix p;
  PSource source = PSource::Derived;

  Index dim() const { return p.rows(); }
};

/// 1-indexed sparse entry.
struct PEntry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

inline std::vector<PEntry> to_triplets(const RealMatrix& p) {
  std::vector<PEntry> out;
  for (Index r = 0; r < p.rows(); ++r)
    for (Index c = 0; c < p.cols(); ++c)
      if (p(r, c) != 0.0) out.push_back({r + 1, c + 1, p(r, c)});
  return out;
}

/// The 16x16 matrix exactly as listed for the sym family, including the
/// p_{8,8} = p_{9,9} = -1 entries (the quadratic form needs p_{8,9} instead).
inline BiformMatrix p16_explicit() {
  RealMatrix p = RealMatrix::Zero(16, 16);
  const auto set = [&](Index r, Index c, double v) { p(r - 1, c - 1) = v; };
  set(1, 16, 1);
  set(2, 15, 1);
  set(3, 14, -1);
  set(4, 10, 1);
  set(5, 12, 1);
  set(6, 11, 1);
  set(7, 13, 1);
  set(8, 8, -1);
  set(9, 9, -1);
  set(10, 4, 1);
  set(11, 6, 1);
  set(12, 5, 1);
  set(13, 7, 1);
  set(14, 3, -1);
  set(15, 2, 1);
  set(16, 1, 1);
  return {FamilySpec{Family::Sym, 1}, p, PSource::ListedEntries};
}

/// Parameter-space Gram matrix Q with q(theta) = theta^T Q theta, by
/// polarization of the family quadratic form on unit directions.
inline RealMatrix parameter_form(const FamilySpec& spec) {
  const Index params = spec.param_count();
  const auto q = [&](const ComplexVector& t) { return family_quadratic(spec, t); };
  RealMatrix form(params, params);
  for (Index x = 0; x < params; ++x) {
    const ComplexVector ex = ComplexVector::Unit(params, x);
    form(x, x) = q(ex).real();
    for (Index y = x + 1; y < params; ++y) {
      const ComplexVector ey = ComplexVector::Unit(params, y);
      const Complex v = (q(ex + ey) - q(ex) - q(ey)) / 2.0;
      form(x, y) = form(y, x) = v.real();
    }
  }
  return form;
}

/// Symmetric p with psi^T p psi = 2^{k+1}[A] on the family.
///
/// Each monomial theta_x theta_y of the parameter form is spread over the
/// coordinates holding +-theta_x and +-theta_y: the i-th occurrence of x (in
/// increasing position) is paired with the i-th occurrence of y counted from
/// the end. For both families this lands every entry on a single pair of
/// positions; when occurrence counts differ the coefficient is spread evenly
/// over all pairs. Entries outside the family support are zero.
inline BiformMatrix derive_p(const FamilySpec& spec) {
  validate(spec);
  const RealMatrix basis = family_basis(spec);
  const RealMatrix form = parameter_form(spec);
  const Index dim = basis.rows();
  RealMatrix p = RealMatrix::Zero(dim, dim);

  std::vector<std::vector<Index>> positions(static_cast<std::size_t>(basis.cols()));
  for (Index x = 0; x < basis.cols(); ++x)
    for (Index a = 0; a < dim; ++a)
      if (basis(a, x) != 0.0) positions[static_cast<std::size_t>(x)].push_back(a);

  const auto add = [&](Index a, Index b, double v) {
    p(a, b) += v;
    if (a != b) p(b, a) += v;
  };

  for (Index x = 0; x < basis.cols(); ++x) {
    const auto& xs = positions[static_cast<std::size_t>(x)];
    const auto nx = static_cast<double>(xs.size());
    if (form(x, x) != 0.0) {
      if (xs.size() % 2 == 0) {
        for (std::size_t i = 0; i < xs.size() / 2; ++i) {
          const Index a = xs[i];
          const Index b = xs[xs.size() - 1 - i];
          add(a, b, form(x, x) / nx * basis(a, x) * basis(b, x));
        }
      } else {
        for (Index a : xs) add(a, a, form(x, x) / nx);
      }
    }
    for (Index y = x + 1; y < basis.cols(); ++y) {
      if (form(x, y) == 0.0) continue;
      const double coef = 2.0 * form(x, y);
      const auto& ys = positions[static_cast<std::size_t>(y)];
      if (xs.size() == ys.size()) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const Index a = xs[i];
          const Index b = ys[ys.size() - 1 - i];
          add(a, b, coef / (2.0 * nx) * basis(a, x) * basis(b, y));
        }
      } else {
        const double share = coef / (2.0 * nx * static_cast<double>(ys.size()));
        for (Index a : xs)
          for (Index b : ys) add(a, b, share * basis(a, x) * basis(b, y));
      }
    }
  }
  return {spec, p, PSource::Derived};
}

/// Literal reading of the published general rule: anti-diagonal entries 1,
/// except -1 at rows 2^{k+1}-1+s(2^{k+2}-2), 2^{k+1}+s(...), 2^{k+2}-1+s(...),
/// 2^{k+2}+s(...) for s = 0..2^{k+1}-1. Rows beyond the matrix are ignored.
/// Diagnostic only: it disagrees with derive_p from k = 2 on, and need not be
/// symmetric.
inline BiformMatrix literal_antidiagonal_p(int k) {
  if (k < 1) fail(ErrorKind::Domain, "literal_antidiagonal_p: k must be at least 1");
  const Index dim = Index{1} << (2 * k + 2);
  const Index step = (Index{1} << (k + 2)) - 2;
  std::set<Index> negative;
  for (Index s = 0; s < (Index{1} << (k + 1)); ++s) {
    for (Index r : {(Index{1} << (k + 1)) - 1, Index{1} << (k + 1), (Index{1} << (k + 2)) - 1,
                    Index{1} << (k + 2)}) {
      negative.insert(r + s * step);
    }
  }
  RealMatrix p = RealMatrix::Zero(dim, dim);
  for (Index r = 1; r <= dim; ++r) p(r - 1, dim - r) = negative.count(r) ? -1.0 : 1.0;
  return {FamilySpec{Family::Recursive, k}, p, PSource::LiteralAntidiagonal};
}

struct PComparison {
  Index mismatches_on_support = 0;  // both indices inside the family support
  Index mismatches_total = 0;
  std::vector<PEntry> on_support;   // entries of `lhs` that differ there (1-indexed)
};

inline PComparison compare_p(const BiformMatrix& lhs, const BiformMatrix& rhs) {
  if (lhs.dim() != rhs.dim()) fail(ErrorKind::Dimension, "compare_p: size mismatch");
  const RealMatrix basis = family_basis(lhs.family);
  std::vector<bool> support(static_cast<std::size_t>(lhs.dim()), false);
  for (Index a = 0; a < basis.rows(); ++a) support[static_cast<std::size_t>(a)] = basis.row(a).any();
  PComparison out;
  for (Index r = 0; r < lhs.dim(); ++r) {
    for (Index c = 0; c < lhs.dim(); ++c) {
      if (lhs.p(r, c) == rhs.p(r, c)) continue;
      ++out.mismatches_total;
      if (support[static_cast<std::size_t>(r)] && support[static_cast<std::size_t>(c)]) {
        ++out.mismatches_on_support;
        out.on_support.push_back({r + 1, c + 1, lhs.p(r, c)});
      }
    }
  }
  return out;
}

/// <<u|v>> = <u| p |v*> = u^H p conj(v).
inline Complex biform_pair(const ComplexVector& u, const ComplexVector& v, const BiformMatrix& p) {
  if (u.size() != p.dim() || v.size() != p.dim()) {
    fail(ErrorKind::Dimension, "biform: vector length does not match p (" +
                                   std::to_string(p.dim()) + ")");
  }
  return u.dot(p.p.cast<Complex>() * v.conjugate());
}

/// <<psi|psi>>; its modulus is the generalized concurrence of a normalized
/// family state.
inline Complex biform(const ComplexVector& psi, const BiformMatrix& p) {
  return biform_pair(psi, psi, p);
}

}  // namespace genconc
