#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "genconc/genconc.hpp"
#include "oracles.hpp"

using namespace genconc;

namespace {

const double kRootHalf = 1.0 / std::sqrt(2.0);

DComputableParams ladder_only(int k, int level, Complex b, Complex c) {
  DComputableParams p{k, 0.0, 0.0, 0.0, std::vector<std::pair<Complex, Complex>>(static_cast<std::size_t>(k))};
  p.ladder[static_cast<std::size_t>(level - 1)] = {b, c};
  return p;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::Validation;
}

}  // namespace

TEST(SymFamily, Pattern) {
  const SymFamilyParams p{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const ComplexMatrix a = build_A4_sym(p);
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(a(i, i), Complex(0.0));
  EXPECT_EQ(a(0, 1), Complex(5.0));
  EXPECT_EQ(a(1, 0), Complex(-5.0));
  EXPECT_EQ(a(2, 3), Complex(-6.0));
  EXPECT_EQ(a(3, 2), Complex(6.0));
  EXPECT_EQ(a(0, 2), a(2, 0));
  EXPECT_EQ(a(1, 3), a(3, 1));
}

TEST(SymFamily, Examples) {
  const SymFamilyParams be{0.0, 0.0, 0.0, 0.0, 0.5, 0.5};
  EXPECT_NEAR(d_sym_closed(be), 1.0, 1e-15);
  EXPECT_NEAR(eof_pure(family_state(be)), 2.0, 1e-14);

  const SymFamilyParams b_only{0.0, 0.0, 0.0, 0.0, kRootHalf, 0.0};
  EXPECT_NEAR(d_sym_closed(b_only), 0.0, 1e-15);
  EXPECT_NEAR(eof_pure(family_state(b_only)), 1.0, 1e-14);

  EXPECT_NEAR(d_sym_closed({0.0, 0.5, 0.5, 0.0, 0.0, 0.0}), 1.0, 1e-15);
  EXPECT_NEAR(d_sym_closed({0.5, 0.0, 0.0, 0.5, 0.0, 0.0}), 1.0, 1e-15);
  EXPECT_NEAR(d_sym_closed({0.0, 0.5, -0.5, 0.0, 0.0, 0.0}), 1.0, 1e-15);

  EXPECT_EQ(kind_of([] { build_A4_sym({}); }), ErrorKind::DegenerateInput);
  EXPECT_EQ(kind_of([] { d_sym_closed({1.0, 0.0, 0.0, 0.0, 0.0, 0.0}); }), ErrorKind::Validation);
}

TEST(SymFamily, RandomStatesAreTwoLevelWithClosedFormD) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const SymFamilyParams p = random_sym_params(rng);
    const PureState psi = family_state(p);
    const auto s = spectrum_structure(psi);
    EXPECT_EQ(s.mult1, 2);
    EXPECT_EQ(s.mult2, 2);
    EXPECT_NEAR(gen_concurrence_d(s), d_sym_closed(p), 1e-10);
    const ComplexMatrix aa = reduced_density(psi);
    const double det = Eigen::PartialPivLU<ComplexMatrix>(aa).determinant().real();
    const double expected = std::pow(std::abs(oracle::sym_bracket_from_matrix(psi.amplitudes())), 4);
    EXPECT_NEAR(det, expected, 1e-9 * expected);
  }
}

TEST(BuildJ, Displayed) {
  RealMatrix j2(2, 2);
  j2 << 0, 1, -1, 0;
  EXPECT_EQ(build_J(1), j2);
  const RealMatrix j4 = build_J(2);
  RealVector anti(4);
  for (Index i = 0; i < 4; ++i) anti(i) = j4(i, 3 - i);
  RealVector want(4);
  want << 1, 1, -1, -1;
  EXPECT_EQ(anti, want);
  EXPECT_EQ(j4.cwiseAbs().sum(), 4.0);
  EXPECT_EQ(kind_of([] { build_J(0); }), ErrorKind::Domain);
}

TEST(BuildJ, OrthogonalSignedPermutation) {
  for (int k = 1; k <= 6; ++k) {
    const RealMatrix j = build_J(k);
    EXPECT_EQ(j, oracle::J(k)) << k;
    EXPECT_EQ(j.transpose() * j, RealMatrix::Identity(j.rows(), j.cols())) << k;
    for (Index r = 0; r < j.rows(); ++r) EXPECT_EQ(j.row(r).cwiseAbs().sum(), 1.0);
    for (Index c = 0; c < j.cols(); ++c) EXPECT_EQ(j.col(c).cwiseAbs().sum(), 1.0);
  }
}

TEST(BuildA, A4Pattern) {
  const Complex a(0.1, 0.2), c(0.3, -0.1), d(-0.2, 0.05), b1(0.4, 0.0), c1(0.0, 0.3);
  const ComplexMatrix m = build_A({1, a, c, d, {{b1, c1}}});
  ComplexMatrix want(4, 4);
  // clang-format off
  want << 0.0, b1,  a,   -c,
          -b1, 0.0, c,   d,
          -a,  -c,  0.0, -c1,
          c,   -d,  c1,  0.0;
  // clang-format on
  EXPECT_LE((m - want).norm(), 0.0);
}

TEST(BuildA, LadderOnlyExamples) {
  const ComplexMatrix a4 = build_A(ladder_only(1, 1, 0.5, 0.5));
  EXPECT_EQ(a4(0, 1), Complex(0.5));
  EXPECT_EQ(a4(2, 3), Complex(-0.5));

  // k = 2, b2 = c2 = 1/2: ||A|| = 1/2, [A] = -1/4, eigenvalue 1/4 eight times.
  const DComputableParams p = ladder_only(2, 2, 0.5, 0.5);
  EXPECT_NEAR(norm_form(p), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(bracket_form(p) + 0.25), 0.0, 1e-15);
  const ComplexMatrix a8 = build_A(p);
  const RealVector ev = oracle::eigenvalues_desc(a8 * a8.adjoint());
  for (Index i = 0; i < 8; ++i) EXPECT_NEAR(ev(i), 0.25, 1e-14);

  EXPECT_EQ(kind_of([] { build_A(DComputableParams{2, 0.0, 0.0, 0.0, {{0.0, 0.0}, {0.0, 0.0}}}); }),
            ErrorKind::DegenerateInput);
  EXPECT_EQ(kind_of([] { build_A(DComputableParams{2, 1.0, 0.0, 0.0, {{0.0, 0.0}}}); }),
            ErrorKind::Validation);
}

TEST(BracketForm, Examples) {
  EXPECT_NEAR(std::abs(bracket_form(ladder_only(1, 1, 0.5, 0.5)) - 0.25), 0.0, 1e-15);
  const Complex x(0.3, 0.2);
  EXPECT_NEAR(std::abs(bracket_form(ladder_only(2, 2, x, x)) + x * x), 0.0, 1e-15);
  EXPECT_EQ(bracket_form(DComputableParams{2, 0.0, 0.0, 0.0, {{0.0, 0.0}, {0.0, 0.0}}}), Complex(0.0));
}

TEST(BracketForm, MatchesMatrixOracle) {
  std::mt19937_64 rng(22);
  for (int k = 1; k <= 5; ++k) {
    for (int trial = 0; trial < 30; ++trial) {
      const DComputableParams p = random_params(k, rng);
      const auto ref = oracle::bracket_from_matrix(build_A(p));
      EXPECT_LE(ref.deviation, 1e-12) << k;
      EXPECT_LE(std::abs(bracket_form(p) - ref.value), 1e-13) << k;
    }
  }
}

TEST(BracketForm, UnsignedDisplayFailsFromK4) {
  std::mt19937_64 rng(23);
  double worst_low = 0.0, worst_k4 = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    for (int k = 1; k <= 3; ++k) {
      const DComputableParams p = random_params(k, rng);
      worst_low = std::max(worst_low, std::abs(std::abs(bracket_form_unsigned(p)) - std::abs(bracket_form(p))));
    }
    const DComputableParams p = random_params(4, rng);
    worst_k4 = std::max(worst_k4, std::abs(std::abs(bracket_form_unsigned(p)) - std::abs(bracket_form(p))));
  }
  EXPECT_LE(worst_low, 1e-15);
  EXPECT_GT(worst_k4, 1e-3);
}

TEST(NormForm, Examples) {
  EXPECT_NEAR(norm_form(ladder_only(1, 1, 0.5, 0.5)), 0.5, 1e-15);
  EXPECT_NEAR(norm_form(ladder_only(2, 2, 0.5, 0.5)), 0.5, 1e-15);
  EXPECT_EQ(norm_form(DComputableParams{1, 0.0, 0.0, 0.0, {{0.0, 0.0}}}), 0.0);
}

TEST(NormForm, RecursionMatchesCharacteristicPolynomial) {
  // det(x - AA^dagger) = (x^2 - ||A|| x + |[A]|^2)^{2^k} at several points x.
  std::mt19937_64 rng(24);
  for (int k = 1; k <= 3; ++k) {
    for (int trial = 0; trial < 30; ++trial) {
      const DComputableParams p = random_params(k, rng);
      const ComplexMatrix a = build_A(p);
      const ComplexMatrix h = a * a.adjoint();
      const double nrm = norm_form(p);
      const double f2 = std::norm(bracket_form(p));
      EXPECT_NEAR(h.trace().real(), std::ldexp(nrm, k), 1e-12);
      for (double x : {-0.3, 0.05, 0.2, 0.7}) {
        const double want = std::pow(x * x - nrm * x + f2, std::ldexp(1.0, k));
        const double got = oracle::charpoly_at(h, x);
        EXPECT_NEAR(got, want, 1e-10 * std::max(1e-30, std::abs(want)) + 1e-14) << k << " " << x;
      }
    }
  }
}

TEST(DClosedForm, Examples) {
  EXPECT_NEAR(d_closed_form(ladder_only(1, 1, 0.5, 0.5)), 1.0, 1e-15);
  EXPECT_EQ(kind_of([] { d_closed_form(ladder_only(2, 2, 0.5, 0.5)); }), ErrorKind::Validation);
  const double s = 1.0 / (2.0 * std::sqrt(2.0));
  EXPECT_NEAR(d_closed_form(ladder_only(2, 2, s, s)), 1.0, 1e-15);
  EXPECT_NEAR(d_closed_form(ladder_only(2, 2, 0.5, 0.0)), 0.0, 1e-15);
}

TEST(DClosedForm, MatchesSpectrum) {
  std::mt19937_64 rng(25);
  for (int k = 1; k <= 3; ++k) {
    for (int trial = 0; trial < 100; ++trial) {
      const DComputableParams p = random_params(k, rng);
      const ComplexMatrix a = build_A(p);
      const RealVector ev = oracle::eigenvalues_desc(a * a.adjoint());
      const double n = std::ldexp(1.0, k);
      const double spectral = 2.0 * n * std::sqrt(ev(0) * ev(ev.size() - 1));
      EXPECT_NEAR(d_closed_form(p), spectral, 1e-9);
      EXPECT_NEAR(d_closed_form(p), gen_concurrence_d(spectrum_structure(family_state(p))), 1e-9);
    }
  }
}

TEST(FamilyProject, RoundTrip) {
  std::mt19937_64 rng(26);
  for (int k = 1; k <= 3; ++k) {
    const DComputableParams p = random_params(k, rng);
    const auto proj = family_project(family_state(p), {Family::Recursive, k}, 1e-10);
    EXPECT_LT(proj.residual, 1e-12);
    EXPECT_LE((proj.coords - to_vector(p)).norm(), 1e-12);
  }
  const SymFamilyParams s = random_sym_params(rng);
  const auto proj = family_project(family_state(s), {Family::Sym, 1}, 1e-10);
  EXPECT_LE((proj.coords - to_vector(s)).norm(), 1e-12);
}

TEST(FamilyProject, OutsideRejectedWithResidual) {
  ComplexMatrix a = ComplexMatrix::Zero(4, 4);
  a(0, 0) = a(1, 1) = kRootHalf;
  const PureState bellish = make_pure(a, false);
  try {
    family_project(bellish, {Family::Recursive, 1}, 1e-8);
    FAIL();
  } catch (const NotInFamilyError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInFamily);
    EXPECT_NEAR(e.residual(), 1.0, 1e-12);
  }
  EXPECT_THROW(family_project(bellish, {Family::Sym, 1}, 1e-8), NotInFamilyError);
  EXPECT_EQ(kind_of([&] { family_project(bellish, {Family::Recursive, 2}, 1e-8); }), ErrorKind::Dimension);
}

TEST(FamilyProject, ClosedUnderLinearCombination) {
  std::mt19937_64 rng(27);
  for (auto spec : {FamilySpec{Family::Sym, 1}, FamilySpec{Family::Recursive, 2}}) {
    const ComplexVector u = random_family_vector(spec, rng);
    const ComplexVector v = random_family_vector(spec, rng);
    const ComplexVector w = (Complex(0.3, 0.4) * u + Complex(-0.7, 0.1) * v).normalized();
    EXPECT_LT(family_project(w, spec, 1e-10).residual, 1e-12);
  }
}

TEST(VerifyIdentities, RandomSweep) {
  std::mt19937_64 rng(28);
  for (int k = 1; k <= 3; ++k) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto r = verify_identities(random_params(k, rng), 1e-8);
      EXPECT_TRUE(r.passed) << k;
      EXPECT_LT(r.max_residual, k < 3 ? 1e-9 : 1e-8);
      EXPECT_EQ(r.mult1, Index{1} << k);
      EXPECT_EQ(r.mult2, Index{1} << k);
    }
  }
}

TEST(VerifyIdentities, AcceptsUnnormalizedInput) {
  const auto r = verify_identities(ladder_only(2, 2, 3.0, 1.0), 1e-8);
  EXPECT_TRUE(r.passed);
}

TEST(Sampling, DeterministicAndNormalized) {
  std::mt19937_64 a(99), b(99);
  const auto p = random_params(3, a);
  const auto q = random_params(3, b);
  EXPECT_EQ(to_vector(p), to_vector(q));
  EXPECT_TRUE(is_normalized(p));
  EXPECT_NEAR(sym_trace(random_sym_params(a)), 1.0, 1e-12);
}
