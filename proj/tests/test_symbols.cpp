#include <gtest/gtest.h>

#include <random>

#include "geoflow/symbols.hpp"

using namespace geoflow;

namespace {

DenseTensor<Exact> ex(int n, int i) { return basis_vector<Exact>(n, i); }

DenseTensor<Exact> outer_sym(const DenseTensor<Exact>& a, const DenseTensor<Exact>& b) {
  DenseTensor<Exact> t(a.dim, 2, Symmetry::sym2);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) t(i, j) = a(i) * b(j);
  return t;
}

DenseTensor<Exact> random_int_vector(int n, std::mt19937_64& rng, bool nonzero = true) {
  std::uniform_int_distribution<int> d(-4, 4);
  DenseTensor<Exact> v(n, 1);
  do {
    for (auto& x : v.entries) x = d(rng);
  } while (nonzero && v.max_abs() == 0.0);
  return v;
}

DenseTensor<Exact> random_int_sym(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-4, 4);
  DenseTensor<Exact> h(n, 2, Symmetry::sym2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) h.set_sym(i, j, Exact(d(rng)));
  return h;
}

DenseTensor<double> random_sym(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  DenseTensor<double> h(n, 2, Symmetry::sym2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) h.set_sym(i, j, d(rng));
  return h;
}

DenseTensor<double> random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  DenseTensor<double> v(n, 1);
  for (auto& x : v.entries) x = d(rng);
  return v;
}

}  // namespace

TEST(Sym2Frame, NormalizedFrameIsOrthonormal) {
  for (int n : {2, 3, 7}) {
    const Sym2Frame<double> f(n, true);
    EXPECT_EQ(f.size(), n * (n + 1) / 2);
    const auto G = f.gram();
    for (int a = 0; a < f.size(); ++a)
      for (int b = 0; b < f.size(); ++b) EXPECT_NEAR(G(a, b), a == b ? 1.0 : 0.0, 1e-15);
  }
  EXPECT_THROW(Sym2Frame<Exact>(3, true), ValidationError);
}

TEST(Sym2Frame, CoordinatesRoundTrip) {
  std::mt19937_64 rng(1);
  const Sym2Frame<double> f(4, true);
  const auto h = random_sym(4, rng);
  EXPECT_LT(f.from_coords(f.coords(h)).max_abs_diff(h), 1e-15);
}

// ---------------------------------------------------------------------------------------------
// A, B, Q, scalar

TEST(SymbolA, Examples) {
  auto half = outer_sym(ex(3, 0), ex(3, 1)) + outer_sym(ex(3, 1), ex(3, 0));
  half *= Exact(1) / 2;
  EXPECT_EQ(symbol_A(ex(3, 0), ex(3, 1)), half);
  EXPECT_EQ(symbol_A(ex(3, 0), ex(3, 0)), outer_sym(ex(3, 0), ex(3, 0)));
  EXPECT_THROW(symbol_A(DenseTensor<Exact>(3, 1), ex(3, 0)), ValidationError);
}

TEST(SymbolA, InjectiveWithRankN) {
  std::mt19937_64 rng(2);
  for (int n : {2, 3, 7}) {
    EXPECT_EQ(matrix_rank(symbol_A_matrix(ex(n, 0))), n);
    EXPECT_EQ(matrix_rank(symbol_A_matrix(random_int_vector(n, rng))), n);
  }
}

TEST(SymbolB, IdentityInput) {
  auto expect = identity_metric<Exact>(7);
  expect(0, 0) = 6;
  EXPECT_EQ(apply_B(ex(7, 0), identity_metric<Exact>(7)), expect);
  const auto op = symbol_B_ricci(ex(7, 0));
  EXPECT_EQ(op.apply(identity_metric<Exact>(7)), expect);
  EXPECT_THROW(symbol_B_ricci(DenseTensor<Exact>(7, 1)), ValidationError);
}

TEST(SymbolB, AnnihilatesImageOfA) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(0, 2);
  const int dims[] = {2, 3, 7};
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dims[dim(rng)];
    const auto xi = random_int_vector(n, rng), X = random_int_vector(n, rng, false);
    EXPECT_EQ(apply_B(xi, symbol_A(xi, X)), DenseTensor<Exact>(n, 2));
  }
}

TEST(SymbolB, KernelIsExactlyImageOfA) {
  std::mt19937_64 rng(4);
  for (int n : {2, 3, 7})
    for (int trial = 0; trial < 3; ++trial) {
      const auto xi = trial == 0 ? ex(n, 0) : random_int_vector(n, rng);
      const auto B = symbol_B_ricci(xi).matrix;
      EXPECT_EQ(kernel_dim(B), n);
      EXPECT_TRUE(kernel_equals_span(B, symbol_A_matrix(xi)));
    }
}

TEST(SymbolB, QuadraticFormOnBreveComplement) {
  std::mt19937_64 rng(5);
  for (int n : {2, 3, 7})
    for (int trial = 0; trial < 1000; ++trial) {
      const auto xi = random_vec(n, rng);
      const auto hb = breve_projection(random_sym(n, rng), xi);
      const double lhs = full_contraction(apply_B(xi, hb), hb);
      const double rhs = detail::norm_sq(xi) * full_contraction(hb, hb);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::fabs(rhs)));
    }
}

TEST(BreveProjection, Examples) {
  const auto xi = ex(4, 0);
  auto expect = identity_metric<Exact>(4);
  expect(0, 0) = 0;
  EXPECT_EQ(breve_projection(identity_metric<Exact>(4), xi), expect);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_int_vector(4, rng);
    EXPECT_EQ(breve_projection(symbol_A(x, random_int_vector(4, rng, false)), x), DenseTensor<Exact>(4, 2));
  }
}

TEST(BreveProjection, OrthogonalToImageAndIdempotent) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto xi = random_int_vector(5, rng);
    const auto hb = breve_projection(random_int_sym(5, rng), xi);
    EXPECT_EQ(full_contraction(hb, symbol_A(xi, random_int_vector(5, rng, false))), Exact(0));
    EXPECT_EQ(mat_vec(hb, xi), DenseTensor<Exact>(5, 1));
    EXPECT_EQ(breve_projection(hb, xi), hb);
  }
}

TEST(SymbolQ, BPlusQIsXiSquaredIdentity) {
  std::mt19937_64 rng(8);
  for (int n : {2, 3, 4, 7}) {
    const auto xi = random_int_vector(n, rng);
    const auto sum = symbol_B_ricci(xi).matrix + symbol_Q_deturck(xi).matrix;
    EXPECT_EQ(sum, detail::norm_sq(xi) * Matrix<Exact>::identity(n * (n + 1) / 2));
    const auto h = random_int_sym(n, rng);
    auto expect = h;
    expect *= detail::norm_sq(xi);
    EXPECT_EQ(apply_B(xi, h) + apply_Q(xi, h), expect);
  }
}

TEST(SymbolQ, Examples) {
  for (int n : {3, 7}) {
    DenseTensor<Exact> expect(n, 2, Symmetry::sym2);
    expect(0, 0) = Exact(2 - n);
    EXPECT_EQ(apply_Q(ex(n, 0), identity_metric<Exact>(n)), expect);
  }
  DenseTensor<Exact> h(3, 2, Symmetry::sym2);
  h(1, 1) = 1;
  h(2, 2) = -1;
  h.set_sym(1, 2, Exact(5));
  EXPECT_EQ(apply_Q(ex(3, 0), h), DenseTensor<Exact>(3, 2));
}

TEST(SymbolScalar, Examples) {
  for (int n : {2, 3, 7}) {
    auto expect = identity_metric<Exact>(n);
    expect *= Exact(1 - n);
    EXPECT_EQ(apply_scalar(ex(n, 0), identity_metric<Exact>(n)), expect);
    auto minus = identity_metric<Exact>(n);
    minus *= Exact(-1);
    EXPECT_EQ(apply_scalar(ex(n, 0), outer_sym(ex(n, 1), ex(n, 1))), minus);
  }
  DenseTensor<Exact> h(3, 2, Symmetry::sym2);
  h(1, 1) = 1;
  h(2, 2) = -1;
  h.set_sym(0, 1, Exact(2));
  EXPECT_EQ(apply_scalar(ex(3, 0), h), DenseTensor<Exact>(3, 2));
}

// ---------------------------------------------------------------------------------------------
// Ricci-Bourguignon symbol

TEST(RbSymbol, BZeroIsRicciDeTurck) {
  std::mt19937_64 rng(9);
  const auto xi = random_int_vector(4, rng);
  EXPECT_EQ(rb_symbol(xi, Exact(0)).matrix, detail::norm_sq(xi) * Matrix<Exact>::identity(10));
}

TEST(RbSymbol, NotSelfAdjointForNonzeroB) {
  const auto xi = ex(3, 0);
  const auto h = outer_sym(ex(3, 0), ex(3, 0)), f = outer_sym(ex(3, 1), ex(3, 1));
  const Exact lhs = full_contraction(apply_rb(xi, h, Exact(1)), f);
  const Exact rhs = full_contraction(h, apply_rb(xi, f, Exact(1)));
  EXPECT_EQ(lhs, Exact(0));
  EXPECT_EQ(rhs, Exact(-1));
  const auto M = rb_symbol(basis_vector<double>(3, 0), 1.0).matrix;
  EXPECT_FALSE(M == M.transpose());
}

TEST(RbSymbol, QuadraticFormMatchesTraceSplitExpansion) {
  // h = lambda g + h0 with tr h0 = 0 and |xi| = 1:
  // <C h, h> = lambda^2 (n - b n^2 + b n) + |h0|^2 + b n lambda mu, mu = h0(xi, xi).
  std::mt19937_64 rng(10);
  for (int n : {2, 3, 7})
    for (const Exact b : {Exact(1), Exact(-3) / 2, Exact(2) / 7}) {
      const auto xi = ex(n, 0);
      auto h0 = random_int_sym(n, rng);
      const Exact tr = trace(h0);
      for (int i = 0; i < n; ++i) h0(i, i) -= tr / n;
      const Exact lambda(Exact(3) / 5), mu = h0(0, 0);
      auto h = identity_metric<Exact>(n);
      h *= lambda;
      h += h0;
      const Exact lhs = full_contraction(apply_rb(xi, h, b), h);
      const Exact rhs = lambda * lambda * (n - b * n * n + b * n) + full_contraction(h0, h0) + b * n * lambda * mu;
      EXPECT_EQ(lhs, rhs);
    }
}

TEST(Parabolicity, ScaledIdentityIsPositive) {
  auto xi = basis_vector<double>(3, 0);
  xi *= 2.0;
  const auto rep = parabolicity_report(rb_symbol(xi, 0.0));
  EXPECT_TRUE(rep.positive);
  EXPECT_NEAR(rep.min_sym_eig, 4.0, 1e-14);
}

TEST(Parabolicity, EigenvaluePositivityIsNotEnough) {
  Matrix<double> G(2, 2);
  G(0, 0) = 1;
  G(0, 1) = 4;
  G(1, 1) = 1;
  const auto rep = parabolicity_report(G);
  EXPECT_FALSE(rep.positive);
  EXPECT_DOUBLE_EQ(rep.min_sym_eig, -1.0);
  const std::vector<double> v{1.0, -1.0};
  const auto Gv = G * v;
  EXPECT_EQ(Gv[0] * v[0] + Gv[1] * v[1], -2.0);
  const Eigen::MatrixXd E = to_eigen(G);
  const Eigen::VectorXcd eig = E.eigenvalues();
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(eig(i) - 1.0), 0.0, 1e-6);
}

TEST(Parabolicity, RicciSymbolOnComplementOfImageA) {
  std::mt19937_64 rng(11);
  for (int n : {2, 3, 7}) {
    const auto xi = random_vec(n, rng);
    const auto rep = parabolicity_report(symbol_B_ricci(xi), im_A_complement(xi));
    EXPECT_TRUE(rep.positive);
    EXPECT_NEAR(rep.min_sym_eig, detail::norm_sq(xi), 1e-12 * detail::norm_sq(xi));
    EXPECT_FALSE(parabolicity_report(symbol_B_ricci(xi)).positive);
  }
  EXPECT_THROW(parabolicity_report(symbol_B_ricci(ex(3, 0))), ValidationError);
}

TEST(RbInterval, ClosedFormEndpoints) {
  const auto [lo3, hi3] = rb_parabolic_interval(3);
  EXPECT_NEAR(lo3, -3.09717, 1e-5);
  EXPECT_NEAR(hi3, 0.43050, 1e-5);
  const auto [lo7, hi7] = rb_parabolic_interval(7);
  EXPECT_NEAR(lo7, -3.58784, 1e-5);
  EXPECT_NEAR(hi7, 0.15927, 1e-5);
  EXPECT_THROW(rb_parabolic_interval(1), ValidationError);
}

TEST(RbInterval, ZeroLiesInsideForSmallDimensions) {
  for (int n = 2; n <= 10; ++n) {
    const auto [lo, hi] = rb_parabolic_interval(n);
    EXPECT_LT(lo, 0.0);
    EXPECT_GT(hi, 0.0);
    EXPECT_LT(rb_certificate_polynomial(n, Exact(0)), Exact(0));
  }
}

TEST(RbInterval, EndpointsAreRootsOfTheCertificatePolynomial) {
  for (int n = 2; n <= 10; ++n) {
    const auto [lo, hi] = rb_parabolic_interval(n);
    EXPECT_NEAR(rb_certificate_polynomial(n, lo), 0.0, 1e-12);
    EXPECT_NEAR(rb_certificate_polynomial(n, hi), 0.0, 1e-12);
  }
}

TEST(RbInterval, FineScanReproducesCertifiedInterval) {
  for (int n : {3, 7}) {
    const auto rows = rb_scan(n, -5.0, 1.0, 1e-3);
    const auto located = locate_interval(
        rows, [](const RbScanRow& r) { return r.certified; },
        [n](double b) { return rb_certificate_polynomial(n, b) < 0.0; });
    const auto [lo, hi] = rb_parabolic_interval(n);
    EXPECT_NEAR(located.first, lo, 1e-6) << "n = " << n;
    EXPECT_NEAR(located.second, hi, 1e-6) << "n = " << n;
  }
}

TEST(RbInterval, CertifiedImpliesSymmetrizedPositive) {
  for (int n : {2, 3, 5, 7})
    for (const auto& r : rb_scan(n, -5.0, 1.0, 0.01))
      if (r.certified) EXPECT_TRUE(r.positive) << "n = " << n << " b = " << r.b;
}

TEST(RbInterval, SymmetrizedPositivityRegionIsWiderThanCertificate) {
  // The scan finds positivity exactly on -2 +- 2 sqrt(n/(n-1)), which strictly contains the certified interval.
  for (int n : {3, 7}) {
    const auto rows = rb_scan(n, -5.0, 1.0, 1e-3);
    const auto xi = basis_vector<double>(n, 0);
    const auto located = locate_interval(
        rows, [](const RbScanRow& r) { return r.positive; },
        [&](double b) { return parabolicity_report(rb_symbol(xi, b)).positive; });
    const auto [lo, hi] = rb_symmetric_positivity_interval(n);
    EXPECT_NEAR(located.first, lo, 1e-6);
    EXPECT_NEAR(located.second, hi, 1e-6);
    const auto [clo, chi] = rb_parabolic_interval(n);
    EXPECT_LT(lo, clo);
    EXPECT_GT(hi, chi);
  }
}

TEST(RbPlainSymbol, KernelIsImageOfAAwayFromSpecialValues) {
  std::mt19937_64 rng(12);
  for (int n : {2, 3, 7})
    for (const Exact b : {Exact(0), Exact(-1), Exact(1) / 3, Exact(5) / 2, Exact(-7) / 4}) {
      if (b == Exact(1) || b == Exact(2) / n) continue;
      const auto xi = random_int_vector(n, rng);
      const auto C = rb_plain_symbol(xi, b).matrix;
      EXPECT_TRUE(kernel_equals_span(C, symbol_A_matrix(xi))) << "n = " << n << " b = " << b;
    }
}

TEST(RbPlainSymbol, ExcludedValuesOnlyMatterInTwoDimensions) {
  // Writing h = h' + AX with h'(xi) = 0, C h = 0 forces h' = (tr h')(b g - xi xi) and (b - 1) tr h' = 0.
  // A nonzero solution exists only for b = 1 and n = 2 (h' = e2 (x) e2).
  for (int n : {3, 7})
    for (const Exact b : {Exact(1), Exact(2) / n}) {
      const auto xi = ex(n, 0);
      EXPECT_TRUE(kernel_equals_span(rb_plain_symbol(xi, b).matrix, symbol_A_matrix(xi))) << "n = " << n;
    }
  const auto C = rb_plain_symbol(ex(2, 0), Exact(1));
  EXPECT_EQ(kernel_dim(C.matrix), 3);
  EXPECT_EQ(C.apply(outer_sym(ex(2, 1), ex(2, 1))), DenseTensor<Exact>(2, 2));
}

// ---------------------------------------------------------------------------------------------
// DGK region and Bianchi operators

TEST(Dgk, NamedCoefficientSets) {
  EXPECT_TRUE(dgk_admissible({-0.5, 0.0, 1.0, 0.0}).admissible);
  const auto pure = dgk_admissible({0.0, 0.0, 0.0, 0.0});
  EXPECT_FALSE(pure.admissible);
  EXPECT_EQ(pure.checks[0].value, -1.0);
  EXPECT_EQ(pure.failed(), (std::vector<std::string>{"0 ≤ b1−a−1", "b1+b2 ≥ 1"}));
  EXPECT_TRUE(dgk_admissible({0.0, 0.0, 1.0, 0.0}).admissible);
}

TEST(Dgk, BoundaryBehaviour) {
  EXPECT_FALSE(dgk_admissible({0.0, 0.0, 5.0, 0.0}).admissible);  // b1 - a - 1 = 4
  EXPECT_TRUE(dgk_admissible({0.0, 0.2, 1.0, 0.0}).admissible);
  EXPECT_FALSE(dgk_admissible({0.0, 0.25, 1.0, 0.0}).admissible);
  EXPECT_FALSE(dgk_admissible({0.0, 0.0, 1.0, -0.5}).admissible);
}

TEST(Bianchi, Examples) {
  const auto pt = standard_structure<Exact>();
  const auto xi = ex(7, 0);
  auto expect = ex(7, 0);
  expect *= Exact(-5) / 2;
  const auto p = bianchi_operators(identity_metric<Exact>(7), ex(7, 1), xi, pt);
  EXPECT_EQ(p.B1h, expect);
  EXPECT_EQ(p.B2X, ex(7, 2));
  EXPECT_EQ(bianchi_operators(identity_metric<Exact>(7), xi, xi, pt).B2X, DenseTensor<Exact>(7, 1));
  EXPECT_THROW(bianchi_operators(identity_metric<Exact>(3), ex(3, 0), ex(3, 0), pt), ValidationError);
}

TEST(Bianchi, FirstOperatorAnnihilatesRangeOfB) {
  // The contracted Bianchi identity at symbol level: B1(B h) = 0 for every h.
  std::mt19937_64 rng(13);
  for (int n : {3, 7}) {
    const auto xi = random_int_vector(n, rng);
    EXPECT_EQ(bianchi_B1(apply_B(xi, random_int_sym(n, rng)), xi), DenseTensor<Exact>(n, 1));
  }
}
