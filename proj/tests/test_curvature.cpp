#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geoflow/acceptance.hpp"
#include "geoflow/curvature.hpp"
#include "geoflow/map_laplacian.hpp"
#include "geoflow/symbols.hpp"

using namespace geoflow;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double u_conf(const std::array<double, 3>& x) { return 0.1 * std::sin(kTwoPi * x[0]); }
double du_conf(const std::array<double, 3>& x) { return 0.1 * kTwoPi * std::cos(kTwoPi * x[0]); }

Eigen::Matrix3d conformal(const std::array<double, 3>& x) {
  return (std::exp(2.0 * u_conf(x)) * Eigen::Matrix3d::Identity()).eval();
}

// Gamma^k_ij = delta^k_i d_j u + delta^k_j d_i u - delta_ij d_k u for g = e^{2u} delta.
double conformal_gamma(int n, int k, int i, int j, const std::array<double, 3>& x) {
  auto du = [&](int a) { return a == 0 ? du_conf(x) : 0.0; };
  double v = 0.0;
  if (k == i) v += du(j);
  if (k == j) v += du(i);
  if (i == j) v -= du(k);
  (void)n;
  return v;
}

double christoffel_error(int N) {
  const auto geo = GridGeometry::torus({N, N});
  const auto G = christoffel(MetricGrid(geo, sample_metric(geo, conformal)));
  double err = 0.0;
  for (std::size_t node = 0; node < geo.nodes(); ++node)
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          err = std::max(err, std::fabs(G(node, (k * 2 + i) * 2 + j) - conformal_gamma(2, k, i, j, geo.position(node))));
  return err;
}

MetricGrid smooth_grid(const GridGeometry& geo, unsigned seed) {
  std::mt19937_64 rng(seed);
  if (geo.n == 2) return MetricGrid(geo, sample_metric(geo, acceptance::random_smooth_metric(rng)));
  return MetricGrid(geo, sample_metric(geo, [](const std::array<double, 3>& x) {
                      Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
                      m(0, 0) += 0.2 * std::sin(kTwoPi * x[1]);
                      m(1, 1) += 0.15 * std::cos(kTwoPi * (x[0] + x[2]));
                      m(2, 2) += 0.1 * std::sin(kTwoPi * x[0]);
                      m(0, 2) = m(2, 0) = 0.05 * std::cos(kTwoPi * x[1]);
                      return m;
                    }));
}

Field smooth_sym_field(const GridGeometry& geo) {
  const int n = geo.n;
  return sample_field(geo, n * n, [n](const std::array<double, 3>& x, double* o) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = std::sin(kTwoPi * (x[0] + (i + 1) * x[1]) + 0.3 * j) + 0.2 * std::cos(kTwoPi * (i + j) * x[0]);
        o[i * n + j] = o[j * n + i] = v;
      }
  });
}

Field smooth_covector(const GridGeometry& geo) {
  const int n = geo.n;
  return sample_field(geo, n, [n](const std::array<double, 3>& x, double* o) {
    for (int k = 0; k < n; ++k) o[k] = std::cos(kTwoPi * (x[1] + k * x[0])) + 0.5 * std::sin(kTwoPi * x[0]);
  });
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Christoffel and curvature

TEST(Curvature, FlatMetricIsExactlyZero) {
  for (const auto& geo : {GridGeometry::torus({12, 12}), GridGeometry::torus({6, 6, 6}),
                          GridGeometry::patch({9, 9}, {-1.0, 2.0}, {0.5, 0.5})}) {
    const auto cb = curvature(MetricGrid(geo, flat_metric(geo)));
    EXPECT_EQ(cb.Gamma.max_abs(), 0.0);
    EXPECT_EQ(cb.Rm.max_abs(), 0.0);
    EXPECT_EQ(cb.Rc.max_abs(), 0.0);
    EXPECT_EQ(cb.R.max_abs(), 0.0);
  }
}

TEST(Christoffel, ConformalMetricMatchesAnalyticFormulaAtSecondOrder) {
  const double e32 = christoffel_error(32), e64 = christoffel_error(64);
  EXPECT_LT(e64, 2e-3);
  const double order = std::log2(e32 / e64);
  EXPECT_GT(order, 1.8);
  EXPECT_LT(order, 2.2);
}

TEST(Curvature, StereographicSphereHasScalarCurvatureTwo) {
  const double e65 = acceptance::sphere_scalar_error(65), e129 = acceptance::sphere_scalar_error(129);
  EXPECT_LT(e129, 5e-3);
  EXPECT_LT(acceptance::sphere_scalar_error(128), 5e-3);
  const double order = std::log2(e65 / e129);
  EXPECT_GT(order, 1.8);
  EXPECT_LT(order, 2.2);
}

TEST(Curvature, ConstantRescalingOfTheMetric) {
  const auto geo = GridGeometry::torus({24, 24});
  const Field g = sample_metric(geo, conformal);
  Field g4 = g;
  g4 *= 4.0;
  const auto a = curvature(MetricGrid(geo, g)), b = curvature(MetricGrid(geo, g4));
  const double tol = 1e-12 * std::max(1.0, a.Rm.max_abs());
  EXPECT_LT((a.Gamma - b.Gamma).max_abs(), 1e-12);
  Field rm4 = a.Rm;
  rm4 *= 4.0;
  EXPECT_LT((rm4 - b.Rm).max_abs(), 4 * tol);
  EXPECT_LT((a.Rc - b.Rc).max_abs(), tol);
  Field r4 = b.R;
  r4 *= 4.0;
  EXPECT_LT((a.R - r4).max_abs(), tol);
}

TEST(Curvature, RiemannSymmetriesAndTraces) {
  for (const auto& geo : {GridGeometry::torus({48, 48}), GridGeometry::torus({16, 16, 16})}) {
    const int n = geo.n;
    const auto grid = smooth_grid(geo, 3);
    const auto cb = curvature(grid);
    const double scale = cb.Rm.max_abs();
    ASSERT_GT(scale, 0.0);
    double anti_ij = 0.0, anti_kl = 0.0, pair = 0.0, rc_sym = 0.0, rc_trace = 0.0, r_trace = 0.0;
    auto rm = [&](std::size_t node, int i, int j, int k, int l) { return cb.Rm(node, ((i * n + j) * n + k) * n + l); };
    for (std::size_t node = 0; node < geo.nodes(); ++node) {
      const Eigen::MatrixXd ginv = detail::node_matrix(grid.g, node, n).inverse();
      double R = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              anti_ij = std::max(anti_ij, std::fabs(rm(node, i, j, k, l) + rm(node, j, i, k, l)));
              anti_kl = std::max(anti_kl, std::fabs(rm(node, i, j, k, l) + rm(node, i, j, l, k)));
              pair = std::max(pair, std::fabs(rm(node, i, j, k, l) - rm(node, k, l, i, j)));
            }
          rc_sym = std::max(rc_sym, std::fabs(cb.Rc(node, i * n + j) - cb.Rc(node, j * n + i)));
          double rc = 0.0;
          for (int a = 0; a < n; ++a)
            for (int l = 0; l < n; ++l) rc += ginv(a, l) * rm(node, a, i, j, l);
          rc_trace = std::max(rc_trace, std::fabs(rc - cb.Rc(node, i * n + j)));
          R += ginv(i, j) * cb.Rc(node, i * n + j);
        }
      r_trace = std::max(r_trace, std::fabs(R - cb.R(node, 0)));
    }
    EXPECT_LT(anti_ij, 1e-12 * scale) << "n = " << n;
    EXPECT_LT(anti_kl, 2e-2 * scale) << "n = " << n;
    EXPECT_LT(pair, 2e-2 * scale) << "n = " << n;
    EXPECT_LT(rc_sym, 2e-2 * scale) << "n = " << n;
    EXPECT_LT(rc_trace, 1e-12 * scale) << "n = " << n;
    EXPECT_LT(r_trace, 1e-12 * scale) << "n = " << n;
  }
}

TEST(Curvature, SymmetryDefectsShrinkUnderRefinement) {
  auto defect = [](int N) {
    const auto geo = GridGeometry::torus({N, N});
    const auto cb = curvature(smooth_grid(geo, 3));
    double d = 0.0;
    for (std::size_t node = 0; node < geo.nodes(); ++node) d = std::max(d, std::fabs(cb.Rc(node, 1) - cb.Rc(node, 2)));
    return d;
  };
  const double d24 = defect(24), d48 = defect(48);
  EXPECT_GT(d24 / d48, 3.0);
}

// ---------------------------------------------------------------------------------------------
// Div, Div*, adjointness

TEST(DivStar, ConstantCovectorOnFlatMetric) {
  const auto geo = GridGeometry::torus({10, 10});
  const Field X = sample_field(geo, 2, [](const std::array<double, 3>&, double* o) {
    o[0] = 1.5;
    o[1] = -2.0;
  });
  EXPECT_EQ(divstar(X, MetricGrid(geo, flat_metric(geo))).max_abs(), 0.0);
}

TEST(DivStar, SineCovectorOnFlatMetric) {
  const auto geo = GridGeometry::torus({64, 64});
  const Field X = sample_field(geo, 2, [](const std::array<double, 3>& x, double* o) {
    o[0] = std::sin(kTwoPi * x[0]);
    o[1] = 0.0;
  });
  const Field D = divstar(X, MetricGrid(geo, flat_metric(geo)));
  double err = 0.0, off = 0.0;
  for (std::size_t node = 0; node < geo.nodes(); ++node) {
    err = std::max(err, std::fabs(D(node, 0) + kTwoPi * std::cos(kTwoPi * geo.position(node)[0])));
    off = std::max({off, std::fabs(D(node, 1)), std::fabs(D(node, 2)), std::fabs(D(node, 3))});
  }
  EXPECT_LT(err, 2e-3 * kTwoPi);
  EXPECT_EQ(off, 0.0);
}

TEST(DivStar, DivergenceOfFlatFieldMatchesHandDerivative) {
  const auto geo = GridGeometry::torus({64, 64});
  const Field h = sample_field(geo, 4, [](const std::array<double, 3>& x, double* o) {
    o[0] = std::sin(kTwoPi * x[0]);
    o[1] = o[2] = std::cos(kTwoPi * x[1]);
    o[3] = 0.0;
  });
  const Field D = divergence(h, MetricGrid(geo, flat_metric(geo)));
  double err = 0.0;
  for (std::size_t node = 0; node < geo.nodes(); ++node) {
    const auto x = geo.position(node);
    err = std::max(err, std::fabs(D(node, 0) - kTwoPi * (std::cos(kTwoPi * x[0]) - std::sin(kTwoPi * x[1]))));
    err = std::max(err, std::fabs(D(node, 1)));
  }
  EXPECT_LT(err, 4e-3 * kTwoPi);
}

TEST(Adjointness, IntegrationByPartsOnRandomSmoothMetrics) {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto geo = GridGeometry::torus({64, 64});
    const auto grid = smooth_grid(geo, seed);
    const auto c = adjointness(smooth_sym_field(geo), smooth_covector(geo), grid);
    EXPECT_LT(std::fabs(c.residual), 1e-3) << "seed " << seed;
    EXPECT_GT(std::fabs(c.div_side), 1e-2);
  }
}

TEST(Adjointness, ResidualConvergesAtSecondOrder) {
  auto res = [](int N) {
    const auto geo = GridGeometry::torus({N, N});
    return std::fabs(adjointness(smooth_sym_field(geo), smooth_covector(geo), smooth_grid(geo, 5)).residual);
  };
  const double r32 = res(32), r64 = res(64);
  EXPECT_GT(r32 / r64, 3.0);
  EXPECT_THROW(adjointness(Field(), Field(), MetricGrid(GridGeometry::patch({6, 6}, {0, 0}, {1, 1}),
                                                        flat_metric(GridGeometry::patch({6, 6}, {0, 0}, {1, 1})))),
               ValidationError);
}

// ---------------------------------------------------------------------------------------------
// Linearizations

TEST(LinearizedRicci, MatchesFiniteDifferenceOracle) {
  const auto geo = GridGeometry::torus({64, 64});
  const MetricGrid flat(geo, flat_metric(geo));
  const Field h = smooth_sym_field(geo);
  EXPECT_LT((linearized_ricci(h, flat) - fd_linearization_oracle(ricci_operator, flat, h)).max_abs(), 1e-4);
  const auto geo3 = GridGeometry::torus({12, 12, 12});
  const MetricGrid flat3(geo3, flat_metric(geo3));
  const Field h3 = smooth_sym_field(geo3);
  EXPECT_LT((linearized_ricci(h3, flat3) - fd_linearization_oracle(ricci_operator, flat3, h3)).max_abs(), 1e-4);
}

TEST(LinearizedRicci, ConformalDirectionMatchesHandFormula) {
  // h = f delta with f = sin(2 pi x1), n = 2: D Rc(h) = -Laplace(f) delta / 2 = 2 pi^2 f delta.
  const auto geo = GridGeometry::torus({64, 64});
  const MetricGrid flat(geo, flat_metric(geo));
  const Field h = sample_field(geo, 4, [](const std::array<double, 3>& x, double* o) {
    o[0] = o[3] = std::sin(kTwoPi * x[0]);
    o[1] = o[2] = 0.0;
  });
  const Field L = linearized_ricci(h, flat), S = linearized_scalar(h, flat);
  double eL = 0.0, eS = 0.0;
  for (std::size_t node = 0; node < geo.nodes(); ++node) {
    const double f = std::sin(kTwoPi * geo.position(node)[0]);
    for (int c : {0, 3}) {
      eL = std::max(eL, std::fabs(L(node, c) - 2.0 * M_PI * M_PI * f));
      eS = std::max(eS, std::fabs(S(node, c) - 4.0 * M_PI * M_PI * f));
    }
    eL = std::max({eL, std::fabs(L(node, 1)), std::fabs(L(node, 2))});
  }
  EXPECT_LT(eL, 1e-2 * 2.0 * M_PI * M_PI);
  EXPECT_LT(eS, 1e-2 * 4.0 * M_PI * M_PI);
  EXPECT_LT((S - fd_linearization_oracle(scalar_metric_operator, flat, h)).max_abs(), 1e-4);
}

TEST(LinearizedScalar, MatchesFiniteDifferenceOracle) {
  const auto geo = GridGeometry::torus({64, 64});
  const MetricGrid flat(geo, flat_metric(geo));
  const Field h = smooth_sym_field(geo);
  EXPECT_LT((linearized_scalar(h, flat) - fd_linearization_oracle(scalar_metric_operator, flat, h)).max_abs(), 1e-4);
}

TEST(Linearized, ConstantDirectionGivesZero) {
  const auto geo = GridGeometry::torus({16, 16});
  const MetricGrid flat(geo, flat_metric(geo));
  const Field h = sample_field(geo, 4, [](const std::array<double, 3>&, double* o) {
    o[0] = 0.3;
    o[1] = o[2] = -1.2;
    o[3] = 2.0;
  });
  EXPECT_EQ(linearized_ricci(h, flat).max_abs(), 0.0);
  EXPECT_EQ(linearized_scalar(h, flat).max_abs(), 0.0);
}

TEST(Linearized, RejectsNonConstantBackground) {
  const auto geo = GridGeometry::torus({16, 16});
  const MetricGrid g(geo, sample_metric(geo, conformal));
  EXPECT_THROW(linearized_ricci(smooth_sym_field(geo), g), ValidationError);
  EXPECT_THROW(linearized_scalar(smooth_sym_field(geo), g), ValidationError);
}

TEST(Linearized, OracleStepTradeOff) {
  const auto geo = GridGeometry::torus({32, 32});
  const MetricGrid flat(geo, flat_metric(geo));
  const Field h = smooth_sym_field(geo);
  const Field L = linearized_ricci(h, flat);
  const double big = (L - fd_linearization_oracle(ricci_operator, flat, h, 1e-1)).max_abs();
  const double mid = (L - fd_linearization_oracle(ricci_operator, flat, h, 1e-5)).max_abs();
  EXPECT_GT(big, 100.0 * mid);
  EXPECT_LT(mid, 1e-6);
}

TEST(PlaneWave, LinearizedRicciIsHalfTheSymbolB) {
  // Composed central differences turn d_a d_b into -s_a s_b with s_a = sin(2 pi k_a h)/h, so the discrete operator
  // equals B(s) H cos / 2 up to rounding; the continuum limit (2 pi k) is checked at N = 128 to relative 1e-3.
  DenseTensor<double> H(2, 2, Symmetry::sym2);
  H(0, 0) = 0.3;
  H.set_sym(0, 1, -0.7);
  H(1, 1) = 1.1;
  for (int N : {64, 128}) {
    const auto geo = GridGeometry::torus({N, N});
    const MetricGrid flat(geo, flat_metric(geo));
    const double hs = 1.0 / N;
    for (const auto& k : std::vector<std::array<int, 2>>{{1, 0}, {0, 1}, {1, 1}, {2, -1}}) {
      auto phase = [&](const std::array<double, 3>& x) { return std::cos(kTwoPi * (k[0] * x[0] + k[1] * x[1])); };
      const Field hw = sample_field(geo, 4, [&](const std::array<double, 3>& x, double* o) {
        for (int i = 0; i < 4; ++i) o[i] = H.entries[i] * phase(x);
      });
      const auto discrete = covector<double>({std::sin(kTwoPi * k[0] * hs) / hs, std::sin(kTwoPi * k[1] * hs) / hs});
      const auto continuum = covector<double>({kTwoPi * k[0], kTwoPi * k[1]});
      const auto Bd = apply_B(discrete, H), Bc = apply_B(continuum, H);
      const auto Sd = apply_scalar(discrete, H), Sc = apply_scalar(continuum, H);
      const Field L = linearized_ricci(hw, flat), S = linearized_scalar(hw, flat);
      double exact_err = 0.0, cont_err = 0.0, cont_den = 0.0, s_exact = 0.0, s_cont = 0.0, s_den = 0.0;
      for (std::size_t node = 0; node < geo.nodes(); ++node) {
        const double c = phase(geo.position(node));
        for (int i = 0; i < 4; ++i) {
          exact_err = std::max(exact_err, std::fabs(L(node, i) - 0.5 * Bd.entries[i] * c));
          cont_err = std::max(cont_err, std::fabs(L(node, i) - 0.5 * Bc.entries[i] * c));
          cont_den = std::max(cont_den, std::fabs(0.5 * Bc.entries[i] * c));
          // The scalar linearization carries the opposite sign of its symbol: d -> i xi squares to -|xi|^2.
          s_exact = std::max(s_exact, std::fabs(S(node, i) + Sd.entries[i] * c));
          s_cont = std::max(s_cont, std::fabs(S(node, i) + Sc.entries[i] * c));
          s_den = std::max(s_den, std::fabs(Sc.entries[i] * c));
        }
      }
      EXPECT_LT(exact_err, 1e-9 * cont_den) << "N = " << N;
      EXPECT_LT(s_exact, 1e-9 * s_den) << "N = " << N;
      if (N == 128) {
        EXPECT_LT(cont_err / cont_den, 1e-3 * (k[0] * k[0] + k[1] * k[1]));
        EXPECT_LT(s_cont / s_den, 1e-3 * (k[0] * k[0] + k[1] * k[1]));
      }
    }
  }
}

// ---------------------------------------------------------------------------------------------
// DeTurck field

TEST(DeTurck, VanishesWhenMetricEqualsReference) {
  const auto geo = GridGeometry::torus({16, 16});
  const Field g = sample_metric(geo, conformal);
  EXPECT_EQ(deturck_field(MetricGrid(geo, g, g)).max_abs(), 0.0);
  EXPECT_THROW(deturck_field(MetricGrid(geo, g)), ValidationError);
}

TEST(DeTurck, ConformalMetricInThreeDimensions) {
  // g = e^{2u} delta, g0 = delta: W^k = (2 - n) e^{-2u} d_k u.
  const auto geo = GridGeometry::torus({256, 3, 3});
  const MetricGrid grid(geo, sample_metric(geo, conformal), flat_metric(geo));
  const Field W = deturck_field(grid);
  double err_formula = 0.0, err_oracle = 0.0;
  for (std::size_t node = 0; node < geo.nodes(); ++node) {
    const auto x = geo.position(node);
    const auto G = christoffel_at(conformal, x, 3);
    const Eigen::Matrix3d ginv = conformal(x).inverse();
    for (int k = 0; k < 3; ++k) {
      const double formula = k == 0 ? -std::exp(-2.0 * u_conf(x)) * du_conf(x) : 0.0;
      double oracle = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) oracle += ginv(i, j) * G[(k * 3 + i) * 3 + j];
      err_formula = std::max(err_formula, std::fabs(W(node, k) - formula));
      err_oracle = std::max(err_oracle, std::fabs(W(node, k) - oracle));
    }
  }
  EXPECT_LT(err_formula, 1e-4);
  EXPECT_LT(err_oracle, 1e-4);
}

TEST(DeTurck, TwoDimensionalConformalFieldVanishes) {
  const auto geo = GridGeometry::torus({32, 32});
  const Field W = deturck_field(MetricGrid(geo, sample_metric(geo, conformal), flat_metric(geo)));
  EXPECT_LT(W.max_abs(), 1e-14);
}

TEST(DeTurck, LinearizationAtFlatMetricIsY) {
  for (const auto& geo : {GridGeometry::torus({48, 48}), GridGeometry::torus({12, 12, 12})}) {
    const Field flat = flat_metric(geo);
    const Field h = smooth_sym_field(geo);
    const double eps = 1e-4;
    Field plus = deturck_field(MetricGrid(geo, flat + eps * h, flat));
    plus -= deturck_field(MetricGrid(geo, flat - eps * h, flat));
    plus *= 1.0 / (2.0 * eps);
    EXPECT_LT((plus - deturck_linearization(h, MetricGrid(geo, flat))).max_abs(), 1e-4) << "n = " << geo.n;
  }
}

// ---------------------------------------------------------------------------------------------
// Map Laplacian

TEST(MapLaplacian, IdentityBetweenFlatToriIsZero) {
  const auto geo = GridGeometry::torus({16, 16});
  const auto flat_fn = [](const std::array<double, 3>&) { return Eigen::Matrix3d::Identity().eval(); };
  EXPECT_EQ(map_laplacian(TorusMap::identity(geo), MetricGrid(geo, flat_metric(geo)), flat_fn).max_abs(), 0.0);
}

TEST(MapLaplacian, OneDimensionalPerturbedIdentity) {
  const auto flat_fn = [](const std::array<double, 3>&) { return Eigen::Matrix3d::Identity().eval(); };
  auto error = [&](int N) {
    const auto geo = GridGeometry::torus({N});
    TorusMap F = TorusMap::identity(geo);
    for (std::size_t node = 0; node < geo.nodes(); ++node) F.displacement(node, 0) = 0.1 * std::sin(kTwoPi * geo.position(node)[0]);
    const Field L = map_laplacian(F, MetricGrid(geo, flat_metric(geo)), flat_fn);
    double e = 0.0;
    for (std::size_t node = 0; node < geo.nodes(); ++node)
      e = std::max(e, std::fabs(L(node, 0) + 0.4 * M_PI * M_PI * std::sin(kTwoPi * geo.position(node)[0])));
    return e;
  };
  const double e128 = error(128), e256 = error(256);
  EXPECT_LT(e256, 1e-3 * 0.4 * M_PI * M_PI);
  EXPECT_GT(std::log2(e128 / e256), 1.8);
}

TEST(MapLaplacian, IdentityMapMatchesPulledBackFormula) {
  std::mt19937_64 rng(17);
  const auto g = acceptance::random_smooth_metric(rng), h = acceptance::random_smooth_metric(rng);
  auto error = [&](int N) {
    const auto geo = GridGeometry::torus({N, N});
    return (map_laplacian(TorusMap::identity(geo), MetricGrid(geo, sample_metric(geo, g)), h) -
            identity_map_laplacian_formula(geo, g, h))
        .max_abs();
  };
  const double e96 = error(96), e192 = error(192);
  EXPECT_LT(e192, 1e-3);
  const double order = std::log2(e96 / e192);
  EXPECT_GT(order, 1.8);
  EXPECT_LT(order, 2.2);
}

TEST(MapLaplacian, RejectsIndefiniteTarget) {
  const auto geo = GridGeometry::torus({8, 8});
  const auto bad = [](const std::array<double, 3>&) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(1, 1) = -1.0;
    return m;
  };
  EXPECT_THROW(map_laplacian(TorusMap::identity(geo), MetricGrid(geo, flat_metric(geo)), bad), ValidationError);
}

TEST(MetricGrid, RejectsNonPositiveMetric) {
  const auto geo = GridGeometry::torus({8, 8});
  Field g = flat_metric(geo);
  g(5, 3) = -1.0;
  EXPECT_THROW(MetricGrid(geo, g), ValidationError);
  Field a = flat_metric(geo);
  a(2, 1) = 0.5;
  EXPECT_THROW(MetricGrid(geo, a), ValidationError);
}
