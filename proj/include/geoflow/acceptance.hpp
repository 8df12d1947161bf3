#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "einstein.hpp"
#include "g2.hpp"
#include "hodge_flow.hpp"
#include "io.hpp"
#include "map_laplacian.hpp"
#include "symbols.hpp"
#include "warped.hpp"

namespace geoflow {

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  Json metrics = Json::object();
  double seconds = 0.0;
};

namespace acceptance {

inline std::string exact_str(const Exact& v) { return ScalarTraits<Exact>::to_string(v); }

/// phi0 with the sign of the e123 component flipped.
inline DenseTensor<Exact> mutated_phi0() {
  auto phi = standard_phi<Exact>();
  phi.set_antisym({0, 1, 2}, -phi(0, 1, 2));
  return phi;
}

/// Point with the flat metric and psi = *phi, as for the standard structure.
inline G2Point<Exact> flat_point(const DenseTensor<Exact>& phi) {
  G2Point<Exact> p;
  p.phi = phi;
  p.metric = identity_metric<Exact>(7);
  p.psi = hodge_star(phi, p.metric, 1);
  return p;
}

inline CriterionResult identities(const DenseTensor<Exact>& phi) {
  CriterionResult r{1, "G2 contraction identities and norms"};
  const auto pt = flat_point(phi);
  bool pass = true;
  Json res = Json::array();
  for (int k = 1; k <= 6; ++k) {
    const Exact v = contraction_identity_residual(k, pt);
    res.push_back(exact_str(v));
    pass = pass && v == 0;
  }
  const auto [p2, s2] = raw_square_norms(pt);
  r.metrics["residuals"] = res;
  r.metrics["phi_norm_sq"] = exact_str(p2);
  r.metrics["psi_raw_trace"] = exact_str(s2);
  r.pass = pass && p2 == 42 && s2 == 168;
  return r;
}

inline CriterionResult metric_recovery() {
  CriterionResult r{2, "metric from the standard 3-form; NotAG2Structure handling"};
  const auto phi = standard_phi<Exact>();
  const auto m = metric_from_3form(phi);
  const bool identity = m.metric == identity_metric<Exact>(7) && m.volume == 1;
  r.metrics["metric_is_identity"] = identity;
  r.metrics["volume"] = exact_str(m.volume);
  auto raises = [](const DenseTensor<Exact>& f, int orient) {
    try {
      metric_from_3form(f, orient);
    } catch (const NotAG2Structure&) {
      return true;
    }
    return false;
  };
  const DenseTensor<Exact> zero(7, 3, Symmetry::antisym);
  DenseTensor<Exact> neg = phi;
  neg *= Exact(-1);
  const bool zero_raises = raises(zero, 1);
  const bool neg_raises = raises(neg, 1);
  bool neg_flipped_ok = false;
  try {
    const auto mf = metric_from_3form(neg, -1);
    neg_flipped_ok = mf.metric == identity_metric<Exact>(7) && mf.volume == 1;
  } catch (const std::exception&) {
  }
  r.metrics["zero_form_raises"] = zero_raises;
  r.metrics["neg_phi0_orientation_plus_raises"] = neg_raises;
  r.metrics["neg_phi0_orientation_minus_gives_identity"] = neg_flipped_ok;
  r.pass = identity && zero_raises && neg_raises && neg_flipped_ok;
  return r;
}

inline DenseTensor<Exact> integer_covector(int n, int variant) {
  DenseTensor<Exact> xi(n, 1);
  for (int i = 0; i < n; ++i) xi(i) = variant == 0 ? Exact(i == 0 ? 1 : 0) : Exact((i % 3) - 1 + (i == 0 ? 2 : 0));
  return xi;
}

inline CriterionResult symbols(const AcceptanceOptions& opt) {
  CriterionResult r{3, "principal symbols: ker B = im A, B + Q = |xi|^2 I, <B h, h> on the breve subspace"};
  bool pass = true;
  Json per_n = Json::array();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int n : {2, 3, 7}) {
    Json row{{"n", n}};
    bool kernel_ok = true, sum_ok = true;
    for (int variant : {0, 1}) {
      const auto xi = integer_covector(n, variant);
      const auto B = symbol_B_ricci<Exact>(xi).matrix;
      const auto Q = symbol_Q_deturck<Exact>(xi).matrix;
      const auto A = symbol_A_matrix<Exact>(xi);
      kernel_ok = kernel_ok && kernel_equals_span(B, A);
      Exact x2 = 0;
      for (const auto& v : xi.entries) x2 += v * v;
      sum_ok = sum_ok && (B + Q) == x2 * Matrix<Exact>::identity(B.rows);
    }
    double worst = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
      DenseTensor<double> xi(n, 1), h(n, 2, Symmetry::sym2);
      for (auto& v : xi.entries) v = normal(rng);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) h.set_sym(i, j, normal(rng));
      const auto hb = breve_projection(h, xi);
      double x2 = 0.0;
      for (double v : xi.entries) x2 += v * v;
      const double lhs = full_contraction(apply_B(xi, hb), hb), rhs = x2 * full_contraction(hb, hb);
      worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)));
    }
    row["kernel_equals_image"] = kernel_ok;
    row["B_plus_Q_exact"] = sum_ok;
    row["breve_max_rel_error"] = worst;
    pass = pass && kernel_ok && sum_ok && worst < 1e-12;
    per_n.push_back(row);
  }
  r.metrics["per_n"] = per_n;
  r.metrics["draws_per_n"] = 1000;
  r.pass = pass;
  return r;
}

inline CriterionResult rb_interval() {
  CriterionResult r{4, "Ricci-Bourguignon parabolicity interval and the non-self-adjoint counterexample"};
  const std::vector<std::tuple<int, double, double>> reference = {{3, -3.09717, 0.43050}, {7, -3.58784, 0.15927}};
  bool pass = true;
  Json rows = Json::array();
  for (const auto& [n, lo_ref, hi_ref] : reference) {
    const auto scan = rb_scan(n, -5.0, 1.0, 0.01);
    const int dim = n;
    const auto [lo, hi] = locate_interval(
        scan, [](const RbScanRow& row) { return row.certified; },
        [dim](double b) { return parabolicity_report(rb_certificate_form(dim, b)).positive; });
    const auto [tlo, thi] = locate_interval(
        scan, [](const RbScanRow& row) { return row.positive; },
        [dim](double b) { return parabolicity_report(rb_symbol(basis_vector<double>(dim, 0), b)).positive; });
    bool certified_implies_positive = true;
    for (const auto& row : scan) certified_implies_positive = certified_implies_positive && (!row.certified || row.positive);
    const double err = std::max(std::fabs(lo - lo_ref), std::fabs(hi - hi_ref));
    rows.push_back({{"n", n},
                    {"certified_interval", {lo, hi}},
                    {"endpoint_error", err},
                    {"symbol_positive_interval", {tlo, thi}},
                    {"certified_implies_positive", certified_implies_positive}});
    pass = pass && err < 1e-3 && certified_implies_positive;
  }
  Matrix<double> G(2, 2);
  G(0, 0) = 1;
  G(0, 1) = 4;
  G(1, 1) = 1;
  const auto rep = parabolicity_report(G);
  Matrix<Exact> Ge(2, 2);
  Ge(0, 0) = 1;
  Ge(0, 1) = 4;
  Ge(1, 1) = 1;
  const std::vector<Exact> v = {1, -1};
  const auto Gv = Ge * v;
  const Exact q = Gv[0] * v[0] + Gv[1] * v[1];
  r.metrics["scans"] = rows;
  r.metrics["counterexample_min_sym_eig"] = rep.min_sym_eig;
  r.metrics["counterexample_positive"] = rep.positive;
  r.metrics["counterexample_Gv_v"] = exact_str(q);
  r.pass = pass && !rep.positive && q == -2;
  return r;
}

inline CriterionResult dgk() {
  CriterionResult r{5, "DGK admissibility of the three named flows"};
  struct Named {
    const char* name;
    FlowCoefficients c;
    bool expected;
  };
  const std::vector<Named> sets = {{"dirichlet_energy", {-0.5, 0.0, 1.0, 0.0}, true},
                                   {"pure_ricci", {0.0, 0.0, 0.0, 0.0}, false},
                                   {"ricci_isometric", {0.0, 0.0, 1.0, 0.0}, true}};
  bool pass = true;
  for (const auto& s : sets) {
    const auto res = dgk_admissible(s.c);
    r.metrics[s.name] = {{"admissible", res.admissible}, {"failed", res.failed()}};
    pass = pass && res.admissible == s.expected;
  }
  r.pass = pass;
  return r;
}

inline Eigen::Matrix3d round_sphere_chart(const std::array<double, 3>& x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  const double c = 4.0 / ((1.0 + r2) * (1.0 + r2));
  return (c * Eigen::Matrix3d::Identity()).eval();
}

inline double sphere_scalar_error(int N) {
  const auto geo = GridGeometry::patch({N, N}, {-0.5, -0.5}, {1.0, 1.0});
  const auto cb = curvature(MetricGrid(geo, sample_metric(geo, round_sphere_chart)));
  Field e = cb.R;
  for (auto& v : e.data) v -= 2.0;
  return e.max_abs([&](std::size_t node) { return geo.interior(node, 2); });
}

inline CriterionResult curvature_engine() {
  CriterionResult r{6, "curvature engine: flat, sphere, linearization, plane waves"};
  // Flat metric: every curvature component is exactly zero.
  const auto tgeo = GridGeometry::torus({16, 16, 16});
  const auto flat_cb = curvature(MetricGrid(tgeo, flat_metric(tgeo)));
  const double flat = std::max({flat_cb.Gamma.max_abs(), flat_cb.Rm.max_abs(), flat_cb.Rc.max_abs(), flat_cb.R.max_abs()});
  // Round sphere in stereographic coordinates, interior nodes of [-1/2, 1/2]^2.
  const double e64 = sphere_scalar_error(65), e128 = sphere_scalar_error(129);
  const double order = std::log2(e64 / e128);
  // Linearized Ricci against the finite-difference oracle at the flat metric.
  const auto geo = GridGeometry::torus({64, 64});
  const MetricGrid flatg(geo, flat_metric(geo));
  const Field h = sample_field(geo, 4, [](const std::array<double, 3>& x, double* o) {
    o[0] = std::sin(2 * M_PI * x[0]) + 0.5 * std::cos(2 * M_PI * x[1]);
    o[1] = o[2] = 0.3 * std::sin(2 * M_PI * (x[0] + x[1]));
    o[3] = std::cos(4 * M_PI * x[0]);
  });
  const double lin = (linearized_ricci(h, flatg) - fd_linearization_oracle(ricci_operator, flatg, h)).max_abs();
  // Plane waves h = H cos(2 pi k.x) against (2 pi)^2 B(k) H / 2.
  double plane = 0.0;
  const int N = 128;
  const auto pgeo = GridGeometry::torus({N, N});
  const MetricGrid pflat(pgeo, flat_metric(pgeo));
  DenseTensor<double> H(2, 2, Symmetry::sym2);
  H(0, 0) = 0.3;
  H.set_sym(0, 1, -0.7);
  H(1, 1) = 1.1;
  for (const auto& k : std::vector<std::array<int, 2>>{{1, 0}, {0, 1}, {1, 1}}) {
    auto phase = [&](const std::array<double, 3>& x) { return std::cos(2 * M_PI * (k[0] * x[0] + k[1] * x[1])); };
    const Field hw = sample_field(pgeo, 4, [&](const std::array<double, 3>& x, double* o) {
      for (int i = 0; i < 4; ++i) o[i] = H.entries[i] * phase(x);
    });
    const Field L = linearized_ricci(hw, pflat);
    const auto BH = apply_B(covector<double>({double(k[0]), double(k[1])}), H);
    double num = 0.0, den = 0.0;
    for (std::size_t node = 0; node < pgeo.nodes(); ++node) {
      const double c = phase(pgeo.position(node));
      for (int i = 0; i < 4; ++i) {
        const double ex = 2.0 * M_PI * M_PI * BH.entries[i] * c;
        num = std::max(num, std::fabs(L(node, i) - ex));
        den = std::max(den, std::fabs(ex));
      }
    }
    plane = std::max(plane, num / den);
  }
  r.metrics["flat_max_abs"] = flat;
  r.metrics["sphere_error_65"] = e64;
  r.metrics["sphere_error_129"] = e128;
  r.metrics["sphere_order"] = order;
  r.metrics["sphere_error_128"] = sphere_scalar_error(128);
  r.metrics["linearized_ricci_vs_oracle"] = lin;
  r.metrics["plane_wave_rel_error_128"] = plane;
  r.pass = flat == 0.0 && r.metrics["sphere_error_128"].get<double>() < 5e-3 && order >= 1.8 && order <= 2.2 &&
           lin < 1e-4 && plane < 1e-3;
  return r;
}

/// I + a few random low-frequency terms; entries stay within 0.25 of the identity.
inline MetricFunction random_smooth_metric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-0.04, 0.04), ph(0.0, 2 * M_PI);
  std::array<std::array<double, 12>, 3> c{};
  for (auto& comp : c)
    for (double& v : comp) v = amp(rng);
  std::array<double, 12> phases{};
  for (double& p : phases) p = ph(rng);
  return [c, phases](const std::array<double, 3>& x) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    double e[3] = {0, 0, 0};
    for (int comp = 0; comp < 3; ++comp)
      for (int t = 0; t < 3; ++t) {
        const int k1 = t % 2 + 1, k2 = t / 2 + (t == 0 ? 0 : 1);
        e[comp] += c[comp][t] * std::sin(2 * M_PI * (k1 * x[0] + k2 * x[1]) + phases[comp * 3 + t]);
      }
    m(0, 0) += 2.0 * e[0];
    m(1, 1) += 2.0 * e[1];
    m(0, 1) = m(1, 0) = e[2];
    return m;
  };
}

inline CriterionResult map_laplacian_check(const AcceptanceOptions& opt) {
  CriterionResult r{7, "identity-map Laplacian against the closed formula"};
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto geo = GridGeometry::torus({768, 768});
  double worst = 0.0;
  Json runs = Json::array();
  for (int trial = 0; trial < 2; ++trial) {
    const auto g = random_smooth_metric(rng), h = random_smooth_metric(rng);
    const MetricGrid grid(geo, sample_metric(geo, g));
    const Field lhs = map_laplacian(TorusMap::identity(geo), grid, h);
    const Field rhs = identity_map_laplacian_formula(geo, g, h);
    const double e = (lhs - rhs).max_abs();
    runs.push_back({{"error", e}, {"magnitude", rhs.max_abs()}});
    worst = std::max(worst, e);
  }
  r.metrics["grid"] = {768, 768};
  r.metrics["trials"] = runs;
  r.metrics["max_error"] = worst;
  r.pass = worst < 1e-4;
  return r;
}

inline FourierForm random_form(int n, int degree, int K, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierForm a(n, degree, 16);
  const auto comps = combinations(n, degree);
  for (int m0 = -K; m0 <= K; ++m0)
    for (int m1 = -K; m1 <= K; ++m1) {
      const Mode m{m0, n > 1 ? m1 : 0, 0};
      if (n == 1 && m1 != 0) continue;
      // One representative per +-m pair.
      if (m[0] < 0 || (m[0] == 0 && m[1] < 0)) continue;
      for (const auto& I : comps) a.add_real_term(m, I, {normal(rng), m == Mode{0, 0, 0} ? 0.0 : normal(rng)});
    }
  return a;
}

inline CriterionResult hodge(const AcceptanceOptions& opt) {
  CriterionResult r{8, "spectral Hodge heat flow and decomposition"};
  FourierForm a(2, 1);
  a.add_real_term({0, 0, 0}, {1}, 1.0);
  a.add_real_term({1, 0, 0}, {0}, 0.5);
  double decay = 0.0;
  for (double t : {0.001, 0.01, 0.05, 0.2}) {
    const auto at = hodge_heat_step(a, t);
    const double factor = at.modes.at({1, 0, 0})[0].real() / 0.5;
    decay = std::max(decay, std::fabs(factor - std::exp(-4.0 * M_PI * M_PI * t)));
  }
  const auto lim = hodge_heat_limit(a);
  FourierForm dx2(2, 1);
  dx2.add_real_term({0, 0, 0}, {1}, 1.0);
  const double limit_err = max_abs_coeff(lim - dx2);

  std::mt19937_64 rng(opt.seed + 8);
  double ortho = 0.0, reassembly = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_form(2, 1, 4, rng);
    const auto p = hodge_decompose(f);
    ortho = std::max({ortho, std::fabs(l2_inner(p.harmonic, p.exact)), std::fabs(l2_inner(p.harmonic, p.coexact)),
                      std::fabs(l2_inner(p.exact, p.coexact))});
    reassembly = std::max(reassembly, max_abs_coeff(p.harmonic + p.exact + p.coexact - f));
  }
  r.metrics["mode10_decay_error"] = decay;
  r.metrics["limit_error"] = limit_err;
  r.metrics["orthogonality_residual"] = ortho;
  r.metrics["reassembly_residual"] = reassembly;
  r.pass = decay < 1e-10 && limit_err == 0.0 && ortho < 1e-12 && reassembly < 1e-12;
  return r;
}

inline CriterionResult einstein() {
  CriterionResult r{9, "Einstein-ray Ricci flow: extinction time and scale invariance"};
  bool ext_ok = true;
  for (double lambda : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    const double T = extinction_time(lambda);
    bool threw = false;
    try {
      einstein_flow(lambda, T);
    } catch (const ExtinctError&) {
      threw = true;
    }
    const auto before = einstein_flow(lambda, std::nextafter(T, 0.0));
    ext_ok = ext_ok && T == 1.0 / (2.0 * lambda) && threw && before.c > 0.0;
  }
  const bool immortal = std::isinf(extinction_time(0.0)) && std::isinf(extinction_time(-1.0)) &&
                        einstein_flow(-1.0, 10.0).c == 21.0 && einstein_flow(0.0, 5.0).c == 1.0;
  const auto chk = einstein_scale_check(1.0, 0.25, 256);
  r.metrics["extinction_exact"] = ext_ok;
  r.metrics["nonpositive_lambda_immortal"] = immortal;
  r.metrics["flow_residual"] = chk.flow_residual;
  r.metrics["scale_residual"] = chk.scale_residual;
  r.pass = ext_ok && immortal && chk.flow_residual < 1e-3 && chk.scale_residual < 1e-3;
  return r;
}

inline Jet constant_jet(std::size_t N, double v) { return {std::vector<double>(N, v), std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)}; }

inline CriterionResult warped() {
  CriterionResult r{10, "warped coflow: stationary data, torsion-free cone, nearly parallel Ricci"};
  WarpedState cy;
  cy.geometry = WarpedGeometry::CY;
  cy.domain = WarpedDomain::circle;
  cy.L = 1.0;
  cy.ell.assign(64, 1.0);
  cy.theta.assign(64, 0.3);
  cy.G.assign(64, 1.7);
  const double cy_rhs = coflow_rhs(cy).max_abs();
  const auto tr = coflow_integrate(cy, 0.01, stable_dt(cy));
  double drift = 0.0;
  for (int i = 0; i < cy.N(); ++i)
    drift = std::max({drift, std::fabs(tr.final_state.theta[i] - cy.theta[i]), std::fabs(tr.final_state.G[i] - cy.G[i])});

  const std::size_t N = 101;
  WarpedJets cone{WarpedGeometry::NK, constant_jet(N, 0.0), constant_jet(N, 0.0), constant_jet(N, 1.0)};
  for (std::size_t i = 0; i < N; ++i) {
    cone.ell.v[i] = 1.0 + static_cast<double>(i) / (N - 1);
    cone.ell.d1[i] = 1.0;
  }
  const double nk_rhs = coflow_rhs(cone).max_abs();
  const auto tf = warped_torsion_forms(cone);
  double tau = 0.0;
  for (std::size_t i = 0; i < N; ++i) tau = std::max({tau, std::fabs(tf.tau0[i]), std::fabs(tf.tau1[i])});
  const double res = nk_soliton_residual(cone.ell, cone.theta, constant_jet(N, 0.0), 0.0).max_abs();

  const Exact lambda = Exact(3) / Exact(2);
  const auto pt = standard_structure<Exact>();
  DenseTensor<Exact> T = identity_metric<Exact>(7);
  T *= lambda;
  const auto Rc = ricci_from_torsion(T, DenseTensor<Exact>(7, 3), pt);
  DenseTensor<Exact> expect = identity_metric<Exact>(7);
  expect *= Exact(6) * lambda * lambda;
  const bool nearly_parallel = Rc == expect;

  r.metrics["cy_rhs_max"] = cy_rhs;
  r.metrics["cy_trajectory_drift"] = drift;
  r.metrics["cy_steps"] = static_cast<int>(tr.records.size()) - 1;
  r.metrics["nk_cone_rhs_max"] = nk_rhs;
  r.metrics["nk_cone_torsion_max"] = tau;
  r.metrics["nk_cone_residual_max"] = res;
  r.metrics["ricci_from_torsion_6_lambda_sq"] = nearly_parallel;
  r.pass = cy_rhs <= 1e-14 && drift <= 1e-14 && tr.status == "ok" && nk_rhs < 1e-10 && tau < 1e-10 && res < 1e-10 &&
           nearly_parallel;
  return r;
}

}  // namespace acceptance

constexpr int kCriterionCount = 11;

inline std::string criterion_title(int id) {
  static const char* titles[] = {"",
                                 "G2 contraction identities and norms",
                                 "metric from the standard 3-form; NotAG2Structure handling",
                                 "principal symbols: ker B = im A, B + Q = |xi|^2 I, <B h, h> on the breve subspace",
                                 "Ricci-Bourguignon parabolicity interval and the non-self-adjoint counterexample",
                                 "DGK admissibility of the three named flows",
                                 "curvature engine: flat, sphere, linearization, plane waves",
                                 "identity-map Laplacian against the closed formula",
                                 "spectral Hodge heat flow and decomposition",
                                 "Einstein-ray Ricci flow: extinction time and scale invariance",
                                 "warped coflow: stationary data, torsion-free cone, nearly parallel Ricci",
                                 "determinism under a fixed seed and the phi0 sign-flip mutation"};
  if (id < 1 || id > kCriterionCount) throw ValidationError("criterion id must be in 1..11");
  return titles[id];
}

/// Runtime budgets in seconds (criteria without one return 0).
inline double criterion_budget(int id) {
  switch (id) {
    case 1: return 10.0;
    case 6: return 60.0;
    default: return 0.0;
  }
}

inline CriterionResult run_criterion_body(int id, const AcceptanceOptions& opt) {
  switch (id) {
    case 1: return acceptance::identities(standard_phi<Exact>());
    case 2: return acceptance::metric_recovery();
    case 3: return acceptance::symbols(opt);
    case 4: return acceptance::rb_interval();
    case 5: return acceptance::dgk();
    case 6: return acceptance::curvature_engine();
    case 7: return acceptance::map_laplacian_check(opt);
    case 8: return acceptance::hodge(opt);
    case 9: return acceptance::einstein();
    case 10: return acceptance::warped();
    case 11: {
      CriterionResult r{11, criterion_title(11)};
      const std::string a = acceptance::symbols(opt).metrics.dump(), b = acceptance::symbols(opt).metrics.dump();
      const std::string c = acceptance::hodge(opt).metrics.dump(), d = acceptance::hodge(opt).metrics.dump();
      const auto mutated = acceptance::identities(acceptance::mutated_phi0());
      r.metrics["seeded_output_identical"] = a == b && c == d;
      r.metrics["mutation_caught"] = !mutated.pass;
      r.metrics["mutated_residuals"] = mutated.metrics["residuals"];
      r.pass = a == b && c == d && !mutated.pass;
      return r;
    }
    default: throw ValidationError("criterion id must be in 1..11");
  }
}

/// Runs one criterion, timing it and enforcing its runtime budget.
inline CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = run_criterion_body(id, opt);
  } catch (const std::exception& e) {
    r = CriterionResult{id, criterion_title(id), false};
    r.metrics["exception"] = e.what();
  }
  r.title = criterion_title(id);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double budget = criterion_budget(id);
  if (budget > 0.0 && r.seconds > budget) {
    r.pass = false;
    r.metrics["runtime_budget_exceeded"] = budget;
  }
  return r;
}

constexpr double kSelftestBudgetSeconds = 300.0;

/// All criteria in order; criterion 11 also fails if the whole run exceeds kSelftestBudgetSeconds.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {},
                                                   const std::function<void(const CriterionResult&)>& on_result = {}) {
  std::vector<CriterionResult> out;
  double total = 0.0;
  for (int id = 1; id <= kCriterionCount; ++id) {
    auto r = run_criterion(id, opt);
    total += r.seconds;
    if (id == kCriterionCount && total > kSelftestBudgetSeconds) {
      r.pass = false;
      r.metrics["runtime_budget_exceeded"] = kSelftestBudgetSeconds;
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

/// Machine-readable summary without timings, so equal seeds give equal bytes.
inline Json acceptance_report(const std::vector<CriterionResult>& results, std::uint64_t seed) {
  Json crit = Json::array();
  bool all = true;
  for (const auto& r : results) {
    crit.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"metrics", r.metrics}});
    all = all && r.pass;
  }
  return {{"seed", seed}, {"all_pass", all}, {"criteria", crit}};
}

}  // namespace geoflow
