#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geoflow/geoflow.hpp"

namespace geoflow::cli {

enum ExitCode { kOk = 0, kFailed = 1, kValidation = 2, kNumerical = 3 };

struct RunOptions {
  Json params = Json::object();
  std::string output;  // path prefix; empty means stdout
  std::uint64_t seed = 20240601;
  bool quiet = false;
};

/// Module operations reached during the current process (coverage bookkeeping).
inline std::set<std::string>& op_trace() {
  static std::set<std::string> ops;
  return ops;
}
inline void touch(std::initializer_list<const char*> names) {
  for (const char* n : names) op_trace().insert(n);
}

/// Artifacts produced by a command: the primary one goes to stdout when no prefix is given.
struct Artifacts {
  std::string csv;
  Json json;
  bool csv_primary = true;
  std::string timings_csv;
};

struct CommandSpec {
  const char* name;
  const char* summary;
  const char* csv_columns;
};

inline const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> list = {
      {"identities", "G2 contraction identities at the standard or a supplied 3-form", "identity,residual"},
      {"symbols", "principal symbol of a curvature operator at a covector", ""},
      {"rb-scan", "Ricci-Bourguignon parabolicity scan over b", "b,min_sym_eig,positive,certificate_min_eig,certified"},
      {"dgk-check", "DGK admissibility of flow coefficients", ""},
      {"curvature", "curvature of a metric grid, with oracle errors and consistency checks",
       "quantity,max_abs_error,interior_margin"},
      {"hodge-demo", "spectral Hodge heat flow on a flat torus",
       "t,l2_norm,harmonic_norm,exact_norm,coexact_norm,closedness_defect"},
      {"einstein-flow", "Ricci flow along an Einstein ray", "t,c"},
      {"coflow", "warped-product Laplacian coflow (RK4)", "t,rhs_norm,min_ell,min_G,max_abs,tau0_max,tau1_max"},
      {"soliton-scan", "CY soliton convention calibration or NK soliton residuals",
       "cy: b,c,sigma,tau,imag_residual,G_min,G_max,valid | nk: lambda,max_r1,max_r2,max_r3"},
      {"selftest", "acceptance suite", ""},
  };
  return list;
}

namespace detail {

inline Json vec_json(const DenseTensor<double>& v) { return v.entries; }

template <class S>
Json su2_json(const Su2Report<S>& rep) {
  Json j;
  Json jsq = Json::array(), vol = Json::array(), prod = Json::array();
  for (int i = 0; i < 3; ++i) {
    jsq.push_back(scalar_to_json(rep.j_squared_residual[i]));
    vol.push_back(scalar_to_json(rep.volume_residual[i]));
    prod.push_back(scalar_to_json(rep.product_rule_residual[i]));
  }
  j["j_squared_residual"] = jsq;
  j["volume_residual"] = vol;
  j["compatibility_sign"] = rep.compatibility_sign;
  j["product_rule_residual"] = prod;
  j["self_closure_residual"] = scalar_to_json(rep.self_closure_residual);
  j["bar_closure_residual"] = scalar_to_json(rep.bar_closure_residual);
  j["cross_residual"] = scalar_to_json(rep.cross_residual);
  Json table = Json::array();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Json c = Json::array();
      for (int k = 0; k < 3; ++k) c.push_back(scalar_to_json(rep.omega_diamond[a][b][k]));
      table.push_back({{"i", a + 1}, {"j", b + 1}, {"coords", c}});
    }
  j["omega_diamond"] = table;
  j["ok"] = rep.ok;
  return j;
}

template <class S>
S detail_max_abs(const DenseTensor<S>& t) {
  S m(0);
  for (const auto& e : t.entries) m = std::max(m, S(ScalarTraits<S>::abs(e)));
  return m;
}

template <class S>
Artifacts identities_impl(const Json& p) {
  touch({"standard_structure", "hodge_star_flat", "contraction_identity_residual", "cross_product", "diamond",
         "decompose_2form", "decompose_3form", "compose_3form", "torsion_from_nabla_phi", "ricci_from_torsion", "su2_algebra_check"});
  const int orientation = get_or<int>(p, "orientation", 1);
  if (orientation != 1 && orientation != -1) throw ValidationError("orientation must be +1 or -1");
  G2Point<S> pt;
  if (p.contains("phi")) {
    touch({"metric_from_3form"});
    pt = make_g2_point(tensor_from_json<S>(p.at("phi")), orientation);
  } else {
    pt = standard_structure<S>();
    if (orientation != 1) throw ValidationError("orientation applies only to a supplied phi");
  }
  Artifacts a;
  CsvWriter csv({"identity", "residual"});
  Json res = Json::array();
  for (int k = 1; k <= 6; ++k) {
    const S v = contraction_identity_residual(k, pt);
    csv.cell(k).cell(ScalarTraits<S>::to_string(v)).end_row();
    res.push_back(scalar_to_json(v));
  }
  a.csv = csv.str();
  const auto [p2, s2] = raw_square_norms(pt);
  Json j;
  j["residuals"] = res;
  j["phi_norm_sq"] = scalar_to_json(p2);
  j["psi_raw_trace"] = scalar_to_json(s2);
  j["metric"] = tensor_to_json(pt.metric);
  j["volume"] = scalar_to_json(pt.volume);
  j["orientation"] = pt.orientation;
  // e4 x e5 (1-based) and the diamond action of the metric on phi (3 phi at any G2 point).
  const auto cross = cross_product(basis_vector<S>(7, 3), basis_vector<S>(7, 4), pt);
  Json cj = Json::array();
  for (const auto& v : cross.entries) cj.push_back(scalar_to_json(v));
  j["cross_e4_e5"] = cj;
  DenseTensor<S> three_phi = pt.phi;
  three_phi *= S(3);
  j["metric_diamond_phi_minus_3phi"] = scalar_to_json(detail_max_abs(diamond(pt.metric, pt.phi, pt.metric) - three_phi));
  DenseTensor<S> e12(7, 2, Symmetry::antisym);
  e12.set_antisym({0, 1}, S(1));
  const auto split = decompose_2form(e12, pt);
  j["e12_split"] = {{"beta7", tensor_to_json(split.beta7)}, {"beta14", tensor_to_json(split.beta14)}};
  const auto parts = decompose_3form(pt.phi, pt);
  j["phi_parts"] = {{"f", scalar_to_json(parts.f)}, {"X_max_abs", scalar_to_json(detail_max_abs(parts.X))}};
  j["compose_round_trip"] = scalar_to_json(detail_max_abs(compose_3form(parts.h, parts.X, pt) - pt.phi));
  j["star_star_phi_minus_phi"] =
      scalar_to_json(detail_max_abs(hodge_star(hodge_star(pt.phi, pt.metric, pt.orientation), pt.metric, pt.orientation) - pt.phi));
  // Nearly parallel torsion T = lambda g: nabla phi from T, and back.
  const S lambda = scalar_from_json<S>(p.contains("torsion_lambda") ? p.at("torsion_lambda") : Json(1));
  DenseTensor<S> T = pt.metric;
  T *= lambda;
  T.symmetry = Symmetry::none;
  const auto nphi = nabla_phi_from_torsion(T, pt);
  j["torsion_round_trip"] = scalar_to_json(detail_max_abs(torsion_from_nabla_phi(nphi, pt) - T));
  if (pt.orthonormal()) {
    const auto Rc = ricci_from_torsion(T, DenseTensor<S>(7, 3), pt);
    DenseTensor<S> expect = identity_metric<S>(7);
    expect *= S(6) * lambda * lambda;
    j["ricci_minus_6_lambda_sq_g"] = scalar_to_json(detail_max_abs(Rc - expect));
  }
  j["su2"] = su2_json(su2_algebra_check<S>());
  a.json = j;
  return a;
}

inline Artifacts cmd_identities(const RunOptions& o) {
  require_keys(o.params, {"scalar", "phi", "orientation", "torsion_lambda"}, "identities params");
  const auto scalar = get_or<std::string>(o.params, "scalar", "exact");
  if (scalar == "exact") return identities_impl<Exact>(o.params);
  if (scalar == "double") return identities_impl<double>(o.params);
  throw ValidationError("scalar must be 'exact' or 'double'");
}

inline Artifacts cmd_symbols(const RunOptions& o) {
  touch({"symbol_A", "symbol_B_ricci", "symbol_Q_deturck", "symbol_scalar_g", "rb_symbol", "parabolicity_report",
         "breve_projection", "rb_parabolic_interval"});
  const auto& p = o.params;
  require_keys(p, {"n", "xi", "operator", "b", "restrict", "normalize_xi"}, "symbols params");
  const int n = get_or<int>(p, "n", 3);
  if (n < 2 || n > 12) throw ValidationError("n must be in 2..12");
  std::vector<double> xs = get_or<std::vector<double>>(p, "xi", {});
  if (xs.empty()) {
    xs.assign(n, 0.0);
    xs[0] = 1.0;
  }
  if (static_cast<int>(xs.size()) != n) throw ValidationError("xi must have n components");
  // Eigenvalues use a unit xi unless normalize_xi is false; kernel statements are scale-free and use xi as given.
  const bool normalize = get_or<bool>(p, "normalize_xi", true);
  double len = 0.0;
  for (double v : xs) len += v * v;
  len = std::sqrt(len);
  if (!(len > 0.0)) throw ValidationError("xi must be nonzero");
  DenseTensor<double> xi(n, 1);
  DenseTensor<Exact> xe(n, 1);
  for (int i = 0; i < n; ++i) {
    xi(i) = normalize ? xs[i] / len : xs[i];
    xe(i) = Exact(xs[i]);
  }
  const auto op = get_or<std::string>(p, "operator", "B");
  const double b = get_or<double>(p, "b", 0.0);
  const auto restrict_to = get_or<std::string>(p, "restrict", "none");
  SymbolOperator<double> sym;
  SymbolOperator<Exact> sym_exact;
  if (op == "B") {
    sym = symbol_B_ricci(xi);
    sym_exact = symbol_B_ricci(xe);
  } else if (op == "Q") {
    sym = symbol_Q_deturck(xi);
    sym_exact = symbol_Q_deturck(xe);
  } else if (op == "scalar") {
    sym = symbol_scalar_g(xi);
    sym_exact = symbol_scalar_g(xe);
  } else if (op == "rb") {
    sym = rb_symbol(xi, b);
    sym_exact = rb_symbol(xe, Exact(b));
  } else if (op == "rb_plain") {
    sym = rb_plain_symbol(xi, b);
    sym_exact = rb_plain_symbol(xe, Exact(b));
  } else {
    throw ValidationError("operator must be one of B, Q, scalar, rb, rb_plain");
  }
  std::optional<Matrix<double>> sub;
  if (restrict_to == "im_A_complement") sub = im_A_complement(xi);
  else if (restrict_to != "none") throw ValidationError("restrict must be 'none' or 'im_A_complement'");
  const auto rep = parabolicity_report(sym, sub);
  const auto A = symbol_A_matrix(xe);
  Json j{{"n", n},
         {"xi", xi.entries},
         {"normalize_xi", normalize},
         {"operator", op},
         {"min_sym_eig", rep.min_sym_eig},
         {"positive", rep.positive},
         {"kernel_dim", kernel_dim(sym_exact.matrix)},
         {"kernel_equals_image_A", kernel_equals_span(sym_exact.matrix, A)},
         {"restrict", restrict_to}};
  if (op == "rb" || op == "rb_plain") {
    const auto [lo, hi] = rb_parabolic_interval(n);
    const auto [slo, shi] = rb_symmetric_positivity_interval(n);
    j["b"] = b;
    j["interval"] = {lo, hi};
    j["symmetric_positivity_interval"] = {slo, shi};
  } else {
    j["interval"] = nullptr;
  }
  // <B h, h> = |xi|^2 |h|^2 on the breve subspace, for h = identity + e1 (x) e2 sym.
  DenseTensor<double> h = identity_metric<double>(n);
  h.set_sym(0, 1, 1.0);
  const auto hb = breve_projection(h, xi);
  double x2 = 0.0;
  for (double v : xi.entries) x2 += v * v;
  j["breve_identity_residual"] = full_contraction(apply_B(xi, hb), hb) - x2 * full_contraction(hb, hb);
  if (n == 7) {
    touch({"bianchi_operators"});
    const auto pt = standard_structure<double>();
    const auto bp = bianchi_operators(h, basis_vector<double>(7, 1), xi, pt);
    j["bianchi"] = {{"h", "identity + sym(e1 e2)"}, {"X", "e2"}, {"B1h", vec_json(bp.B1h)}, {"B2X", vec_json(bp.B2X)}};
  }
  return {"", j, false};
}

inline Artifacts cmd_rb_scan(const RunOptions& o) {
  touch({"rb_symbol", "parabolicity_report", "rb_parabolic_interval"});
  const auto& p = o.params;
  require_keys(p, {"n", "b_min", "b_max", "step"}, "rb-scan params");
  const int n = get_or<int>(p, "n", 3);
  const double lo = get_or<double>(p, "b_min", -5.0), hi = get_or<double>(p, "b_max", 1.0);
  const double step = get_or<double>(p, "step", 0.01);
  const auto rows = rb_scan(n, lo, hi, step);
  CsvWriter csv({"b", "min_sym_eig", "positive", "certificate_min_eig", "certified"});
  for (const auto& r : rows) csv.cell(r.b).cell(r.min_sym_eig).cell(r.positive).cell(r.certificate_min_eig).cell(r.certified).end_row();
  Json j{{"n", n}, {"rows", rows.size()}};
  const auto [clo, chi] = rb_parabolic_interval(n);
  j["certified_interval_closed_form"] = {clo, chi};
  const auto [slo, shi] = rb_symmetric_positivity_interval(n);
  j["positive_interval_closed_form"] = {slo, shi};
  try {
    const auto [a, b] = locate_interval(
        rows, [](const RbScanRow& r) { return r.certified; },
        [n](double x) { return parabolicity_report(rb_certificate_form(n, x)).positive; });
    j["certified_interval"] = {a, b};
  } catch (const ValidationError&) {
    j["certified_interval"] = nullptr;
  }
  try {
    const auto xi = basis_vector<double>(n, 0);
    const auto [a, b] = locate_interval(
        rows, [](const RbScanRow& r) { return r.positive; },
        [&](double x) { return parabolicity_report(rb_symbol(xi, x)).positive; });
    j["positive_interval"] = {a, b};
  } catch (const ValidationError&) {
    j["positive_interval"] = nullptr;
  }
  return {csv.str(), j, true};
}

inline Artifacts cmd_dgk(const RunOptions& o) {
  touch({"dgk_admissible"});
  const auto& p = o.params;
  require_keys(p, {"a", "lambda", "b1", "b2"}, "dgk-check params");
  FlowCoefficients c{get_or<double>(p, "a", 0.0), get_or<double>(p, "lambda", 0.0), get_or<double>(p, "b1", 0.0),
                     get_or<double>(p, "b2", 0.0)};
  const auto r = dgk_admissible(c);
  Json checks = Json::array();
  for (const auto& ch : r.checks) checks.push_back({{"name", ch.name}, {"value", ch.value}, {"pass", ch.pass}});
  return {"", Json{{"admissible", r.admissible}, {"failed", r.failed()}, {"checks", checks}}, false};
}

struct GeneratedMetric {
  MetricGrid grid;
  std::optional<MetricFunction> fn;
  std::string name;
};

inline GeneratedMetric generate_metric(const Json& g) {
  require_keys(g, {"metric", "N", "n", "amplitude"}, "curvature generate");
  const auto metric = get_required<std::string>(g, "metric");
  const int N = get_or<int>(g, "N", 64);
  const int n = get_or<int>(g, "n", 2);
  const double amp = get_or<double>(g, "amplitude", 0.1);
  GeneratedMetric out;
  out.name = metric;
  if (metric == "sphere" || metric == "hyperbolic") {
    const double lambda = metric == "sphere" ? 1.0 : -1.0, w = metric == "sphere" ? 0.5 : 0.25;
    const auto geo = GridGeometry::patch({N, N}, {-w, -w}, {2 * w, 2 * w});
    MetricFunction f = [lambda](const std::array<double, 3>& x) { return space_form_metric(lambda, x); };
    out.grid = MetricGrid(geo, sample_metric(geo, f));
    out.fn = f;
  } else if (metric == "flat" || metric == "conformal") {
    if (n < 1 || n > 3) throw ValidationError("n must be 1, 2 or 3");
    const auto geo = GridGeometry::torus(std::vector<int>(n, N));
    MetricFunction f = [metric, amp](const std::array<double, 3>& x) {
      const double u = metric == "flat" ? 0.0 : amp * std::sin(2 * M_PI * x[0]);
      return (std::exp(2 * u) * Eigen::Matrix3d::Identity()).eval();
    };
    out.grid = MetricGrid(geo, sample_metric(geo, f), flat_metric(geo));
    out.fn = f;
  } else {
    throw ValidationError("generate.metric must be flat, conformal, sphere or hyperbolic");
  }
  return out;
}

inline Artifacts cmd_curvature(const RunOptions& o) {
  touch({"christoffel", "curvature"});
  const auto& p = o.params;
  require_keys(p, {"grid", "generate", "oracle", "include", "checks"}, "curvature params");
  if (p.contains("grid") == p.contains("generate")) throw ValidationError("give exactly one of 'grid' or 'generate'");
  GeneratedMetric gm;
  if (p.contains("grid")) {
    const Json& g = p.at("grid");
    gm.grid = metric_grid_from_json(g.is_string() ? read_json_file(g.get<std::string>()) : g);
    gm.name = "input";
  } else {
    gm = generate_metric(p.at("generate"));
  }
  const auto& grid = gm.grid;
  const auto& geo = grid.geo;
  const int n = geo.n;
  const auto cb = curvature(grid);
  const auto include = get_or<std::vector<std::string>>(p, "include", {"Rc", "R"});
  std::vector<std::pair<std::string, const Field*>> fields = {{"g", &grid.g}};
  for (const auto& name : include) {
    if (name == "Gamma") fields.push_back({name, &cb.Gamma});
    else if (name == "Rm") fields.push_back({name, &cb.Rm});
    else if (name == "Rc") fields.push_back({name, &cb.Rc});
    else if (name == "R") fields.push_back({name, &cb.R});
    else throw ValidationError("include entries are Gamma, Rm, Rc, R");
  }
  Json j{{"bundle", grid_to_json(geo, fields)}};
  Artifacts a;
  a.csv_primary = false;
  const auto oracle = get_or<std::string>(p, "oracle", "");
  if (!oracle.empty()) {
    double K;
    if (oracle == "flat") K = 0.0;
    else if (oracle == "sphere") K = 1.0;
    else if (oracle == "hyperbolic") K = -1.0;
    else throw ValidationError("oracle must be flat, sphere or hyperbolic");
    if (K != 0.0 && n != 2) throw ValidationError("sphere and hyperbolic oracles are 2-D");
    const int margin = geo.periodic ? 0 : 2;
    auto mask = [&](std::size_t node) { return geo.interior(node, margin); };
    Field eR = cb.R, eRc = cb.Rc;
    for (auto& v : eR.data) v -= n * (n - 1) * K;
    eRc -= K * (n - 1) * grid.g;
    CsvWriter csv({"quantity", "max_abs_error", "interior_margin"});
    csv.cell(std::string("R")).cell(eR.max_abs(mask)).cell(margin).end_row();
    csv.cell(std::string("Rc")).cell(eRc.max_abs(mask)).cell(margin).end_row();
    a.csv = csv.str();
    j["oracle"] = {{"name", oracle}, {"R_error", eR.max_abs(mask)}, {"Rc_error", eRc.max_abs(mask)}};
  }
  Json checks = Json::object();
  for (const auto& c : get_or<std::vector<std::string>>(p, "checks", {})) {
    if (c == "adjointness") {
      touch({"div_and_divstar"});
      const Field h = sample_field(geo, n * n, [n](const std::array<double, 3>& x, double* v) {
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) v[i * n + k] = std::cos(2 * M_PI * (x[0] + (i + k) * x[n - 1])) + (i == k ? 0.5 : 0.0);
      });
      const Field X = sample_field(geo, n, [n](const std::array<double, 3>& x, double* v) {
        for (int i = 0; i < n; ++i) v[i] = std::sin(2 * M_PI * (x[i] + 0.25 * i));
      });
      const auto r = adjointness(h, X, grid);
      checks[c] = {{"div_side", r.div_side}, {"divstar_side", r.divstar_side}, {"residual", r.residual}};
    } else if (c == "linearized_ricci" || c == "linearized_scalar") {
      touch({c == "linearized_ricci" ? "linearized_ricci_exact" : "linearized_scalar_exact"});
      const Field h = sample_field(geo, n * n, [n](const std::array<double, 3>& x, double* v) {
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) v[i * n + k] = std::sin(2 * M_PI * x[0]) * (i == k ? 1.0 : 0.25);
      });
      // Linearized at the constant metric at node 0 (the flat background for generated tori).
      Field base(geo.nodes(), n * n);
      for (std::size_t k = 0; k < base.data.size(); ++k) base.data[k] = grid.g.data[k % (n * n)];
      const MetricGrid bg(geo, base);
      const Field L = c == "linearized_ricci" ? linearized_ricci(h, bg) : linearized_scalar(h, bg);
      const Field O = fd_linearization_oracle(c == "linearized_ricci" ? GridOperator(ricci_operator)
                                                                      : GridOperator(scalar_metric_operator),
                                              bg, h);
      checks[c] = {{"max_abs_difference", (L - O).max_abs()}, {"magnitude", L.max_abs()}};
    } else if (c == "deturck") {
      touch({"deturck_field"});
      const Field W = deturck_field(grid);
      checks[c] = {{"max_abs", W.max_abs()}};
    } else if (c == "map_laplacian") {
      touch({"map_laplacian"});
      if (!gm.fn || !geo.periodic) throw ValidationError("the map_laplacian check needs a generated periodic metric");
      MetricFunction flatfn = [](const std::array<double, 3>&) { return Eigen::Matrix3d::Identity().eval(); };
      const Field lhs = map_laplacian(TorusMap::identity(geo), grid, flatfn);
      const Field rhs = identity_map_laplacian_formula(geo, *gm.fn, flatfn);
      checks[c] = {{"max_abs_difference", (lhs - rhs).max_abs()}, {"magnitude", rhs.max_abs()}};
    } else {
      throw ValidationError("checks are adjointness, linearized_ricci, linearized_scalar, deturck, map_laplacian");
    }
  }
  j["checks"] = checks;
  a.json = j;
  return a;
}

inline FourierForm forms_from_params(const Json& p, std::uint64_t seed) {
  const int n = get_or<int>(p, "n", 2), degree = get_or<int>(p, "degree", 1), K = get_or<int>(p, "K", 16);
  FourierForm a(n, degree, K);
  if (p.contains("random")) {
    const Json& r = p.at("random");
    require_keys(r, {"K_max"}, "hodge-demo random");
    std::mt19937_64 rng(seed);
    const auto f = acceptance::random_form(n, degree, get_or<int>(r, "K_max", 3), rng);
    for (const auto& [m, c] : f.modes) a.coeff(m) = c;
    return a;
  }
  if (!p.contains("modes")) {
    if (n != 2 || degree != 1) throw ValidationError("give 'modes' or 'random' unless n = 2, degree = 1");
    a.add_real_term({0, 0, 0}, {1}, 1.0);
    a.add_real_term({1, 0, 0}, {0}, 0.5);
    return a;
  }
  for (const auto& t : p.at("modes")) {
    require_keys(t, {"k", "index", "re", "im"}, "hodge-demo mode");
    const auto kv = get_required<std::vector<int>>(t, "k");
    if (static_cast<int>(kv.size()) != n) throw ValidationError("mode k must have n components");
    Mode m{0, 0, 0};
    for (int i = 0; i < n; ++i) m[i] = kv[i];
    auto idx = get_or<Index>(t, "index", {});
    if (static_cast<int>(idx.size()) != degree) throw ValidationError("mode index must have 'degree' entries");
    for (auto& i : idx) {
      if (i < 1 || i > n) throw ValidationError("mode index out of range (1-based)");
      --i;
    }
    a.add_real_term(m, idx, {get_or<double>(t, "re", 0.0), get_or<double>(t, "im", 0.0)});
  }
  return a;
}

inline Json form_json(const FourierForm& f) {
  Json modes = Json::array();
  for (const auto& [m, c] : f.modes) {
    Json re = Json::array(), im = Json::array();
    for (const auto& v : c) {
      re.push_back(v.real());
      im.push_back(v.imag());
    }
    modes.push_back({{"k", std::vector<int>(m.begin(), m.begin() + f.n)}, {"re", re}, {"im", im}});
  }
  return {{"n", f.n}, {"degree", f.degree}, {"K", f.K}, {"modes", modes}};
}

inline Artifacts cmd_hodge(const RunOptions& o) {
  touch({"hodge_heat_step", "hodge_decompose"});
  const auto& p = o.params;
  require_keys(p, {"n", "degree", "K", "dt", "t_final", "modes", "random"}, "hodge-demo params");
  const FourierForm a0 = forms_from_params(p, o.seed);
  const double dt = get_or<double>(p, "dt", 0.01), t_final = get_or<double>(p, "t_final", 0.1);
  if (!(dt > 0.0) || t_final < 0.0) throw ValidationError("need dt > 0 and t_final >= 0");
  const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
  CsvWriter csv({"t", "l2_norm", "harmonic_norm", "exact_norm", "coexact_norm", "closedness_defect"});
  FourierForm a = a0;
  for (long s = 0; s <= steps; ++s) {
    const double t = std::min(t_final, s * dt);
    if (s > 0) a = hodge_heat_step(a, t - std::min(t_final, (s - 1) * dt));
    const auto parts = hodge_decompose(a);
    csv.cell(t).cell(l2_norm(a)).cell(l2_norm(parts.harmonic)).cell(l2_norm(parts.exact)).cell(l2_norm(parts.coexact))
        .cell(closedness_defect(a)).end_row();
  }
  touch({"hodge_heat_limit"});
  const auto parts = hodge_decompose(a0);
  const double ortho = std::max({std::fabs(l2_inner(parts.harmonic, parts.exact)), std::fabs(l2_inner(parts.harmonic, parts.coexact)),
                                 std::fabs(l2_inner(parts.exact, parts.coexact))});
  Json j{{"initial", form_json(a0)},
         {"final", form_json(a)},
         {"limit", form_json(hodge_heat_limit(a0))},
         {"reality_defect", a0.reality_defect()},
         {"orthogonality_residual", ortho},
         {"reassembly_residual", max_abs_coeff(parts.harmonic + parts.exact + parts.coexact - a0)},
         {"zero_mode_drift", max_abs_coeff(hodge_heat_limit(a) - hodge_heat_limit(a0))}};
  return {csv.str(), j, true};
}

inline Artifacts cmd_einstein(const RunOptions& o) {
  touch({"einstein_flow"});
  const auto& p = o.params;
  require_keys(p, {"lambda", "t_final", "dt", "scale_check"}, "einstein-flow params");
  const double lambda = get_or<double>(p, "lambda", 1.0), t_final = get_or<double>(p, "t_final", 0.25);
  const double dt = get_or<double>(p, "dt", 0.025);
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  const auto last = einstein_flow(lambda, t_final);
  CsvWriter csv({"t", "c"});
  const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
  for (long s = 0; s <= steps; ++s) {
    const auto st = einstein_flow(lambda, std::min(t_final, s * dt));
    csv.cell(st.t).cell(st.c).end_row();
  }
  const double T = extinction_time(lambda);
  Json j{{"lambda", lambda}, {"extinction_time", std::isinf(T) ? Json(nullptr) : Json(T)}, {"final", {{"t", last.t}, {"c", last.c}}}};
  if (p.contains("scale_check")) {
    const Json& sc = p.at("scale_check");
    require_keys(sc, {"N", "t"}, "scale_check");
    const auto chk = einstein_scale_check(lambda, get_or<double>(sc, "t", t_final), get_or<int>(sc, "N", 128));
    j["scale_check"] = {{"t", chk.t},
                        {"c", chk.c},
                        {"flow_residual", chk.flow_residual},
                        {"scale_residual", chk.scale_residual},
                        {"einstein_residual", chk.einstein_residual}};
  }
  return {csv.str(), j, true};
}

/// Samples either an expression string in r or an explicit array.
inline std::vector<double> sample_initial(const Json& source, const std::vector<double>& r, const std::string& name) {
  if (source.is_string()) {
    const Expression e(source.get<std::string>());
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = e(r[i]);
    return v;
  }
  if (source.is_number()) return std::vector<double>(r.size(), source.get<double>());
  if (source.is_array()) {
    if (source.size() != r.size()) throw ValidationError("initial '" + name + "' must have N samples");
    return source.get<std::vector<double>>();
  }
  throw ValidationError("initial '" + name + "' must be an expression, a number or an array");
}

inline WarpedState warped_from_params(const Json& p) {
  WarpedState s;
  s.geometry = warped_geometry_from_string(get_or<std::string>(p, "geometry", "CY"));
  s.domain = warped_domain_from_string(get_or<std::string>(p, "domain", "circle"));
  const int N = get_or<int>(p, "N", 64);
  if (N < 6) throw ValidationError("N must be at least 6");
  s.L = get_or<double>(p, "L", 1.0);
  s.r0 = get_or<double>(p, "r0", 0.0);
  s.theta.assign(N, 0.0);
  const auto r = s.nodes();
  const Json init = p.contains("initial") ? p.at("initial") : Json::object();
  require_keys(init, {"ell", "theta", "G"}, "initial");
  s.ell = sample_initial(init.contains("ell") ? init.at("ell") : Json("1"), r, "ell");
  s.theta = sample_initial(init.contains("theta") ? init.at("theta") : Json("0"), r, "theta");
  s.G = sample_initial(init.contains("G") ? init.at("G") : Json("1"), r, "G");
  s.validate();
  return s;
}

inline Json state_json(const WarpedState& s) {
  return {{"geometry", to_string(s.geometry)}, {"domain", to_string(s.domain)}, {"r0", s.r0}, {"L", s.L},
          {"N", s.N()}, {"r", s.nodes()}, {"ell", s.ell}, {"theta", s.theta}, {"G", s.G}};
}

struct NumericalHalt : std::runtime_error {
  Artifacts artifacts;
  std::string kind;
  NumericalHalt(std::string k, const std::string& what, Artifacts a)
      : std::runtime_error(what), artifacts(std::move(a)), kind(std::move(k)) {}
};

inline Artifacts cmd_coflow(const RunOptions& o) {
  touch({"coflow_integrate", "coflow_rhs", "warped_torsion_forms", "warped_laplacian"});
  const auto& p = o.params;
  require_keys(p, {"geometry", "domain", "N", "L", "r0", "dt", "t_final", "initial"}, "coflow params");
  const WarpedState s = warped_from_params(p);
  s.require_positive();
  const double dt = get_or<double>(p, "dt", stable_dt(s));
  const double t_final = get_or<double>(p, "t_final", 0.01);
  const auto tr = coflow_integrate(s, t_final, dt);
  CsvWriter csv({"t", "rhs_norm", "min_ell", "min_G", "max_abs", "tau0_max", "tau1_max"});
  for (const auto& r : tr.records)
    csv.cell(r.t).cell(r.rhs_norm).cell(r.min_ell).cell(r.min_G).cell(r.max_abs).cell(r.tau0_max).cell(r.tau1_max).end_row();
  Json modes = Json::array();
  for (const auto& m : tr.theta_modes)
    modes.push_back({{"mode", m.mode}, {"initial", m.initial}, {"final", m.final}, {"factor", m.factor}});
  touch({"warped_gradsq"});
  const auto grad = warped_gradsq(tr.final_state.theta, tr.final_state);
  double grad_max = 0.0;
  for (double v : grad) grad_max = std::max(grad_max, v);
  Json j{{"status", tr.status},
         {"diagnosis", tr.diagnosis},
         {"dt", tr.dt},
         {"steps", static_cast<long>(tr.records.size()) - 1},
         {"stability_bound", stable_dt(s)},
         {"theta_modes", modes},
         {"final_theta_gradsq_max", grad_max},
         {"final_state", state_json(tr.final_state)}};
  Artifacts a{csv.str(), j, true};
  if (tr.status == "positivity_lost") throw NumericalHalt("PositivityLost", tr.diagnosis, a);
  if (tr.status == "blow_up") throw NumericalHalt("BlowUp", tr.diagnosis, a);
  return a;
}

template <class T>
std::vector<T> one_or_many(const Json& p, const char* key, T fallback) {
  if (!p.contains(key)) return {fallback};
  const Json& v = p.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

inline Artifacts cmd_soliton(const RunOptions& o) {
  const auto& p = o.params;
  const auto family = get_or<std::string>(p, "family", "cy");
  if (family == "cy") {
    touch({"cy_soliton_family", "cy_soliton_residual"});
    require_keys(p, {"family", "b", "c", "r_min", "r_max", "N", "anchor"}, "soliton-scan params");
    const double r_min = get_or<double>(p, "r_min", -3.0), r_max = get_or<double>(p, "r_max", 3.0);
    const int N = get_or<int>(p, "N", 121);
    if (N < 2 || !(r_max > r_min)) throw ValidationError("need N >= 2 and r_max > r_min");
    std::vector<double> r(N);
    for (int i = 0; i < N; ++i) r[i] = r_min + (r_max - r_min) * i / (N - 1);
    const double anchor_r = get_or<double>(p, "anchor", r_min);
    std::size_t anchor = 0;
    for (int i = 0; i < N; ++i)
      if (std::fabs(r[i] - anchor_r) < std::fabs(r[anchor] - anchor_r)) anchor = i;
    CsvWriter csv({"b", "c", "sigma", "tau", "imag_residual", "G_min", "G_max", "valid"});
    Json runs = Json::array();
    for (double b : one_or_many<double>(p, "b", 1.0))
      for (double c : one_or_many<double>(p, "c", 1.0)) {
        const auto fam = cy_soliton_family(b, c, r);
        const auto cal = cy_calibrate(fam, anchor);
        for (const auto& cv : cal.conventions)
          csv.cell(b).cell(c).cell(cv.sigma).cell(cv.tau).cell(cv.imag_residual).cell(cv.G_min).cell(cv.G_max).cell(cv.valid).end_row();
        const Jet one{std::vector<double>(N, 1.0), std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
        double d = 0.0;
        for (const auto& z : cy_soliton_residual(fam.theta, fam.s, one)) d = std::max(d, std::abs(z));
        const auto& best = cal.conventions[cal.best];
        runs.push_back({{"b", b},
                        {"c", c},
                        {"best", {{"sigma", best.sigma}, {"tau", best.tau}, {"imag_residual", best.imag_residual}}},
                        {"frozen_convention_residual_G1", d}});
      }
    return {csv.str(), Json{{"family", "cy"}, {"anchor_r", r[anchor]}, {"frozen_convention", {{"sigma", 1}, {"tau", 1}}}, {"runs", runs}}, true};
  }
  if (family == "nk") {
    touch({"nk_soliton_residual"});
    require_keys(p, {"family", "ell", "theta", "s", "lambda", "r_min", "r_max", "N"}, "soliton-scan params");
    Json sp{{"geometry", "NK"}, {"domain", "interval"}, {"N", get_or<int>(p, "N", 101)}};
    const double r_min = get_or<double>(p, "r_min", 1.0), r_max = get_or<double>(p, "r_max", 2.0);
    sp["r0"] = r_min;
    sp["L"] = r_max - r_min;
    sp["initial"] = {{"ell", p.contains("ell") ? p.at("ell") : Json("r")}, {"theta", p.contains("theta") ? p.at("theta") : Json("0")}};
    const WarpedState st = warped_from_params(sp);
    const auto s = sample_initial(p.contains("s") ? p.at("s") : Json("0"), st.nodes(), "s");
    CsvWriter csv({"lambda", "max_r1", "max_r2", "max_r3"});
    Json rows = Json::array();
    for (double lambda : one_or_many<double>(p, "lambda", 0.0)) {
      const auto res = nk_soliton_residual(st, s, lambda);
      auto mx = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
      };
      csv.cell(lambda).cell(mx(res.r1)).cell(mx(res.r2)).cell(mx(res.r3)).end_row();
      rows.push_back({{"lambda", lambda}, {"r1", res.r1}, {"r2", res.r2}, {"r3", res.r3}});
    }
    return {csv.str(), Json{{"family", "nk"}, {"r", st.nodes()}, {"residuals", rows}}, true};
  }
  throw ValidationError("family must be 'cy' or 'nk'");
}

inline Artifacts cmd_selftest(const RunOptions& o, std::ostream& err) {
  require_keys(o.params, {"criteria"}, "selftest params");
  const auto ids = get_or<std::vector<int>>(o.params, "criteria", {});
  AcceptanceOptions opt{o.seed};
  std::vector<CriterionResult> results;
  auto report = [&](const CriterionResult& r) {
    if (!o.quiet) err << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << '\n';
  };
  if (ids.empty()) {
    results = run_acceptance(opt, report);
  } else {
    for (int id : ids) {
      results.push_back(run_criterion(id, opt));
      report(results.back());
    }
  }
  CsvWriter timings({"criterion", "seconds"});
  for (const auto& r : results) timings.cell(r.id).cell(r.seconds).end_row();
  Artifacts a{"", acceptance_report(results, o.seed), false, timings.str()};
  return a;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

inline void emit(const Artifacts& a, const RunOptions& o, std::ostream& out, std::ostream& err) {
  const std::string json_text = a.json.is_null() ? "" : a.json.dump(2) + "\n";
  if (o.output.empty()) {
    out << (a.csv_primary ? a.csv : json_text);
    if (!a.timings_csv.empty() && !o.quiet) err << a.timings_csv;
    return;
  }
  if (!a.csv.empty()) write_file(o.output + ".csv", a.csv);
  if (!json_text.empty()) write_file(o.output + ".json", json_text);
  if (!a.timings_csv.empty()) write_file(o.output + ".timings.csv", a.timings_csv);
}

inline void emit_error(const std::string& kind, const std::string& message, const RunOptions& o, std::ostream& out) {
  const std::string text = Json{{"error", kind}, {"message", message}}.dump(2) + "\n";
  out << text;
  if (!o.output.empty()) {
    try {
      write_file(o.output + ".error.json", text);
    } catch (const std::exception&) {
    }
  }
}

}  // namespace detail

/// Runs one command. Exit codes: 0 success, 1 selftest failure, 2 validation error, 3 numerical failure.
inline int run(const std::string& command, const RunOptions& o, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    Artifacts a;
    if (command == "identities") a = detail::cmd_identities(o);
    else if (command == "symbols") a = detail::cmd_symbols(o);
    else if (command == "rb-scan") a = detail::cmd_rb_scan(o);
    else if (command == "dgk-check") a = detail::cmd_dgk(o);
    else if (command == "curvature") a = detail::cmd_curvature(o);
    else if (command == "hodge-demo") a = detail::cmd_hodge(o);
    else if (command == "einstein-flow") a = detail::cmd_einstein(o);
    else if (command == "coflow") a = detail::cmd_coflow(o);
    else if (command == "soliton-scan") a = detail::cmd_soliton(o);
    else if (command == "selftest") {
      a = detail::cmd_selftest(o, err);
      detail::emit(a, o, out, err);
      return a.json.at("all_pass").get<bool>() ? kOk : kFailed;
    } else throw ValidationError("unknown command '" + command + "'");
    detail::emit(a, o, out, err);
    return kOk;
  } catch (const detail::NumericalHalt& h) {
    if (!o.output.empty()) detail::emit(h.artifacts, o, out, err);
    detail::emit_error(h.kind, h.what(), o, out);
    return kNumerical;
  } catch (const ValidationError& e) {
    detail::emit_error("ValidationError", e.what(), o, out);
    return kValidation;
  } catch (const NotAG2Structure& e) {
    detail::emit_error("NotAG2Structure", e.what(), o, out);
    return kNumerical;
  } catch (const PositivityLost& e) {
    detail::emit_error("PositivityLost", e.what(), o, out);
    return kNumerical;
  } catch (const ExtinctError& e) {
    detail::emit_error("ExtinctError", e.what(), o, out);
    return kNumerical;
  } catch (const Json::exception& e) {
    detail::emit_error("ValidationError", e.what(), o, out);
    return kValidation;
  } catch (const std::exception& e) {
    detail::emit_error("NumericalError", e.what(), o, out);
    return kNumerical;
  }
}

/// Reads a run configuration {command, params, output, seed}; unknown keys are rejected.
struct LoadedConfig {
  std::string command;
  RunOptions options;
  bool has_output = false, has_seed = false;
};

inline LoadedConfig load_config(const Json& j) {
  require_keys(j, {"command", "params", "output", "seed"}, "run configuration");
  LoadedConfig c;
  c.command = get_or<std::string>(j, "command", "");
  c.options.params = j.contains("params") ? j.at("params") : Json::object();
  if (!c.options.params.is_object()) throw ValidationError("params must be an object");
  c.has_output = j.contains("output");
  c.options.output = get_or<std::string>(j, "output", "");
  c.has_seed = j.contains("seed");
  c.options.seed = get_or<std::uint64_t>(j, "seed", c.options.seed);
  return c;
}

}  // namespace geoflow::cli
