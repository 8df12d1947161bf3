#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "scalar.hpp"

namespace geoflow {

enum class WarpedGeometry { CY, NK };
enum class WarpedDomain { circle, interval };

inline std::string to_string(WarpedGeometry g) { return g == WarpedGeometry::CY ? "CY" : "NK"; }
inline std::string to_string(WarpedDomain d) { return d == WarpedDomain::circle ? "circle" : "interval"; }

inline WarpedGeometry warped_geometry_from_string(const std::string& s) {
  if (s == "CY") return WarpedGeometry::CY;
  if (s == "NK") return WarpedGeometry::NK;
  throw ValidationError("geometry must be CY or NK, got '" + s + "'");
}
inline WarpedDomain warped_domain_from_string(const std::string& s) {
  if (s == "circle") return WarpedDomain::circle;
  if (s == "interval") return WarpedDomain::interval;
  throw ValidationError("domain must be circle or interval, got '" + s + "'");
}

/// Sampled (ell, theta, G) on r_i = r0 + i h, with h = L/N on the circle and L/(N-1) on the interval.
struct WarpedState {
  WarpedGeometry geometry = WarpedGeometry::CY;
  WarpedDomain domain = WarpedDomain::circle;
  double r0 = 0.0;
  double L = 1.0;
  std::vector<double> ell, theta, G;

  int N() const { return static_cast<int>(theta.size()); }
  double spacing() const { return domain == WarpedDomain::circle ? L / N() : L / (N() - 1); }
  double r(int i) const { return r0 + i * spacing(); }
  std::vector<double> nodes() const {
    std::vector<double> out(N());
    for (int i = 0; i < N(); ++i) out[i] = r(i);
    return out;
  }

  /// Shape and finiteness checks; positivity is the caller's concern (PositivityLost).
  void validate() const {
    if (N() < 6) throw ValidationError("warped state needs at least 6 nodes");
    if (static_cast<int>(ell.size()) != N() || static_cast<int>(G.size()) != N())
      throw ValidationError("ell, theta and G must have the same length");
    if (!(L > 0.0) || !std::isfinite(L) || !std::isfinite(r0)) throw ValidationError("invalid domain");
    for (int i = 0; i < N(); ++i)
      if (!std::isfinite(ell[i]) || !std::isfinite(theta[i]) || !std::isfinite(G[i]))
        throw ValidationError("non-finite value at node " + std::to_string(i));
    if (geometry == WarpedGeometry::CY)
      for (double v : ell)
        if (v != 1.0) throw ValidationError("CY states require ell = 1");
  }

  void require_positive() const {
    for (int i = 0; i < N(); ++i) {
      if (!(ell[i] > 0.0)) throw PositivityLost("ell <= 0 at r = " + format_double(r(i)));
      if (!(G[i] > 0.0)) throw PositivityLost("G <= 0 at r = " + format_double(r(i)));
    }
  }
};

/// Values with first and second r-derivatives.
struct Jet {
  std::vector<double> v, d1, d2;
  std::size_t size() const { return v.size(); }
};

namespace detail {

inline void require_size(const std::vector<double>& f, const WarpedState& s) {
  if (static_cast<int>(f.size()) != s.N()) throw ValidationError("array length does not match the state");
}

}  // namespace detail

namespace detail {

/// sum_k c[k] (f[idx[k]] - f[center]); the weights sum to zero, so constants give exactly 0.
inline double stencil(const std::vector<double>& f, int center, const int* idx, const double* c, int count) {
  double acc = 0.0;
  for (int k = 0; k < count; ++k) acc += c[k] * (f[idx[k]] - f[center]);
  return acc;
}

/// Applies a 5-point central stencil in the interior (periodic wrap on the circle) and the given
/// one-sided stencils at nodes 0, 1 and, mirrored with `mirror_sign`, at N-1, N-2.
inline std::vector<double> apply_fd(const std::vector<double>& f, const WarpedState& s, const double* central,
                                    const double* edge0, const double* edge1, int edge_len, double mirror_sign,
                                    double scale) {
  require_size(f, s);
  const int N = s.N();
  std::vector<double> d(N);
  int idx[6];
  const bool circle = s.domain == WarpedDomain::circle;
  for (int i = 0; i < N; ++i) {
    if (circle || (i >= 2 && i < N - 2)) {
      for (int k = 0; k < 5; ++k) idx[k] = ((i + k - 2) % N + N) % N;
      d[i] = stencil(f, i, idx, central, 5) / scale;
    }
  }
  if (circle) return d;
  for (int k = 0; k < edge_len; ++k) idx[k] = k;
  d[0] = stencil(f, 0, idx, edge0, edge_len) / scale;
  d[1] = stencil(f, 1, idx, edge1, edge_len) / scale;
  for (int k = 0; k < edge_len; ++k) idx[k] = N - 1 - k;
  d[N - 1] = mirror_sign * stencil(f, N - 1, idx, edge0, edge_len) / scale;
  d[N - 2] = mirror_sign * stencil(f, N - 2, idx, edge1, edge_len) / scale;
  return d;
}

}  // namespace detail

/// Fourth-order first derivative: central (1, -8, 0, 8, -1)/12h, periodic or with one-sided edge stencils.
inline std::vector<double> ddr(const std::vector<double>& f, const WarpedState& s) {
  static const double central[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
  static const double e0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
  static const double e1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
  return detail::apply_fd(f, s, central, e0, e1, 5, -1.0, 12.0 * s.spacing());
}

/// Fourth-order second derivative: central (-1, 16, -30, 16, -1)/12h^2 with six-point one-sided edges.
inline std::vector<double> d2dr2(const std::vector<double>& f, const WarpedState& s) {
  static const double central[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  static const double e0[6] = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
  static const double e1[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
  return detail::apply_fd(f, s, central, e0, e1, 6, 1.0, 12.0 * s.spacing() * s.spacing());
}

inline Jet fd_jet(const std::vector<double>& f, const WarpedState& s) { return {f, ddr(f, s), d2dr2(f, s)}; }

/// Delta f = f''/G^2 + 6 ell' f'/(ell G^2) - f' G'/G^3.
inline std::vector<double> warped_laplacian(const Jet& f, const Jet& ell, const Jet& G) {
  const std::size_t N = f.size();
  if (ell.size() != N || G.size() != N) throw ValidationError("jet lengths differ");
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double g = G.v[i], g2 = g * g;
    out[i] = f.d2[i] / g2 + 6.0 * ell.d1[i] * f.d1[i] / (ell.v[i] * g2) - f.d1[i] * G.d1[i] / (g2 * g);
  }
  return out;
}

inline std::vector<double> warped_laplacian(const std::vector<double>& f, const WarpedState& s) {
  return warped_laplacian(fd_jet(f, s), fd_jet(s.ell, s), fd_jet(s.G, s));
}

/// |grad f|^2 = f'^2 / G^2.
inline std::vector<double> warped_gradsq(const Jet& f, const Jet& G) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f.d1[i] * f.d1[i] / (G.v[i] * G.v[i]);
  return out;
}

inline std::vector<double> warped_gradsq(const std::vector<double>& f, const WarpedState& s) {
  return warped_gradsq(fd_jet(f, s), fd_jet(s.G, s));
}

/// The three fields with their r-derivatives, either from stencils or supplied analytically.
struct WarpedJets {
  WarpedGeometry geometry = WarpedGeometry::CY;
  Jet ell, theta, G;
};

inline WarpedJets fd_jets(const WarpedState& s) {
  s.validate();
  return {s.geometry, fd_jet(s.ell, s), fd_jet(s.theta, s), fd_jet(s.G, s)};
}

struct CoflowRhs {
  std::vector<double> dell, dtheta, dG;

  double max_abs(int lo = 0, int hi = -1) const {
    if (hi < 0) hi = static_cast<int>(dtheta.size());
    double m = 0.0;
    for (int i = lo; i < hi; ++i) m = std::max({m, std::fabs(dell[i]), std::fabs(dtheta[i]), std::fabs(dG[i])});
    return m;
  }
};

/// CY: (0, -Delta theta, 9 G |grad theta|^2).
/// NK: (-Delta ell + 3(1 + |grad ell|^2)/ell, -Delta theta + sin(6 theta)/ell^2, (9|grad theta|^2 + 3 sin^2(3 theta)/ell^2) G).
inline CoflowRhs coflow_rhs(const WarpedJets& j) {
  const std::size_t N = j.theta.size();
  for (std::size_t i = 0; i < N; ++i) {
    if (!(j.ell.v[i] > 0.0)) throw PositivityLost("ell <= 0 at node " + std::to_string(i));
    if (!(j.G.v[i] > 0.0)) throw PositivityLost("G <= 0 at node " + std::to_string(i));
  }
  const auto lap_theta = warped_laplacian(j.theta, j.ell, j.G);
  const auto grad_theta = warped_gradsq(j.theta, j.G);
  CoflowRhs out{std::vector<double>(N, 0.0), std::vector<double>(N), std::vector<double>(N)};
  if (j.geometry == WarpedGeometry::CY) {
    for (std::size_t i = 0; i < N; ++i) {
      out.dtheta[i] = -lap_theta[i];
      out.dG[i] = 9.0 * j.G.v[i] * grad_theta[i];
    }
    return out;
  }
  const auto lap_ell = warped_laplacian(j.ell, j.ell, j.G);
  const auto grad_ell = warped_gradsq(j.ell, j.G);
  for (std::size_t i = 0; i < N; ++i) {
    const double l = j.ell.v[i], s3 = std::sin(3.0 * j.theta.v[i]);
    out.dell[i] = -lap_ell[i] + 3.0 * (1.0 + grad_ell[i]) / l;
    out.dtheta[i] = -lap_theta[i] + std::sin(6.0 * j.theta.v[i]) / (l * l);
    out.dG[i] = (9.0 * grad_theta[i] + 3.0 * s3 * s3 / (l * l)) * j.G.v[i];
  }
  return out;
}

inline CoflowRhs coflow_rhs(const WarpedState& s) {
  s.validate();
  s.require_positive();
  return coflow_rhs(fd_jets(s));
}

struct TorsionForms {
  std::vector<double> tau0, tau1;  // tau1 as its dr-coefficient
};

/// CY: tau0 = 12 theta'/(7G), tau1 = ell'/ell. NK: tau0 = (12/7)(theta'/G + 2 sin(3 theta)/ell),
/// tau1 = (ell' - G cos(3 theta))/ell.
inline TorsionForms warped_torsion_forms(const WarpedJets& j) {
  const std::size_t N = j.theta.size();
  TorsionForms t{std::vector<double>(N), std::vector<double>(N)};
  for (std::size_t i = 0; i < N; ++i) {
    const double l = j.ell.v[i], g = j.G.v[i], th = j.theta.v[i];
    if (j.geometry == WarpedGeometry::CY) {
      t.tau0[i] = 12.0 * j.theta.d1[i] / (7.0 * g);
      t.tau1[i] = j.ell.d1[i] / l;
    } else {
      t.tau0[i] = 12.0 / 7.0 * (j.theta.d1[i] / g + 2.0 * std::sin(3.0 * th) / l);
      t.tau1[i] = (j.ell.d1[i] - g * std::cos(3.0 * th)) / l;
    }
  }
  return t;
}

inline TorsionForms warped_torsion_forms(const WarpedState& s) { return warped_torsion_forms(fd_jets(s)); }

struct NkResiduals {
  std::vector<double> r1, r2, r3;

  double max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < r1.size(); ++i) m = std::max({m, std::fabs(r1[i]), std::fabs(r2[i]), std::fabs(r3[i])});
    return m;
  }
};

/// r1 = ell' - cos 3theta,
/// r2 = (ell^3 sin 3theta)'' - 12 ell sin 3theta - lambda ell^3 sin 3theta - (s ell^3 sin 3theta)',
/// r3 = (ell^3 cos 3theta)' - 3 ell^2 - lambda ell^4/4 - s ell^3 cos 3theta.
/// Analytic version: products are differentiated by the chain rule from the supplied jets (s needs d1).
inline NkResiduals nk_soliton_residual(const Jet& ell, const Jet& theta, const Jet& s, double lambda) {
  const std::size_t N = theta.size();
  if (ell.size() != N || s.size() != N) throw ValidationError("jet lengths differ");
  NkResiduals r{std::vector<double>(N), std::vector<double>(N), std::vector<double>(N)};
  for (std::size_t i = 0; i < N; ++i) {
    const double l = ell.v[i], l1 = ell.d1[i], l2 = ell.d2[i];
    const double t1 = theta.d1[i], t2 = theta.d2[i];
    const double sn = std::sin(3.0 * theta.v[i]), cs = std::cos(3.0 * theta.v[i]);
    const double P = l * l * l * sn;
    const double P1 = 3.0 * l * l * l1 * sn + 3.0 * l * l * l * t1 * cs;
    const double P2 = 6.0 * l * l1 * l1 * sn + 3.0 * l * l * l2 * sn + 18.0 * l * l * l1 * t1 * cs +
                      3.0 * l * l * l * t2 * cs - 9.0 * l * l * l * t1 * t1 * sn;
    const double Q1 = 3.0 * l * l * l1 * cs - 3.0 * l * l * l * t1 * sn;
    r.r1[i] = l1 - cs;
    r.r2[i] = P2 - 12.0 * l * sn - lambda * P - (s.d1[i] * P + s.v[i] * P1);
    r.r3[i] = Q1 - 3.0 * l * l - 0.25 * lambda * l * l * l * l - s.v[i] * l * l * l * cs;
  }
  return r;
}

/// Stencil version: each displayed product is sampled and differentiated with the module's stencils.
inline NkResiduals nk_soliton_residual(const WarpedState& st, const std::vector<double>& s, double lambda) {
  st.validate();
  detail::require_size(s, st);
  const int N = st.N();
  std::vector<double> P(N), sP(N), Q(N), cs(N), sn(N);
  for (int i = 0; i < N; ++i) {
    const double l3 = st.ell[i] * st.ell[i] * st.ell[i];
    sn[i] = std::sin(3.0 * st.theta[i]);
    cs[i] = std::cos(3.0 * st.theta[i]);
    P[i] = l3 * sn[i];
    sP[i] = s[i] * P[i];
    Q[i] = l3 * cs[i];
  }
  const auto l1 = ddr(st.ell, st), P2 = d2dr2(P, st), sP1 = ddr(sP, st), Q1 = ddr(Q, st);
  NkResiduals r{std::vector<double>(N), std::vector<double>(N), std::vector<double>(N)};
  for (int i = 0; i < N; ++i) {
    const double l = st.ell[i];
    r.r1[i] = l1[i] - cs[i];
    r.r2[i] = P2[i] - 12.0 * l * sn[i] - lambda * P[i] - sP1[i];
    r.r3[i] = Q1[i] - 3.0 * l * l - 0.25 * lambda * l * l * l * l - s[i] * Q[i];
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// Time integration

struct CoflowRecord {
  double t = 0.0;
  double rhs_norm = 0.0;  // over evolved nodes
  double min_ell = 0.0;
  double min_G = 0.0;
  double max_abs = 0.0;
  double tau0_max = 0.0;
  double tau1_max = 0.0;
};

struct ModeFactor {
  int mode = 0;
  double initial = 0.0;
  double final = 0.0;
  double factor = 0.0;
};

struct CoflowTrajectory {
  std::vector<CoflowRecord> records;
  WarpedState final_state;
  std::string status = "ok";  // ok | positivity_lost | blow_up
  std::string diagnosis;
  std::vector<ModeFactor> theta_modes;  // circle only
  double dt = 0.0;
};

constexpr double kBlowUpThreshold = 1e6;

/// dt <= 0.25 (dr)^2 min(G^2).
inline double stable_dt(const WarpedState& s) {
  double gmin = std::numeric_limits<double>::infinity();
  for (double g : s.G) gmin = std::min(gmin, g);
  return 0.25 * s.spacing() * s.spacing() * gmin * gmin;
}

/// |theta_hat_m| for m = 1..N/2 on the circle (DFT normalized by N).
inline std::vector<double> theta_mode_amplitudes(const WarpedState& s) {
  const int N = s.N();
  std::vector<double> amp(N / 2);
  for (int m = 1; m <= N / 2; ++m) {
    std::complex<double> c(0.0);
    for (int i = 0; i < N; ++i) c += s.theta[i] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * m * i / N));
    amp[m - 1] = std::abs(c) / N;
  }
  return amp;
}

namespace detail {

inline CoflowRecord record_of(const WarpedState& s, double t) {
  CoflowRecord r;
  r.t = t;
  const auto j = fd_jets(s);
  const int lo = s.domain == WarpedDomain::interval ? 1 : 0;
  const int hi = s.domain == WarpedDomain::interval ? s.N() - 1 : s.N();
  r.rhs_norm = coflow_rhs(j).max_abs(lo, hi);
  r.min_ell = *std::min_element(s.ell.begin(), s.ell.end());
  r.min_G = *std::min_element(s.G.begin(), s.G.end());
  for (int i = 0; i < s.N(); ++i) r.max_abs = std::max({r.max_abs, std::fabs(s.ell[i]), std::fabs(s.theta[i]), std::fabs(s.G[i])});
  const auto tf = warped_torsion_forms(j);
  for (int i = 0; i < s.N(); ++i) {
    r.tau0_max = std::max(r.tau0_max, std::fabs(tf.tau0[i]));
    r.tau1_max = std::max(r.tau1_max, std::fabs(tf.tau1[i]));
  }
  return r;
}

inline WarpedState axpy(const WarpedState& s, double a, const CoflowRhs& k) {
  WarpedState out = s;
  const bool held = s.domain == WarpedDomain::interval;
  for (int i = 0; i < s.N(); ++i) {
    if (held && (i == 0 || i == s.N() - 1)) continue;
    if (s.geometry == WarpedGeometry::NK) out.ell[i] += a * k.dell[i];
    out.theta[i] += a * k.dtheta[i];
    out.G[i] += a * k.dG[i];
  }
  return out;
}

}  // namespace detail

/// Classical RK4 from t = 0 to t_final with uniform steps no larger than dt. Interval end nodes are held
/// fixed. Halts, without throwing, when positivity is lost or the sup norm passes kBlowUpThreshold.
inline CoflowTrajectory coflow_integrate(const WarpedState& initial, double t_final, double dt) {
  initial.validate();
  initial.require_positive();
  if (!(dt > 0.0) || !(t_final >= 0.0) || !std::isfinite(t_final)) throw ValidationError("need dt > 0 and t_final >= 0");
  const double bound = stable_dt(initial);
  if (dt > bound) throw ValidationError("dt = " + format_double(dt) + " exceeds the stability bound " + format_double(bound));
  const long steps = t_final == 0.0 ? 0 : static_cast<long>(std::ceil(t_final / dt - 1e-12));
  const double h = steps > 0 ? t_final / static_cast<double>(steps) : dt;

  CoflowTrajectory tr;
  tr.dt = h;
  WarpedState s = initial;
  tr.records.push_back(detail::record_of(s, 0.0));
  for (long n = 0; n < steps; ++n) {
    const double t = (n + 1) * h;
    try {
      const auto k1 = coflow_rhs(fd_jets(s));
      const auto k2 = coflow_rhs(fd_jets(detail::axpy(s, 0.5 * h, k1)));
      const auto k3 = coflow_rhs(fd_jets(detail::axpy(s, 0.5 * h, k2)));
      const auto k4 = coflow_rhs(fd_jets(detail::axpy(s, h, k3)));
      CoflowRhs sum = k1;
      for (int i = 0; i < s.N(); ++i) {
        sum.dell[i] = (k1.dell[i] + 2.0 * k2.dell[i] + 2.0 * k3.dell[i] + k4.dell[i]) / 6.0;
        sum.dtheta[i] = (k1.dtheta[i] + 2.0 * k2.dtheta[i] + 2.0 * k3.dtheta[i] + k4.dtheta[i]) / 6.0;
        sum.dG[i] = (k1.dG[i] + 2.0 * k2.dG[i] + 2.0 * k3.dG[i] + k4.dG[i]) / 6.0;
      }
      WarpedState next = detail::axpy(s, h, sum);
      double sup = 0.0;
      bool finite = true;
      for (int i = 0; i < s.N(); ++i) {
        for (double v : {next.ell[i], next.theta[i], next.G[i]}) {
          finite = finite && std::isfinite(v);
          sup = std::max(sup, std::fabs(v));
        }
      }
      if (!finite || sup > kBlowUpThreshold) {
        tr.status = "blow_up";
        tr.diagnosis = "sup norm " + format_double(sup) + " at t = " + format_double(t);
        break;
      }
      next.require_positive();
      s = std::move(next);
      tr.records.push_back(detail::record_of(s, t));
    } catch (const PositivityLost& e) {
      tr.status = "positivity_lost";
      tr.diagnosis = std::string(e.what()) + " during the step ending at t = " + format_double(t);
      break;
    }
  }
  tr.final_state = s;
  if (initial.domain == WarpedDomain::circle) {
    const auto a0 = theta_mode_amplitudes(initial), a1 = theta_mode_amplitudes(s);
    for (std::size_t m = 0; m < a0.size(); ++m)
      if (a0[m] > 1e-14) tr.theta_modes.push_back({static_cast<int>(m) + 1, a0[m], a1[m], a1[m] / a0[m]});
  }
  return tr;
}

// ---------------------------------------------------------------------------------------------
// CY solitons

/// theta = (2/3) arctan(c e^{br}), s = b (1 - c^2 e^{2br}) / (1 + c^2 e^{2br}), with exact derivatives.
struct CySolitonFamily {
  double b = 0.0, c = 0.0;
  std::vector<double> r;
  Jet theta, s;
};

inline CySolitonFamily cy_soliton_family(double b, double c, const std::vector<double>& r) {
  if (!std::isfinite(b) || !std::isfinite(c)) throw ValidationError("b and c must be finite");
  CySolitonFamily f{b, c, r, {}, {}};
  const std::size_t N = r.size();
  f.theta = {std::vector<double>(N), std::vector<double>(N), std::vector<double>(N)};
  f.s = {std::vector<double>(N), std::vector<double>(N), std::vector<double>(N)};
  for (std::size_t i = 0; i < N; ++i) {
    const double u = c * std::exp(b * r[i]), q = 1.0 + u * u;
    f.theta.v[i] = 2.0 / 3.0 * std::atan(u);
    f.theta.d1[i] = 2.0 / 3.0 * b * u / q;
    f.theta.d2[i] = 2.0 / 3.0 * b * b * u * (1.0 - u * u) / (q * q);
    f.s.v[i] = b * (1.0 - u * u) / q;
    f.s.d1[i] = -4.0 * b * b * u * u / (q * q);
    f.s.d2[i] = -8.0 * b * b * b * u * u * (1.0 - u * u) / (q * q * q);
  }
  return f;
}

/// Reduced soliton coefficient D = d/dr[(sigma 3 theta'/(2G) + tau i s G/2) e^{3i theta}].
/// The frozen convention is sigma = tau = +1 (see cy_calibrate).
inline std::vector<std::complex<double>> cy_soliton_residual(const Jet& theta, const Jet& s, const Jet& G,
                                                             int sigma = 1, int tau = 1) {
  const std::size_t N = theta.size();
  if (s.size() != N || G.size() != N) throw ValidationError("jet lengths differ");
  const std::complex<double> I(0.0, 1.0);
  std::vector<std::complex<double>> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double g = G.v[i];
    const std::complex<double> A = double(sigma) * 1.5 * theta.d1[i] / g + double(tau) * I * 0.5 * s.v[i] * g;
    const std::complex<double> A1 = double(sigma) * 1.5 * (theta.d2[i] / g - theta.d1[i] * G.d1[i] / (g * g)) +
                                    double(tau) * I * 0.5 * (s.d1[i] * g + s.v[i] * G.d1[i]);
    out[i] = (A1 + 3.0 * I * theta.d1[i] * A) * std::exp(3.0 * I * theta.v[i]);
  }
  return out;
}

inline std::vector<std::complex<double>> cy_soliton_residual(const std::vector<double>& theta, const std::vector<double>& s,
                                                             const WarpedState& grid, int sigma = 1, int tau = 1) {
  return cy_soliton_residual(fd_jet(theta, grid), fd_jet(s, grid), fd_jet(grid.G, grid), sigma, tau);
}

struct CyConvention {
  int sigma = 1, tau = 1;
  double imag_residual = std::numeric_limits<double>::infinity();  // max over r
  double G_min = 0.0, G_max = 0.0;
  bool valid = false;  // G finite and positive everywhere
  std::vector<double> G;
};

struct CyCalibration {
  std::vector<CyConvention> conventions;  // (+,+), (+,-), (-,+), (-,-)
  std::size_t best = 0;
};

/// For each (sigma, tau), fixes the first integral K = (sigma 3theta'/(2G) + tau i sG/2) e^{3i theta} at
/// r[anchor] with G(anchor) = 1, solves the real part for G pointwise and reports the imaginary remainder.
inline CyCalibration cy_calibrate(const CySolitonFamily& f, std::size_t anchor) {
  if (anchor >= f.r.size()) throw ValidationError("anchor index out of range");
  const std::complex<double> I(0.0, 1.0);
  CyCalibration cal;
  for (int sigma : {1, -1})
    for (int tau : {1, -1}) {
      CyConvention cv;
      cv.sigma = sigma;
      cv.tau = tau;
      const std::size_t a = anchor;
      const std::complex<double> K =
          (double(sigma) * 1.5 * f.theta.d1[a] + double(tau) * I * 0.5 * f.s.v[a]) * std::exp(3.0 * I * f.theta.v[a]);
      cv.G.resize(f.r.size());
      cv.valid = true;
      double worst = 0.0;
      cv.G_min = std::numeric_limits<double>::infinity();
      cv.G_max = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < f.r.size(); ++i) {
        const std::complex<double> w = K * std::exp(-3.0 * I * f.theta.v[i]);
        const double g = double(sigma) * 1.5 * f.theta.d1[i] / w.real();
        cv.G[i] = g;
        if (!std::isfinite(g) || !(g > 0.0)) cv.valid = false;
        cv.G_min = std::min(cv.G_min, g);
        cv.G_max = std::max(cv.G_max, g);
        worst = std::max(worst, std::fabs(tau * 0.5 * f.s.v[i] * g - w.imag()));
      }
      cv.imag_residual = cv.valid && std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
      cal.conventions.push_back(std::move(cv));
    }
  for (std::size_t k = 1; k < cal.conventions.size(); ++k)
    if (cal.conventions[k].imag_residual < cal.conventions[cal.best].imag_residual) cal.best = k;
  return cal;
}

}  // namespace geoflow
