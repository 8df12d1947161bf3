#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "grid.hpp"

namespace geoflow {

struct CurvatureBundle {
  Field Gamma;  // Gamma^k_ij at component (k*n + i)*n + j
  Field Rm;     // R_ijkl at ((i*n + j)*n + k)*n + l
  Field Rc;     // R_jk at j*n + k
  Field R;      // scalar
};

namespace detail {

inline Eigen::MatrixXd node_matrix(const Field& f, std::size_t node, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = f(node, i * n + j);
  return a;
}

inline Field inverse_field(const Field& g, int n) {
  Field out(g.nodes, n * n);
  parallel_for(g.nodes, [&](std::size_t node) {
    const Eigen::MatrixXd inv = node_matrix(g, node, n).inverse();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(node, i * n + j) = inv(i, j);
  });
  return out;
}

inline Field christoffel_of(const Field& g, const GridGeometry& geo) {
  const int n = geo.n;
  const Field ginv = inverse_field(g, n);
  const auto dg = gradient(g, geo);
  Field G(g.nodes, n * n * n);
  parallel_for(g.nodes, [&](std::size_t node) {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l)
            acc += ginv(node, k * n + l) *
                   (dg[j](node, i * n + l) + dg[i](node, j * n + l) - dg[l](node, i * n + j));
          G(node, (k * n + i) * n + j) = 0.5 * acc;
        }
  });
  return G;
}

inline bool constant_metric(const MetricGrid& grid) {
  for (std::size_t node = 1; node < grid.g.nodes; ++node)
    for (int c = 0; c < grid.g.ncomp; ++c)
      if (grid.g(node, c) != grid.g(0, c)) return false;
  return true;
}

}  // namespace detail

/// Gamma^k_ij = g^kl (d_j g_il + d_i g_jl - d_l g_ij) / 2.
inline Field christoffel(const MetricGrid& grid) { return detail::christoffel_of(grid.g, grid.geo); }

/// R_ijkl = g_ml (d_i Gamma^m_jk - d_j Gamma^m_ik + Gamma^m_ia Gamma^a_jk - Gamma^m_ja Gamma^a_ik),
/// R_jk = g^il R_ijkl, R = g^jk R_jk.
inline CurvatureBundle curvature(const MetricGrid& grid) {
  const int n = grid.n();
  const auto& geo = grid.geo;
  CurvatureBundle cb;
  cb.Gamma = christoffel(grid);
  const auto dG = gradient(cb.Gamma, geo);
  const Field ginv = detail::inverse_field(grid.g, n);
  const std::size_t N = geo.nodes();
  cb.Rm = Field(N, n * n * n * n);
  cb.Rc = Field(N, n * n);
  cb.R = Field(N, 1);
  auto gam = [&](std::size_t node, int k, int i, int j) { return cb.Gamma(node, (k * n + i) * n + j); };
  parallel_for(N, [&](std::size_t node) {
    std::vector<double> T(static_cast<std::size_t>(n * n * n * n), 0.0);  // T^m_ijk
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double v = dG[i](node, (m * n + j) * n + k) - dG[j](node, (m * n + i) * n + k);
            for (int a = 0; a < n; ++a) v += gam(node, m, i, a) * gam(node, a, j, k) - gam(node, m, j, a) * gam(node, a, i, k);
            T[((m * n + i) * n + j) * n + k] = v;
          }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = 0.0;
            for (int m = 0; m < n; ++m) v += grid.g(node, m * n + l) * T[((m * n + i) * n + j) * n + k];
            cb.Rm(node, ((i * n + j) * n + k) * n + l) = v;
          }
    double R = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int i = 0; i < n; ++i)
          for (int l = 0; l < n; ++l) v += ginv(node, i * n + l) * cb.Rm(node, ((i * n + j) * n + k) * n + l);
        cb.Rc(node, j * n + k) = v;
        R += ginv(node, j * n + k) * v;
      }
    cb.R(node, 0) = R;
  });
  return cb;
}

/// (Div h)_k = g^pq nabla_p h_qk.
inline Field divergence(const Field& h, const MetricGrid& grid) {
  const int n = grid.n();
  const Field G = christoffel(grid);
  const Field ginv = detail::inverse_field(grid.g, n);
  const auto dh = gradient(h, grid.geo);
  Field out(h.nodes, n);
  parallel_for(h.nodes, [&](std::size_t node) {
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          double nab = dh[p](node, q * n + k);
          for (int m = 0; m < n; ++m)
            nab -= G(node, (m * n + p) * n + q) * h(node, m * n + k) + G(node, (m * n + p) * n + k) * h(node, q * n + m);
          acc += ginv(node, p * n + q) * nab;
        }
      out(node, k) = acc;
    }
  });
  return out;
}

/// (Div* X)_ij = -(nabla_i X_j + nabla_j X_i) / 2.
inline Field divstar(const Field& X, const MetricGrid& grid) {
  const int n = grid.n();
  const Field G = christoffel(grid);
  const auto dX = gradient(X, grid.geo);
  Field out(X.nodes, n * n);
  parallel_for(X.nodes, [&](std::size_t node) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = dX[i](node, j) + dX[j](node, i);
        for (int m = 0; m < n; ++m) v -= 2.0 * G(node, (m * n + i) * n + j) * X(node, m);
        out(node, i * n + j) = -0.5 * v;
      }
  });
  return out;
}

/// Riemannian integral of the pointwise metric inner product of two covector or two 2-tensor fields.
inline double integrate_inner(const Field& a, const Field& b, const MetricGrid& grid) {
  const int n = grid.n();
  const Field ginv = detail::inverse_field(grid.g, n);
  double cell = 1.0;
  for (int ax = 0; ax < n; ++ax) cell *= grid.geo.spacing(ax);
  double total = 0.0;
  for (std::size_t node = 0; node < a.nodes; ++node) {
    const double vol = std::sqrt(detail::node_matrix(grid.g, node, n).determinant());
    double ip = 0.0;
    if (a.ncomp == n) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ip += ginv(node, i * n + j) * a(node, i) * b(node, j);
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              ip += ginv(node, i * n + p) * ginv(node, j * n + q) * a(node, i * n + j) * b(node, p * n + q);
    }
    total += ip * vol * cell;
  }
  return total;
}

struct AdjointnessCheck {
  double div_side = 0.0;     // integral of <Div h, X>
  double divstar_side = 0.0; // integral of <h, Div* X>
  double residual = 0.0;     // div_side - divstar_side
};

/// Discrete integration by parts on a periodic grid: integral <Div h, X> = integral <h, Div* X> + O(h^2).
inline AdjointnessCheck adjointness(const Field& h, const Field& X, const MetricGrid& grid) {
  if (!grid.geo.periodic) throw ValidationError("adjointness needs a periodic grid");
  AdjointnessCheck c;
  c.div_side = integrate_inner(divergence(h, grid), X, grid);
  c.divstar_side = integrate_inner(h, divstar(X, grid), grid);
  c.residual = c.div_side - c.divstar_side;
  return c;
}

namespace detail {

/// D_a D_b f with the same composed first-difference operators used by the curvature routine.
inline std::vector<std::vector<Field>> hessian(const Field& f, const GridGeometry& geo) {
  const auto d = gradient(f, geo);
  std::vector<std::vector<Field>> out(geo.n);
  for (int a = 0; a < geo.n; ++a)
    for (int b = 0; b < geo.n; ++b) out[a].push_back(derivative(d[b], geo, a));
  return out;
}

inline void require_flat_background(const MetricGrid& grid) {
  if (!constant_metric(grid)) throw ValidationError("linearized operators need a constant (flat) background metric");
}

}  // namespace detail

/// (D Rc)(h)_jk = g^ab (d_a d_j h_bk + d_a d_k h_bj - d_a d_b h_jk - d_j d_k h_ab) / 2 at a constant metric.
inline Field linearized_ricci(const Field& h, const MetricGrid& grid) {
  detail::require_flat_background(grid);
  const int n = grid.n();
  const Eigen::MatrixXd ginv = detail::node_matrix(grid.g, 0, n).inverse();
  const auto H = detail::hessian(h, grid.geo);
  Field out(h.nodes, n * n);
  parallel_for(h.nodes, [&](std::size_t node) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            v += ginv(a, b) * (H[a][j](node, b * n + k) + H[a][k](node, b * n + j) - H[a][b](node, j * n + k) -
                               H[j][k](node, a * n + b));
        out(node, j * n + k) = 0.5 * v;
      }
  });
  return out;
}

/// D(R g)(h) = (-Delta tr h + Div Div h) g at a constant metric (the <h, Rc> and R h terms vanish).
inline Field linearized_scalar(const Field& h, const MetricGrid& grid) {
  detail::require_flat_background(grid);
  const int n = grid.n();
  const Eigen::MatrixXd ginv = detail::node_matrix(grid.g, 0, n).inverse();
  const auto H = detail::hessian(h, grid.geo);
  Field out(h.nodes, n * n);
  parallel_for(h.nodes, [&](std::size_t node) {
    double lap_tr = 0.0, divdiv = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) {
            lap_tr += ginv(a, b) * ginv(p, q) * H[a][b](node, p * n + q);
            divdiv += ginv(p, a) * ginv(q, b) * H[p][q](node, a * n + b);
          }
    const double c = -lap_tr + divdiv;
    for (int i = 0; i < n * n; ++i) out(node, i) = c * grid.g(node, i);
  });
  return out;
}

using GridOperator = std::function<Field(const MetricGrid&)>;

inline Field ricci_operator(const MetricGrid& grid) { return curvature(grid).Rc; }

/// R g as a 2-tensor field.
inline Field scalar_metric_operator(const MetricGrid& grid) {
  const auto cb = curvature(grid);
  Field out = grid.g;
  for (std::size_t node = 0; node < out.nodes; ++node)
    for (int c = 0; c < out.ncomp; ++c) out(node, c) *= cb.R(node, 0);
  return out;
}

/// (op(g + eps h) - op(g - eps h)) / (2 eps).
inline Field fd_linearization_oracle(const GridOperator& op, const MetricGrid& grid, const Field& h, double eps = 1e-4) {
  MetricGrid plus(grid.geo, grid.g + eps * h);
  MetricGrid minus(grid.geo, grid.g - eps * h);
  Field out = op(plus) - op(minus);
  out *= 1.0 / (2.0 * eps);
  return out;
}

/// W^k = g^ij (Gamma(g)^k_ij - Gamma(g0)^k_ij).
inline Field deturck_field(const MetricGrid& grid) {
  if (!grid.has_reference()) throw ValidationError("the DeTurck field needs a reference metric g0");
  const int n = grid.n();
  const Field G = christoffel(grid);
  const Field G0 = detail::christoffel_of(grid.g0, grid.geo);
  const Field ginv = detail::inverse_field(grid.g, n);
  Field W(G.nodes, n);
  parallel_for(G.nodes, [&](std::size_t node) {
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          v += ginv(node, i * n + j) * (G(node, (k * n + i) * n + j) - G0(node, (k * n + i) * n + j));
      W(node, k) = v;
    }
  });
  return W;
}

/// Y_l = g^ab (nabla_a h_bl + nabla_b h_al - nabla_l h_ab) / 2 at a constant metric.
inline Field deturck_linearization(const Field& h, const MetricGrid& grid) {
  detail::require_flat_background(grid);
  const int n = grid.n();
  const Eigen::MatrixXd ginv = detail::node_matrix(grid.g, 0, n).inverse();
  const auto dh = gradient(h, grid.geo);
  Field Y(h.nodes, n);
  for (std::size_t node = 0; node < h.nodes; ++node)
    for (int l = 0; l < n; ++l) {
      double v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          v += ginv(a, b) * (dh[a](node, b * n + l) + dh[b](node, a * n + l) - dh[l](node, a * n + b));
      Y(node, l) = 0.5 * v;
    }
  return Y;
}

/// Christoffel symbols of a metric given as a function, by fourth-order central differences of step `step`.
/// Result index (k*n + i)*n + j.
inline std::vector<double> christoffel_at(const std::function<Eigen::Matrix3d(const std::array<double, 3>&)>& metric,
                                          const std::array<double, 3>& x, int n, double step = 1e-3) {
  std::vector<Eigen::Matrix3d> dg(n);
  for (int a = 0; a < n; ++a) {
    auto shifted = [&](double s) {
      auto y = x;
      y[a] += s;
      return metric(y);
    };
    dg[a] = (-shifted(2 * step) + 8.0 * shifted(step) - 8.0 * shifted(-step) + shifted(-2 * step)) / (12.0 * step);
  }
  const Eigen::MatrixXd ginv = metric(x).topLeftCorner(n, n).inverse();
  std::vector<double> G(static_cast<std::size_t>(n * n * n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += ginv(k, l) * (dg[j](i, l) + dg[i](j, l) - dg[l](i, j));
        G[(k * n + i) * n + j] = 0.5 * acc;
      }
  return G;
}

}  // namespace geoflow
