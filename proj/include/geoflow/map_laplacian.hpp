#pragma once

#include <array>
#include <functional>
#include <vector>

#include "curvature.hpp"

namespace geoflow {

using MetricFunction = std::function<Eigen::Matrix3d(const std::array<double, 3>&)>;

/// Map between tori: F^a(x) = sum_i winding[a][i] x^i + u^a(x), u periodic.
struct TorusMap {
  int target_dim = 0;
  std::vector<std::vector<int>> winding;
  Field displacement;  // target_dim components

  static TorusMap identity(const GridGeometry& geo) {
    TorusMap F;
    F.target_dim = geo.n;
    F.winding.assign(geo.n, std::vector<int>(geo.n, 0));
    for (int a = 0; a < geo.n; ++a) F.winding[a][a] = 1;
    F.displacement = Field(geo.nodes(), geo.n);
    return F;
  }

  std::array<double, 3> value(const GridGeometry& geo, std::size_t node) const {
    const auto x = geo.position(node);
    std::array<double, 3> y{0.0, 0.0, 0.0};
    for (int a = 0; a < target_dim; ++a) {
      y[a] = displacement(node, a);
      for (int i = 0; i < geo.n; ++i) y[a] += winding[a][i] * x[i];
    }
    return y;
  }
};

/// (Delta_{g,h} F)^a = g^ij (d_i d_j F^a - Gamma(g)^k_ij d_k F^a + d_i F^b d_j F^c Gamma(h)^a_bc(F)).
inline Field map_laplacian(const TorusMap& F, const MetricGrid& source, const MetricFunction& target) {
  const auto& geo = source.geo;
  const int n = geo.n, m = F.target_dim;
  if (F.displacement.nodes != geo.nodes() || F.displacement.ncomp != m) throw ValidationError("map field has the wrong size");
  for (std::size_t node = 0; node < geo.nodes(); ++node) {
    const Eigen::MatrixXd h = target(F.value(geo, node)).topLeftCorner(m, m);
    if (Eigen::LLT<Eigen::MatrixXd>(h).info() != Eigen::Success || (h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ValidationError("target metric is not positive definite");
  }
  const Field G = christoffel(source);
  const Field ginv = detail::inverse_field(source.g, n);
  const auto du = gradient(F.displacement, geo);
  const auto H = detail::hessian(F.displacement, geo);
  Field out(geo.nodes(), m);
  parallel_for(geo.nodes(), [&](std::size_t node) {
    const auto Gh = christoffel_at(target, F.value(geo, node), m);
    auto dF = [&](int i, int a) { return F.winding[a][i] + du[i](node, a); };
    for (int a = 0; a < m; ++a) {
      double v = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double t = H[i][j](node, a);
          for (int k = 0; k < n; ++k) t -= G(node, (k * n + i) * n + j) * dF(k, a);
          for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) t += dF(i, b) * dF(j, c) * Gh[(a * m + b) * m + c];
          v += ginv(node, i * n + j) * t;
        }
      out(node, a) = v;
    }
  });
  return out;
}

/// [g^ab (-Gamma(g)^c_ab + Gamma(h)^c_ab)] evaluated pointwise from analytic metrics: the map Laplacian of
/// the identity map, written through the pulled-back metric (F^-1)^* g = g.
inline Field identity_map_laplacian_formula(const GridGeometry& geo, const MetricFunction& g, const MetricFunction& h) {
  const int n = geo.n;
  Field out(geo.nodes(), n);
  parallel_for(geo.nodes(), [&](std::size_t node) {
    const auto x = geo.position(node);
    const auto Gg = christoffel_at(g, x, n);
    const auto Gh = christoffel_at(h, x, n);
    const Eigen::MatrixXd ginv = g(x).topLeftCorner(n, n).inverse();
    for (int c = 0; c < n; ++c) {
      double v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v += ginv(a, b) * (-Gg[(c * n + a) * n + b] + Gh[(c * n + a) * n + b]);
      out(node, c) = v;
    }
  });
  return out;
}

}  // namespace geoflow
