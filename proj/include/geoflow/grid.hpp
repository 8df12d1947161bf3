#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "parallel.hpp"

namespace geoflow {

/// Uniform node layout on [lo, lo + length]^n. Periodic axes have N nodes spaced length/N;
/// patch axes include both endpoints and are spaced length/(N - 1).
struct GridGeometry {
  int n = 0;
  std::vector<int> shape;
  bool periodic = true;
  std::vector<double> lo;
  std::vector<double> length;

  static GridGeometry torus(std::vector<int> shape) {
    GridGeometry g;
    g.n = static_cast<int>(shape.size());
    g.shape = std::move(shape);
    g.periodic = true;
    g.lo.assign(g.n, 0.0);
    g.length.assign(g.n, 1.0);
    g.check();
    return g;
  }
  static GridGeometry patch(std::vector<int> shape, std::vector<double> lo, std::vector<double> length) {
    GridGeometry g;
    g.n = static_cast<int>(shape.size());
    g.shape = std::move(shape);
    g.periodic = false;
    g.lo = std::move(lo);
    g.length = std::move(length);
    g.check();
    return g;
  }

  void check() const {
    if (n < 1 || n > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
    if (static_cast<int>(lo.size()) != n || static_cast<int>(length.size()) != n)
      throw ValidationError("grid bounds must match the dimension");
    for (int a = 0; a < n; ++a) {
      if (shape[a] < (periodic ? 3 : 5)) throw ValidationError("too few nodes on an axis");
      if (!(length[a] > 0.0)) throw ValidationError("axis length must be positive");
    }
  }

  std::size_t nodes() const {
    std::size_t c = 1;
    for (int s : shape) c *= static_cast<std::size_t>(s);
    return c;
  }
  double spacing(int axis) const {
    return periodic ? length[axis] / shape[axis] : length[axis] / (shape[axis] - 1);
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = n - 1; a > axis; --a) s *= static_cast<std::size_t>(shape[a]);
    return s;
  }
  int coord_index(std::size_t node, int axis) const {
    return static_cast<int>((node / stride(axis)) % static_cast<std::size_t>(shape[axis]));
  }
  std::array<double, 3> position(std::size_t node) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < n; ++a) x[a] = lo[a] + coord_index(node, a) * spacing(a);
    return x;
  }
  /// True when the node is at least `margin` nodes away from every patch edge.
  bool interior(std::size_t node, int margin) const {
    if (periodic) return true;
    for (int a = 0; a < n; ++a) {
      const int i = coord_index(node, a);
      if (i < margin || i > shape[a] - 1 - margin) return false;
    }
    return true;
  }
  bool operator==(const GridGeometry& o) const {
    return n == o.n && shape == o.shape && periodic == o.periodic && lo == o.lo && length == o.length;
  }
};

/// Multi-component nodal field, component-fastest storage.
struct Field {
  int ncomp = 1;
  std::size_t nodes = 0;
  std::vector<double> data;

  Field() = default;
  Field(std::size_t n_nodes, int components) : ncomp(components), nodes(n_nodes), data(n_nodes * components, 0.0) {}

  double& operator()(std::size_t node, int c) { return data[node * ncomp + c]; }
  double operator()(std::size_t node, int c) const { return data[node * ncomp + c]; }

  Field& operator+=(const Field& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
    return *this;
  }
  Field& operator*=(double c) {
    for (auto& v : data) v *= c;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double c, Field a) { return a *= c; }

  /// Max |value| over nodes accepted by the mask.
  double max_abs(const std::function<bool(std::size_t)>& mask = {}) const {
    double m = 0.0;
    for (std::size_t node = 0; node < nodes; ++node) {
      if (mask && !mask(node)) continue;
      for (int c = 0; c < ncomp; ++c) m = std::max(m, std::fabs((*this)(node, c)));
    }
    return m;
  }
};

/// Second-order first derivative along one axis: central in the interior, periodic wrap or
/// one-sided (-3, 4, -1)/2h stencils at patch edges.
inline Field derivative(const Field& f, const GridGeometry& geo, int axis) {
  Field out(f.nodes, f.ncomp);
  const int N = geo.shape[axis];
  const std::size_t st = geo.stride(axis);
  const double h = geo.spacing(axis);
  parallel_for(f.nodes, [&](std::size_t node) {
    const int i = geo.coord_index(node, axis);
    const std::size_t base = node - static_cast<std::size_t>(i) * st;
    auto at = [&](int j, int c) { return f(base + static_cast<std::size_t>(j) * st, c); };
    for (int c = 0; c < f.ncomp; ++c) {
      double d;
      if (geo.periodic) {
        d = (at((i + 1) % N, c) - at((i - 1 + N) % N, c)) / (2.0 * h);
      } else if (i == 0) {
        d = (-3.0 * at(0, c) + 4.0 * at(1, c) - at(2, c)) / (2.0 * h);
      } else if (i == N - 1) {
        d = (3.0 * at(N - 1, c) - 4.0 * at(N - 2, c) + at(N - 3, c)) / (2.0 * h);
      } else {
        d = (at(i + 1, c) - at(i - 1, c)) / (2.0 * h);
      }
      out(node, c) = d;
    }
  });
  return out;
}

/// All first derivatives: out[axis].
inline std::vector<Field> gradient(const Field& f, const GridGeometry& geo) {
  std::vector<Field> d;
  for (int a = 0; a < geo.n; ++a) d.push_back(derivative(f, geo, a));
  return d;
}

/// Symmetric metric per node (n*n components, full storage) with an optional reference metric g0.
struct MetricGrid {
  GridGeometry geo;
  Field g;
  Field g0;  // empty when absent

  MetricGrid() = default;
  MetricGrid(GridGeometry geometry, Field metric, Field reference = {})
      : geo(std::move(geometry)), g(std::move(metric)), g0(std::move(reference)) {
    validate();
  }

  int n() const { return geo.n; }
  bool has_reference() const { return !g0.data.empty(); }

  void validate() const {
    const int n = geo.n;
    if (g.ncomp != n * n || g.nodes != geo.nodes()) throw ValidationError("metric field has the wrong size");
    check_spd(g, "g");
    if (has_reference()) {
      if (g0.ncomp != n * n || g0.nodes != geo.nodes()) throw ValidationError("reference metric has the wrong size");
      check_spd(g0, "g0");
    }
  }

  void check_spd(const Field& m, const char* name) const {
    const int n = geo.n;
    for (std::size_t node = 0; node < m.nodes; ++node) {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = m(node, i * n + j);
      const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
      if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError(std::string(name) + " is not symmetric at node " + std::to_string(node));
      if (Eigen::LLT<Eigen::MatrixXd>(a).info() != Eigen::Success)
        throw ValidationError(std::string(name) + " is not positive definite at node " + std::to_string(node));
    }
  }
};

/// Samples a metric given as a function of position.
inline Field sample_metric(const GridGeometry& geo,
                           const std::function<Eigen::Matrix3d(const std::array<double, 3>&)>& metric) {
  const int n = geo.n;
  Field f(geo.nodes(), n * n);
  for (std::size_t node = 0; node < geo.nodes(); ++node) {
    const Eigen::Matrix3d m = metric(geo.position(node));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f(node, i * n + j) = m(i, j);
  }
  return f;
}

inline Field sample_field(const GridGeometry& geo, int ncomp,
                          const std::function<void(const std::array<double, 3>&, double*)>& fn) {
  Field f(geo.nodes(), ncomp);
  for (std::size_t node = 0; node < geo.nodes(); ++node) fn(geo.position(node), &f.data[node * ncomp]);
  return f;
}

inline Field flat_metric(const GridGeometry& geo) {
  return sample_metric(geo, [](const std::array<double, 3>&) { return Eigen::Matrix3d::Identity().eval(); });
}

}  // namespace geoflow
