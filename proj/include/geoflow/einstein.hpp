#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "curvature.hpp"
#include "scalar.hpp"

namespace geoflow {

/// Ricci flow on the Einstein ray g(t) = c(t) g0 with Rc(g0) = lambda g0.
struct EinsteinFlowState {
  double lambda = 0.0;
  double c = 1.0;
  double t = 0.0;
};

/// 1/(2 lambda) for lambda > 0, +infinity otherwise.
inline double extinction_time(double lambda) {
  return lambda > 0.0 ? 1.0 / (2.0 * lambda) : std::numeric_limits<double>::infinity();
}

inline EinsteinFlowState einstein_flow(double lambda, double t) {
  if (!std::isfinite(lambda) || !std::isfinite(t)) throw ValidationError("lambda and t must be finite");
  if (t < 0.0) throw ValidationError("t must be nonnegative");
  if (t >= extinction_time(lambda))
    throw ExtinctError("flow is extinct at t = " + format_double(extinction_time(lambda)) + " (requested t = " +
                       format_double(t) + ")");
  return {lambda, 1.0 - 2.0 * lambda * t, t};
}

struct EinsteinScaleCheck {
  double lambda = 0.0;
  double t = 0.0;
  double c = 1.0;
  double flow_residual = 0.0;     // max |d/dt g + 2 Rc(g(t))|
  double scale_residual = 0.0;    // max |Rc(c g0) - Rc(g0)|
  double einstein_residual = 0.0; // max |Rc(g0) - lambda g0|
};

/// Constant-curvature model metric on a 2-D patch with Rc = lambda g: the stereographic sphere for
/// lambda > 0, the Poincare disk for lambda < 0, the flat metric for lambda = 0.
inline Eigen::Matrix3d space_form_metric(double lambda, const std::array<double, 3>& x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  double f = 1.0;
  if (lambda > 0.0) f = 4.0 / ((1.0 + r2) * (1.0 + r2)) / lambda;
  if (lambda < 0.0) f = 4.0 / ((1.0 - r2) * (1.0 - r2)) / -lambda;
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 0) = m(1, 1) = f;
  return m;
}

/// Checks d/dt (c g0) = -2 Rc(c g0) on an N x N patch away from the two edge rows. The patch is
/// [-1/2, 1/2]^2, shrunk to [-1/4, 1/4]^2 for the disk where the conformal factor grows toward |x| = 1.
inline EinsteinScaleCheck einstein_scale_check(double lambda, double t, int N = 256) {
  const auto state = einstein_flow(lambda, t);
  const double w = lambda < 0.0 ? 0.25 : 0.5;
  const auto geo = GridGeometry::patch({N, N}, {-w, -w}, {2.0 * w, 2.0 * w});
  const Field g0 = sample_metric(geo, [&](const std::array<double, 3>& x) { return space_form_metric(lambda, x); });
  const Field Rc0 = curvature(MetricGrid(geo, g0)).Rc;
  const Field Rct = curvature(MetricGrid(geo, state.c * g0)).Rc;
  auto mask = [&](std::size_t node) { return geo.interior(node, 2); };
  EinsteinScaleCheck out{lambda, t, state.c};
  out.flow_residual = ((-2.0 * lambda) * g0 + 2.0 * Rct).max_abs(mask);
  out.scale_residual = (Rct - Rc0).max_abs(mask);
  out.einstein_residual = (Rc0 - lambda * g0).max_abs(mask);
  return out;
}

}  // namespace geoflow
