#pragma once

#include <array>

#include "exterior.hpp"
#include "g2.hpp"

namespace geoflow {

/// omega_1 = e01 + e23, omega_2 = e02 + e31, omega_3 = e03 + e12 on R^4; bar flips the second term.
template <class S>
DenseTensor<S> su2_omega(int i, bool bar = false) {
  static const int second[3][2] = {{2, 3}, {3, 1}, {1, 2}};
  DenseTensor<S> w(4, 2, Symmetry::antisym);
  w.set_antisym({0, i}, S(1));
  w.set_antisym({second[i - 1][0], second[i - 1][1]}, S(bar ? -1 : 1));
  return w;
}

/// J_i solving (J_i X) _| omega_j = X _| omega_k for cyclic (i, j, k), as a matrix acting on column vectors.
template <class S>
Matrix<S> su2_complex_structure(int i) {
  const int j = i % 3 + 1, k = j % 3 + 1;
  // (J X)^T omega_j = X^T omega_k  =>  J = (omega_j^T)^{-1} omega_k^T.
  const Matrix<S> wj = to_matrix(su2_omega<S>(j)).transpose();
  const Matrix<S> wk = to_matrix(su2_omega<S>(k)).transpose();
  return solve(wj, wk);
}

template <class S>
struct Su2Report {
  std::array<S, 3> j_squared_residual;       // max |J_i^2 + I|
  std::array<S, 3> volume_residual;          // max |omega_i ^ omega_i / 2 - e0123|
  std::array<int, 3> compatibility_sign;     // s with omega_i(X, Y) = s g(J_i X, Y)
  std::array<S, 3> product_rule_residual;    // max |J_i J_j + J_k| (cyclic)
  S self_closure_residual = S(0);            // omega <> omega outside span(omega)
  S bar_closure_residual = S(0);             // omegabar <> omegabar outside span(omegabar)
  S cross_residual = S(0);                   // max |omega_i <> omegabar_j|
  std::array<std::array<std::array<S, 3>, 3>, 3> omega_diamond{};  // [i][j] = coordinates of omega_i <> omega_j
  bool ok = false;
};

namespace detail {

/// Coefficients of a 2-form on R^4 against an orthogonal triple of 2-forms with |w|^2 = 2.
template <class S>
std::array<S, 3> su2_coords(const DenseTensor<S>& a, bool bar) {
  std::array<S, 3> c;
  for (int i = 1; i <= 3; ++i) c[i - 1] = inner(a, su2_omega<S>(i, bar)) / S(2);
  return c;
}

template <class S>
S span_defect(const DenseTensor<S>& a, bool bar) {
  const auto c = su2_coords(a, bar);
  DenseTensor<S> r = a;
  for (int i = 1; i <= 3; ++i) r -= c[i - 1] * su2_omega<S>(i, bar);
  return max_abs(r);
}

}  // namespace detail

template <class S>
Su2Report<S> su2_algebra_check() {
  Su2Report<S> rep;
  const Matrix<S> I = Matrix<S>::identity(4);
  DenseTensor<S> vol(4, 4, Symmetry::antisym);
  vol.set_antisym({0, 1, 2, 3}, S(1));
  bool ok = true;
  for (int i = 1; i <= 3; ++i) {
    const Matrix<S> J = su2_complex_structure<S>(i);
    const Matrix<S> J2 = J * J + I;
    S m(0);
    for (const auto& v : J2.a) m = std::max(m, S(ScalarTraits<S>::abs(v)));
    rep.j_squared_residual[i - 1] = m;

    const auto w = su2_omega<S>(i);
    DenseTensor<S> half = wedge(w, w);
    half *= S(1) / S(2);
    rep.volume_residual[i - 1] = detail::max_abs(half - vol);

    // g(J X, Y) = (J X)_b Y_b, so the bilinear form of J is J^T as a matrix.
    const Matrix<S> JT = J.transpose();
    const Matrix<S> W = to_matrix(w);
    if (W == JT) rep.compatibility_sign[i - 1] = 1;
    else if (W == S(-1) * JT) rep.compatibility_sign[i - 1] = -1;
    else rep.compatibility_sign[i - 1] = 0;

    const int j = i % 3 + 1, k = j % 3 + 1;
    const Matrix<S> P = su2_complex_structure<S>(i) * su2_complex_structure<S>(j) + su2_complex_structure<S>(k);
    S pm(0);
    for (const auto& v : P.a) pm = std::max(pm, S(ScalarTraits<S>::abs(v)));
    rep.product_rule_residual[i - 1] = pm;

    ok = ok && m == S(0) && rep.volume_residual[i - 1] == S(0) && rep.compatibility_sign[i - 1] != 0;
  }
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const auto wi = su2_omega<S>(i), wj = su2_omega<S>(j);
      const auto bi = su2_omega<S>(i, true), bj = su2_omega<S>(j, true);
      const auto ww = diamond(wi, wj);
      rep.self_closure_residual = std::max(rep.self_closure_residual, detail::span_defect(ww, false));
      rep.bar_closure_residual = std::max(rep.bar_closure_residual, detail::span_defect(diamond(bi, bj), true));
      rep.cross_residual = std::max(rep.cross_residual, detail::max_abs(diamond(wi, bj)));
      rep.cross_residual = std::max(rep.cross_residual, detail::max_abs(diamond(bi, wj)));
      rep.omega_diamond[i - 1][j - 1] = detail::su2_coords(ww, false);
    }
  ok = ok && rep.self_closure_residual == S(0) && rep.bar_closure_residual == S(0) && rep.cross_residual == S(0);
  rep.ok = ok;
  return rep;
}

}  // namespace geoflow
