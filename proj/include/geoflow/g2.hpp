#pragma once

#include <algorithm>
#include <utility>

#include "exterior.hpp"

namespace geoflow {

/// A G2-structure at a point: (phi, psi = *phi) with induced metric and orientation.
template <class S>
struct G2Point {
  DenseTensor<S> phi;
  DenseTensor<S> psi;
  DenseTensor<S> metric;
  S volume = S(1);
  int orientation = 1;

  DenseTensor<S> metric_inverse() const { return inverse_metric(metric); }
  bool orthonormal() const { return metric == identity_metric<S>(7); }
};

namespace detail {

template <class S>
void set_form3(DenseTensor<S>& phi, int i, int j, int k, int sign) {
  phi.set_antisym({i - 1, j - 1, k - 1}, S(sign));
}

template <class S>
S max_abs(const DenseTensor<S>& t) {
  S m(0);
  for (const auto& e : t.entries) m = std::max(m, S(ScalarTraits<S>::abs(e)));
  return m;
}

}  // namespace detail

/// phi0 = e123 + e145 - e167 + e246 - e275 + e347 - e356 (1-based labels), psi0 = *phi0.
template <class S>
DenseTensor<S> standard_phi() {
  DenseTensor<S> phi(7, 3, Symmetry::antisym);
#ifdef GEOFLOW_MUTATE_PHI0
  detail::set_form3(phi, 1, 2, 3, -1);  // mutation-testing build: the identity suite must fail
#else
  detail::set_form3(phi, 1, 2, 3, 1);
#endif
  detail::set_form3(phi, 1, 4, 5, 1);
  detail::set_form3(phi, 1, 6, 7, -1);
  detail::set_form3(phi, 2, 4, 6, 1);
  detail::set_form3(phi, 2, 7, 5, -1);
  detail::set_form3(phi, 3, 4, 7, 1);
  detail::set_form3(phi, 3, 5, 6, -1);
  return phi;
}

template <class S>
G2Point<S> standard_structure() {
  G2Point<S> p;
  p.phi = standard_phi<S>();
  p.metric = identity_metric<S>(7);
  p.psi = hodge_star(p.phi, p.metric, 1);
  p.volume = S(1);
  p.orientation = 1;
  return p;
}

/// B_ij with (e_i _| phi) ^ (e_j _| phi) ^ phi = -6 B_ij vol_orient, vol_orient = orientation * e_1...7.
template <class S>
DenseTensor<S> phi_bilinear_form(const DenseTensor<S>& phi, int orientation = 1) {
  if (phi.dim != 7 || phi.rank != 3) throw ValidationError("a 3-form on R^7 is required");
  std::vector<DenseTensor<S>> contracted;
  for (int i = 0; i < 7; ++i) contracted.push_back(interior(basis_vector<S>(7, i), phi));
  const Index top{0, 1, 2, 3, 4, 5, 6};
  DenseTensor<S> B(7, 2, Symmetry::sym2);
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      const S c = wedge(wedge(contracted[i], contracted[j]), phi)[top];
      S b = c / S(-6);
      if (orientation < 0) b = -b;
      B.set_sym(i, j, b);
    }
  return B;
}

template <class S>
struct InducedMetric {
  DenseTensor<S> metric;
  S volume;
};

/// g = (det B)^(-1/9) B; rejects phi when det B <= 0 or g fails to be positive definite.
template <class S>
InducedMetric<S> metric_from_3form(const DenseTensor<S>& phi, int orientation = 1) {
  const DenseTensor<S> B = phi_bilinear_form(phi, orientation);
  const S detB = determinant(to_matrix(B));
  if (detB <= 0) throw NotAG2Structure("det B <= 0: the 3-form is not a positive 3-form for this orientation");
  S root;
  try {
    root = ScalarTraits<S>::nth_root(detB, 9);
  } catch (const std::domain_error&) {
    throw ValidationError("(det B)^(1/9) is irrational; use floating-point scalars for this input");
  }
  DenseTensor<S> g = B;
  for (auto& e : g.entries) e /= root;
  g.symmetry = Symmetry::sym2;
  if (!is_positive_definite(to_matrix(g))) throw NotAG2Structure("induced bilinear form is not positive definite");
  // det g = (det B)^(2/9), so sqrt(det g) = (det B)^(1/9).
  return {g, root};
}

/// Full point (metric, orientation, psi) induced by phi.
template <class S>
G2Point<S> make_g2_point(const DenseTensor<S>& phi, int orientation = 1) {
  auto m = metric_from_3form(phi, orientation);
  G2Point<S> p;
  p.phi = phi;
  p.metric = m.metric;
  p.volume = m.volume;
  p.orientation = orientation;
  p.psi = hodge_star(phi, m.metric, orientation);
  return p;
}

/// Left-hand side minus right-hand side of contraction identity `which` (1..6), as a tensor.
template <class S>
DenseTensor<S> contraction_identity_defect(int which, const G2Point<S>& pt) {
  const auto& phi = pt.phi;
  const auto& psi = pt.psi;
  const auto& g = pt.metric;
  const auto ginv = pt.metric_inverse();
  const int n = 7;
  switch (which) {
    case 1: {
      const auto phiu = raise_slot(phi, 2, ginv);
      DenseTensor<S> d(n, 4);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              S lhs(0);
              for (int k = 0; k < n; ++k) lhs += phi(i, j, k) * phiu(a, b, k);
              d(i, j, a, b) = lhs - (g(i, a) * g(j, b) - g(i, b) * g(j, a) - psi(i, j, a, b));
            }
      return d;
    }
    case 2: {
      const auto phiu = raise_slot(raise_slot(phi, 1, ginv), 2, ginv);
      DenseTensor<S> d(n, 2);
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a) {
          S lhs(0);
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) lhs += phi(i, j, k) * phiu(a, j, k);
          d(i, a) = lhs - S(6) * g(i, a);
        }
      return d;
    }
    case 3: {
      const auto phiu = raise_slot(phi, 2, ginv);
      DenseTensor<S> d(n, 5);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c) {
                S lhs(0);
                for (int k = 0; k < n; ++k) lhs += phiu(i, j, k) * psi(a, b, c, k);
                const S rhs = g(i, a) * phi(j, b, c) + g(i, b) * phi(a, j, c) + g(i, c) * phi(a, b, j) -
                              g(j, a) * phi(i, b, c) - g(j, b) * phi(a, i, c) - g(j, c) * phi(a, b, i);
                d[{i, j, a, b, c}] = lhs - rhs;
              }
      return d;
    }
    case 4: {
      const auto phiu = raise_slot(raise_slot(phi, 1, ginv), 2, ginv);
      DenseTensor<S> d(n, 3);
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            S lhs(0);
            for (int j = 0; j < n; ++j)
              for (int k = 0; k < n; ++k) lhs += phiu(i, j, k) * psi(a, b, j, k);
            d(i, a, b) = lhs + S(4) * phi(i, a, b);
          }
      return d;
    }
    case 5: {
      const auto psiu = raise_slot(raise_slot(psi, 2, ginv), 3, ginv);
      DenseTensor<S> d(n, 4);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              S lhs(0);
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) lhs += psi(i, j, k, l) * psiu(a, b, k, l);
              d(i, j, a, b) =
                  lhs - (S(4) * g(i, a) * g(j, b) - S(4) * g(i, b) * g(j, a) - S(2) * psi(i, j, a, b));
            }
      return d;
    }
    case 6: {
      const auto psiu = raise_slot(raise_slot(raise_slot(psi, 1, ginv), 2, ginv), 3, ginv);
      DenseTensor<S> d(n, 2);
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a) {
          S lhs(0);
          for (std::size_t o = 0; o < 343; ++o) lhs += psi.entries[i * 343 + o] * psiu.entries[a * 343 + o];
          d(i, a) = lhs - S(24) * g(i, a);
        }
      return d;
    }
    default: throw ValidationError("contraction identity index must be in 1..6");
  }
}

/// Max over free indices of |LHS - RHS|.
template <class S>
S contraction_identity_residual(int which, const G2Point<S>& pt) {
  return detail::max_abs(contraction_identity_defect(which, pt));
}

/// phi_ijk phi^ijk and psi_ijkl psi^ijkl (raw traces, 42 and 168 at the standard point).
template <class S>
std::pair<S, S> raw_square_norms(const G2Point<S>& pt) {
  const auto ginv = pt.metric_inverse();
  return {full_contraction(pt.phi, raise_all(pt.phi, ginv)), full_contraction(pt.psi, raise_all(pt.psi, ginv))};
}

/// (X x Y)^l = g^{lk} phi_ijk X^i Y^j.
template <class S>
DenseTensor<S> cross_product(const DenseTensor<S>& X, const DenseTensor<S>& Y, const G2Point<S>& pt) {
  DenseTensor<S> low(7, 1);
  for (int k = 0; k < 7; ++k)
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) low(k) += pt.phi(i, j, k) * X(i) * Y(j);
  return mat_vec(pt.metric_inverse(), low);
}

/// (A <> gamma)_{i1..ik} = sum_s A_{i_s m} gamma_{i1..m..ik} (orthonormal-frame form).
template <class S>
DenseTensor<S> diamond(const DenseTensor<S>& A, const DenseTensor<S>& gamma) {
  if (A.rank != 2 || A.dim != gamma.dim) throw ValidationError("diamond: shape mismatch");
  const int n = gamma.dim, k = gamma.rank;
  DenseTensor<S> out(n, k, gamma.symmetry == Symmetry::antisym ? Symmetry::antisym : Symmetry::none);
  for (std::size_t o = 0; o < out.size(); ++o) {
    Index idx = out.unflatten(o);
    S acc(0);
    for (int s = 0; s < k; ++s) {
      const int is = idx[s];
      for (int m = 0; m < n; ++m) {
        const S& a = A(is, m);
        if (ScalarTraits<S>::is_zero(a)) continue;
        idx[s] = m;
        acc += a * gamma[idx];
      }
      idx[s] = is;
    }
    out.entries[o] = acc;
  }
  return out;
}

/// Metric-aware diamond: A's second slot is raised before acting.
template <class S>
DenseTensor<S> diamond(const DenseTensor<S>& A, const DenseTensor<S>& gamma, const DenseTensor<S>& g) {
  return diamond(raise_slot(A, 1, inverse_metric(g)), gamma);
}

/// M(beta)_ab = beta^ij psi_ijab.
template <class S>
DenseTensor<S> psi_action_2form(const DenseTensor<S>& beta, const G2Point<S>& pt) {
  const auto up = raise_all(beta, pt.metric_inverse());
  DenseTensor<S> M(7, 2, Symmetry::antisym);
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      S acc(0);
      for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) acc += up(i, j) * pt.psi(i, j, a, b);
      M(a, b) = acc;
    }
  return M;
}

template <class S>
struct TwoFormSplit {
  DenseTensor<S> beta7;
  DenseTensor<S> beta14;
};

/// pi7 = (2I - M)/6, pi14 = (M + 4I)/6, from the eigenvalues -4 on Omega^2_7 and 2 on Omega^2_14.
template <class S>
TwoFormSplit<S> decompose_2form(const DenseTensor<S>& beta, const G2Point<S>& pt) {
  const auto M = psi_action_2form(beta, pt);
  TwoFormSplit<S> out{DenseTensor<S>(7, 2, Symmetry::antisym), DenseTensor<S>(7, 2, Symmetry::antisym)};
  for (std::size_t i = 0; i < beta.size(); ++i) {
    out.beta7.entries[i] = (S(2) * beta.entries[i] - M.entries[i]) / S(6);
    out.beta14.entries[i] = (M.entries[i] + S(4) * beta.entries[i]) / S(6);
  }
  return out;
}

template <class S>
struct ThreeFormParts {
  S f;               // Omega^3_1 coefficient: pi_1(gamma) = f phi
  DenseTensor<S> h;  // full symmetric part, h = (f/3) g + h0
  DenseTensor<S> h0; // trace-free part
  DenseTensor<S> X;  // vector part, pi_7(gamma) = X _| psi
};

/// compose(h, X) = h <> phi + X _| psi.
template <class S>
DenseTensor<S> compose_3form(const DenseTensor<S>& h, const DenseTensor<S>& X, const G2Point<S>& pt) {
  DenseTensor<S> out = diamond(h, pt.phi, pt.metric);
  out += interior(X, pt.psi);
  out.symmetry = Symmetry::antisym;
  return out;
}

/// Inverse of compose_3form, in closed form:
/// X_i = (1/24) gamma^jkl psi_ijkl and sym(gamma_i^mn phi_jmn) = 4 h_ij + 2 (tr h) g_ij.
template <class S>
ThreeFormParts<S> decompose_3form(const DenseTensor<S>& gamma, const G2Point<S>& pt) {
  const auto ginv = pt.metric_inverse();
  const auto gup = raise_all(gamma, ginv);
  DenseTensor<S> Xlow(7, 1);
  for (int i = 0; i < 7; ++i) {
    S acc(0);
    for (std::size_t o = 0; o < 343; ++o) acc += gup.entries[o] * pt.psi.entries[i * 343 + o];
    Xlow(i) = acc / S(24);
  }
  const auto gmn = raise_slot(raise_slot(gamma, 1, ginv), 2, ginv);
  DenseTensor<S> P(7, 2);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      S acc(0);
      for (int o = 0; o < 49; ++o) acc += gmn.entries[i * 49 + o] * pt.phi.entries[j * 49 + o];
      P(i, j) = acc;
    }
  const auto Ssym = sym_part(P);
  S trS(0);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) trS += ginv(i, j) * Ssym(i, j);
  const S trh = trS / S(18);
  ThreeFormParts<S> out;
  out.h = DenseTensor<S>(7, 2, Symmetry::sym2);
  for (std::size_t o = 0; o < 49; ++o)
    out.h.entries[o] = (Ssym.entries[o] - S(2) * trh * pt.metric.entries[o]) / S(4);
  out.f = full_contraction(gamma, raise_all(pt.phi, ginv)) / S(42);
  out.h0 = out.h;
  for (std::size_t o = 0; o < 49; ++o) out.h0.entries[o] -= (trh / S(7)) * pt.metric.entries[o];
  out.X = mat_vec(ginv, Xlow);
  return out;
}

/// Checks that every slice nabla_phi[i] is an antisymmetric 3-form.
template <class S>
void require_antisymmetric_slices(const DenseTensor<S>& nabla_phi, double tol) {
  if (nabla_phi.rank != 4 || nabla_phi.dim != 7) throw ValidationError("nabla phi must be a rank-4 tensor on R^7");
  for (int i = 0; i < 7; ++i) {
    DenseTensor<S> slice(7, 3, Symmetry::antisym);
    std::copy(nabla_phi.entries.begin() + i * 343, nabla_phi.entries.begin() + (i + 1) * 343, slice.entries.begin());
    if (!slice.satisfies_symmetry(tol)) throw ValidationError("nabla phi slice is not antisymmetric");
  }
}

/// T_iq = (1/24) nabla_i phi_jkl psi_q^jkl.
template <class S>
DenseTensor<S> torsion_from_nabla_phi(const DenseTensor<S>& nabla_phi, const G2Point<S>& pt, double tol = 1e-12) {
  require_antisymmetric_slices(nabla_phi, ScalarTraits<S>::exact ? 0.0 : tol);
  const auto psiu = raise_slot(raise_slot(raise_slot(pt.psi, 1, pt.metric_inverse()), 2, pt.metric_inverse()), 3,
                               pt.metric_inverse());
  DenseTensor<S> T(7, 2);
  for (int i = 0; i < 7; ++i)
    for (int q = 0; q < 7; ++q) {
      S acc(0);
      for (std::size_t o = 0; o < 343; ++o) acc += nabla_phi.entries[i * 343 + o] * psiu.entries[q * 343 + o];
      T(i, q) = acc / S(24);
    }
  return T;
}

/// nabla_i phi_jkl = T_i^p psi_pjkl.
template <class S>
DenseTensor<S> nabla_phi_from_torsion(const DenseTensor<S>& T, const G2Point<S>& pt) {
  const auto Tu = raise_slot(T, 1, pt.metric_inverse());
  DenseTensor<S> out(7, 4);
  for (int i = 0; i < 7; ++i)
    for (int p = 0; p < 7; ++p) {
      const S& t = Tu(i, p);
      if (ScalarTraits<S>::is_zero(t)) continue;
      for (std::size_t o = 0; o < 343; ++o) out.entries[i * 343 + o] += t * pt.psi.entries[p * 343 + o];
    }
  return out;
}

/// Ricci tensor from torsion and its covariant derivative (orthonormal frame only).
/// nabla_T(p, i, q) = nabla_p T_iq.
template <class S>
DenseTensor<S> ricci_from_torsion(const DenseTensor<S>& T, const DenseTensor<S>& nabla_T, const G2Point<S>& pt) {
  if (!pt.orthonormal()) throw ValidationError("ricci_from_torsion expects an orthonormal frame");
  if (T.rank != 2 || nabla_T.rank != 3) throw ValidationError("T must be rank 2 and nabla T rank 3");
  const auto& phi = pt.phi;
  const auto& psi = pt.psi;
  const S trT = trace(T);
  DenseTensor<S> R(7, 2, Symmetry::sym2);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      S a(0), b(0), c(0), e(0);
      for (int p = 0; p < 7; ++p)
        for (int q = 0; q < 7; ++q) {
          a += nabla_T(p, i, q) * phi(p, j, q) + nabla_T(p, j, q) * phi(p, i, q);
          b += nabla_T(i, p, q) * phi(j, p, q) + nabla_T(j, p, q) * phi(i, p, q);
          for (int m = 0; m < 7; ++m) c += T(i, m) * T(p, q) * psi(p, q, m, j) + T(j, m) * T(p, q) * psi(p, q, m, i);
        }
      for (int m = 0; m < 7; ++m) e += T(i, m) * T(m, j) + T(j, m) * T(m, i);
      R(i, j) = -(a + b + c + e) / S(2) + trT * (T(i, j) + T(j, i)) / S(2);
    }
  return R;
}

}  // namespace geoflow
