#pragma once

#include "linalg.hpp"
#include "tensor.hpp"

namespace geoflow {

inline long long factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

template <class S>
DenseTensor<S> inverse_metric(const DenseTensor<S>& g) {
  return to_tensor(inverse(to_matrix(g)), Symmetry::sym2);
}

template <class S>
void require_positive_definite(const DenseTensor<S>& g) {
  if (g.rank != 2 || !is_positive_definite(to_matrix(g)))
    throw ValidationError("metric is not positive definite");
}

/// Raises one slot of t with the inverse metric: out_{..i..} = ginv_{ij} t_{..j..}.
template <class S>
DenseTensor<S> raise_slot(const DenseTensor<S>& t, int slot, const DenseTensor<S>& ginv) {
  DenseTensor<S> out(t.dim, t.rank);
  const int n = t.dim;
  std::size_t stride = 1;
  for (int s = t.rank - 1; s > slot; --s) stride *= static_cast<std::size_t>(n);
  for (std::size_t o = 0; o < t.size(); ++o) {
    const int i = static_cast<int>((o / stride) % n);
    const std::size_t base = o - static_cast<std::size_t>(i) * stride;
    S acc(0);
    for (int j = 0; j < n; ++j) {
      const S& gij = ginv(i, j);
      if (ScalarTraits<S>::is_zero(gij)) continue;
      acc += gij * t.entries[base + static_cast<std::size_t>(j) * stride];
    }
    out.entries[o] = acc;
  }
  out.symmetry = t.symmetry;
  return out;
}

template <class S>
DenseTensor<S> raise_all(DenseTensor<S> t, const DenseTensor<S>& ginv) {
  for (int s = 0; s < t.rank; ++s) t = raise_slot(t, s, ginv);
  return t;
}

/// alpha ^ beta with the (p+q)!/(p!q!) normalization on full antisymmetric arrays.
template <class S>
DenseTensor<S> wedge(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  if (a.dim != b.dim) throw ValidationError("wedge: dimension mismatch");
  const int p = a.rank, q = b.rank, n = a.dim;
  DenseTensor<S> out(n, p + q, Symmetry::antisym);
  if (p + q > n) return out;
  const auto shuffles = combinations(p + q, p);
  for (const Index& I : combinations(n, p + q)) {
    S acc(0);
    for (const Index& A : shuffles) {
      const Index B = complement(A, p + q);
      Index order = A;
      order.insert(order.end(), B.begin(), B.end());
      Index ia, ib;
      for (int s : A) ia.push_back(I[s]);
      for (int s : B) ib.push_back(I[s]);
      const S term = a[ia] * b[ib];
      if (permutation_sign(order) > 0) acc += term;
      else acc -= term;
    }
    out.set_antisym(I, acc);
  }
  return out;
}

/// X _| alpha: contraction of the vector X into the first slot.
template <class S>
DenseTensor<S> interior(const DenseTensor<S>& X, const DenseTensor<S>& a) {
  if (X.rank != 1 || a.rank < 1 || X.dim != a.dim) throw ValidationError("interior: shape mismatch");
  DenseTensor<S> out(a.dim, a.rank - 1, a.symmetry == Symmetry::antisym ? Symmetry::antisym : Symmetry::none);
  const std::size_t stride = out.size();
  for (int i = 0; i < a.dim; ++i) {
    if (ScalarTraits<S>::is_zero(X(i))) continue;
    for (std::size_t o = 0; o < stride; ++o) out.entries[o] += X(i) * a.entries[i * stride + o];
  }
  return out;
}

/// <alpha, beta> = (1/k!) alpha_I beta^I.
template <class S>
S inner(const DenseTensor<S>& a, const DenseTensor<S>& b, const DenseTensor<S>& g) {
  const DenseTensor<S> braised = raise_all(b, inverse_metric(g));
  return full_contraction(a, braised) / S(factorial(a.rank));
}

template <class S>
S inner(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  return full_contraction(a, b) / S(factorial(a.rank));
}

template <class S>
S sqrt_det(const DenseTensor<S>& g) {
  return ScalarTraits<S>::sqrt(determinant(to_matrix(g)));
}

/// orientation * sqrt(det g) e_1 ^ ... ^ e_n.
template <class S>
DenseTensor<S> volume_form(const DenseTensor<S>& g, int orientation = 1) {
  const int n = g.dim;
  DenseTensor<S> vol(n, n, Symmetry::antisym);
  Index I(n);
  for (int i = 0; i < n; ++i) I[i] = i;
  const S v = sqrt_det(g);
  vol.set_antisym(I, orientation > 0 ? v : S(-v));
  return vol;
}

/// Hodge star defined by alpha ^ *beta = <alpha, beta> vol.
template <class S>
DenseTensor<S> hodge_star(const DenseTensor<S>& a, const DenseTensor<S>& g, int orientation = 1) {
  require_positive_definite(g);
  const int n = a.dim, k = a.rank;
  const DenseTensor<S> up = raise_all(a, inverse_metric(g));
  const S vol = sqrt_det(g);
  DenseTensor<S> out(n, n - k, Symmetry::antisym);
  for (const Index& J : combinations(n, n - k)) {
    const Index K = complement(J, n);
    Index order = K;
    order.insert(order.end(), J.begin(), J.end());
    S v = vol * up[K];
    if (permutation_sign(order) * orientation < 0) v = -v;
    out.set_antisym(J, v);
  }
  return out;
}

}  // namespace geoflow
