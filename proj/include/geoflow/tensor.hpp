#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace geoflow {

enum class Symmetry { none, sym2, antisym };

inline std::string to_string(Symmetry s) {
  switch (s) {
    case Symmetry::sym2: return "sym2";
    case Symmetry::antisym: return "antisym";
    default: return "none";
  }
}

inline Symmetry symmetry_from_string(const std::string& s) {
  if (s == "none") return Symmetry::none;
  if (s == "sym2") return Symmetry::sym2;
  if (s == "antisym") return Symmetry::antisym;
  throw ValidationError("unknown symmetry tag '" + s + "'");
}

using Index = std::vector<int>;

/// Sign of the permutation that sorts idx, or 0 when idx has a repeated entry.
inline int permutation_sign(Index idx) {
  int sign = 1;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) sign = -sign;
    }
  return sign;
}

/// All strictly increasing k-tuples from {0..n-1}, lexicographic.
inline std::vector<Index> combinations(int n, int k) {
  std::vector<Index> out;
  if (k < 0 || k > n) return out;
  Index c(k);
  std::iota(c.begin(), c.end(), 0);
  for (;;) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

/// Sorted complement of a sorted index set in {0..n-1}.
inline Index complement(const Index& sorted, int n) {
  Index out;
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(sorted.begin(), sorted.end(), i)) out.push_back(i);
  return out;
}

/// Rank-k array over R^n stored row-major, length dim^rank.
template <class S>
struct DenseTensor {
  int dim = 0;
  int rank = 0;
  Symmetry symmetry = Symmetry::none;
  std::vector<S> entries;

  DenseTensor() = default;
  DenseTensor(int n, int k, Symmetry sym = Symmetry::none)
      : dim(n), rank(k), symmetry(sym), entries(ipow(n, k), S(0)) {
    if (n <= 0) throw ValidationError("tensor dimension must be positive");
    if (k < 0) throw ValidationError("tensor rank must be nonnegative");
    if (sym == Symmetry::sym2 && k != 2) throw ValidationError("sym2 requires rank 2");
  }

  static std::size_t ipow(int n, int k) {
    std::size_t r = 1;
    for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
    return r;
  }

  std::size_t size() const { return entries.size(); }

  std::size_t offset(const Index& idx) const {
    std::size_t o = 0;
    for (int i : idx) o = o * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
    return o;
  }
  Index unflatten(std::size_t o) const {
    Index idx(rank);
    for (int s = rank - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(o % static_cast<std::size_t>(dim));
      o /= static_cast<std::size_t>(dim);
    }
    return idx;
  }

  S& operator[](const Index& idx) { return entries[offset(idx)]; }
  const S& operator[](const Index& idx) const { return entries[offset(idx)]; }
  S& operator()(int i) { return entries[i]; }
  const S& operator()(int i) const { return entries[i]; }
  S& operator()(int i, int j) { return entries[i * dim + j]; }
  const S& operator()(int i, int j) const { return entries[i * dim + j]; }
  S& operator()(int i, int j, int k) { return entries[(i * dim + j) * dim + k]; }
  const S& operator()(int i, int j, int k) const { return entries[(i * dim + j) * dim + k]; }
  S& operator()(int i, int j, int k, int l) { return entries[((i * dim + j) * dim + k) * dim + l]; }
  const S& operator()(int i, int j, int k, int l) const {
    return entries[((i * dim + j) * dim + k) * dim + l];
  }

  /// Sets the component at idx and every permutation of it with the permutation sign.
  void set_antisym(Index idx, const S& value) {
    Index sorted = idx;
    const int s0 = permutation_sign(idx);
    if (s0 == 0) {
      if (value != S(0)) throw ValidationError("antisymmetric component with repeated index");
      return;
    }
    std::sort(sorted.begin(), sorted.end());
    const S base = s0 > 0 ? value : S(-value);
    Index p = sorted;
    do {
      const int sp = permutation_sign(p);
      entries[offset(p)] = sp > 0 ? base : S(-base);
    } while (std::next_permutation(p.begin(), p.end()));
  }

  void set_sym(int i, int j, const S& value) {
    (*this)(i, j) = value;
    (*this)(j, i) = value;
  }

  DenseTensor& operator+=(const DenseTensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] += o.entries[i];
    if (symmetry != o.symmetry) symmetry = Symmetry::none;
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] -= o.entries[i];
    if (symmetry != o.symmetry) symmetry = Symmetry::none;
    return *this;
  }
  DenseTensor& operator*=(const S& c) {
    for (auto& e : entries) e *= c;
    return *this;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(const S& c, DenseTensor a) { return a *= c; }
  friend DenseTensor operator-(DenseTensor a) {
    for (auto& e : a.entries) e = -e;
    return a;
  }
  bool operator==(const DenseTensor& o) const {
    return dim == o.dim && rank == o.rank && entries == o.entries;
  }

  void check_same_shape(const DenseTensor& o) const {
    if (dim != o.dim || rank != o.rank) throw ValidationError("tensor shape mismatch");
  }

  /// Largest |a - b| over all entries.
  double max_abs_diff(const DenseTensor& o) const {
    check_same_shape(o);
    double m = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i)
      m = std::max(m, to_double(ScalarTraits<S>::abs(S(entries[i] - o.entries[i]))));
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, to_double(ScalarTraits<S>::abs(e)));
    return m;
  }

  /// Checks the symmetry tag against the entries, exhaustively over transpositions.
  bool satisfies_symmetry(double tol = 0.0) const {
    if (symmetry == Symmetry::none) return true;
    if (symmetry == Symmetry::sym2) {
      if (rank != 2) return false;
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
          if (to_double(ScalarTraits<S>::abs(S((*this)(i, j) - (*this)(j, i)))) > tol) return false;
      return true;
    }
    for (std::size_t o = 0; o < entries.size(); ++o) {
      Index idx = unflatten(o);
      for (int a = 0; a < rank; ++a)
        for (int b = a + 1; b < rank; ++b) {
          Index t = idx;
          std::swap(t[a], t[b]);
          if (to_double(ScalarTraits<S>::abs(S(entries[o] + entries[offset(t)]))) > tol) return false;
        }
    }
    return true;
  }

  void validate(double tol = 0.0) const {
    if (entries.size() != ipow(dim, rank)) throw ValidationError("entries length must be dim^rank");
    if (!satisfies_symmetry(tol)) throw ValidationError("entries violate the " + to_string(symmetry) + " tag");
  }

  template <class T>
  DenseTensor<T> cast() const {
    DenseTensor<T> out(dim, rank, symmetry);
    for (std::size_t i = 0; i < entries.size(); ++i) out.entries[i] = static_cast<T>(entries[i]);
    return out;
  }
};

template <>
template <>
inline DenseTensor<double> DenseTensor<Exact>::cast<double>() const {
  DenseTensor<double> out(dim, rank, symmetry);
  for (std::size_t i = 0; i < entries.size(); ++i) out.entries[i] = entries[i].convert_to<double>();
  return out;
}

template <class S>
DenseTensor<S> identity_metric(int n) {
  DenseTensor<S> g(n, 2, Symmetry::sym2);
  for (int i = 0; i < n; ++i) g(i, i) = S(1);
  return g;
}

template <class S>
DenseTensor<S> basis_vector(int n, int i) {
  DenseTensor<S> v(n, 1);
  v(i) = S(1);
  return v;
}

/// Tensor product a (x) b.
template <class S>
DenseTensor<S> outer(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  if (a.dim != b.dim) throw ValidationError("tensor dimension mismatch");
  DenseTensor<S> out(a.dim, a.rank + b.rank);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out.entries[i * b.size() + j] = a.entries[i] * b.entries[j];
  return out;
}

/// Rank-2 transpose.
template <class S>
DenseTensor<S> transpose(const DenseTensor<S>& a) {
  DenseTensor<S> t(a.dim, 2, a.symmetry);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) t(i, j) = a(j, i);
  return t;
}

template <class S>
DenseTensor<S> sym_part(const DenseTensor<S>& a) {
  DenseTensor<S> t(a.dim, 2, Symmetry::sym2);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) t(i, j) = (a(i, j) + a(j, i)) / S(2);
  return t;
}

template <class S>
DenseTensor<S> skew_part(const DenseTensor<S>& a) {
  DenseTensor<S> t(a.dim, 2, Symmetry::antisym);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) t(i, j) = (a(i, j) - a(j, i)) / S(2);
  return t;
}

template <class S>
S trace(const DenseTensor<S>& a) {
  S t(0);
  for (int i = 0; i < a.dim; ++i) t += a(i, i);
  return t;
}

/// Euclidean sum of products of matching entries (no metric, no factorial).
template <class S>
S full_contraction(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  a.check_same_shape(b);
  S s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a.entries[i] * b.entries[i];
  return s;
}

/// Matrix-vector action A(v)_i = A_ij v_j.
template <class S>
DenseTensor<S> mat_vec(const DenseTensor<S>& A, const DenseTensor<S>& v) {
  DenseTensor<S> out(A.dim, 1);
  for (int i = 0; i < A.dim; ++i)
    for (int j = 0; j < A.dim; ++j) out(i) += A(i, j) * v(j);
  return out;
}

template <class S>
DenseTensor<S> matmul(const DenseTensor<S>& A, const DenseTensor<S>& B) {
  DenseTensor<S> out(A.dim, 2);
  for (int i = 0; i < A.dim; ++i)
    for (int k = 0; k < A.dim; ++k)
      for (int j = 0; j < A.dim; ++j) out(i, j) += A(i, k) * B(k, j);
  return out;
}

}  // namespace geoflow
