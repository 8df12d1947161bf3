#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "scalar.hpp"
#include "tensor.hpp"

namespace geoflow {

/// Small dense row-major matrix over an arbitrary field.
template <class S>
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<S> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, S(0)) {}

  S& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const S& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  Matrix transpose() const {
    Matrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw ValidationError("matrix product shape mismatch");
    Matrix out(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        const S& xik = x(i, k);
        if (ScalarTraits<S>::is_zero(xik)) continue;
        for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
      }
    return out;
  }
  friend Matrix operator+(Matrix x, const Matrix& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
    return x;
  }
  friend Matrix operator-(Matrix x, const Matrix& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
    return x;
  }
  friend Matrix operator*(const S& c, Matrix x) {
    for (auto& v : x.a) v *= c;
    return x;
  }
  bool operator==(const Matrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }

  std::vector<S> operator*(const std::vector<S>& v) const {
    std::vector<S> out(rows, S(0));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, to_double(ScalarTraits<S>::abs(v)));
    return m;
  }
};

namespace detail {

template <class S>
bool negligible(const S& v, double tol) {
  if constexpr (ScalarTraits<S>::exact) {
    (void)tol;
    return ScalarTraits<S>::is_zero(v);
  } else {
    return std::fabs(v) <= tol;
  }
}

/// In-place row echelon form with partial pivoting; returns the rank and optionally the determinant.
template <class S>
int row_echelon(Matrix<S>& m, double tol, S* det = nullptr) {
  int r = 0;
  S d(1);
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int piv = -1;
    double best = -1.0;
    for (int i = r; i < m.rows; ++i) {
      if (negligible(m(i, c), tol)) continue;
      const double mag = to_double(ScalarTraits<S>::abs(m(i, c)));
      if constexpr (ScalarTraits<S>::exact) {
        piv = i;
        break;
      }
      if (mag > best) {
        best = mag;
        piv = i;
      }
    }
    if (piv < 0) {
      d = S(0);
      continue;
    }
    if (piv != r) {
      for (int j = 0; j < m.cols; ++j) std::swap(m(r, j), m(piv, j));
      d = -d;
    }
    const S p = m(r, c);
    d *= p;
    for (int i = r + 1; i < m.rows; ++i) {
      if (ScalarTraits<S>::is_zero(m(i, c))) continue;
      const S f = m(i, c) / p;
      for (int j = c; j < m.cols; ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  if (det) *det = (r == m.rows && m.rows == m.cols) ? d : S(0);
  return r;
}

}  // namespace detail

template <class S>
S determinant(Matrix<S> m) {
  if (m.rows != m.cols) throw ValidationError("determinant of a non-square matrix");
  S d(0);
  detail::row_echelon(m, 0.0, &d);
  return d;
}

/// Rank; exact for rational scalars, relative tolerance for doubles.
template <class S>
int matrix_rank(Matrix<S> m, double tol = -1.0) {
  if (tol < 0.0) tol = 1e-10 * std::max(1.0, m.max_abs());
  return detail::row_echelon(m, tol);
}

/// Solves m x = rhs column by column with Gauss-Jordan elimination.
template <class S>
Matrix<S> solve(Matrix<S> m, Matrix<S> rhs) {
  if (m.rows != m.cols || rhs.rows != m.rows) throw ValidationError("solve shape mismatch");
  const int n = m.rows;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    double best = 0.0;
    for (int i = c; i < n; ++i) {
      if (ScalarTraits<S>::is_zero(m(i, c))) continue;
      const double mag = to_double(ScalarTraits<S>::abs(m(i, c)));
      if (piv < 0 || mag > best) {
        piv = i;
        best = mag;
      }
      if constexpr (ScalarTraits<S>::exact) break;
    }
    if (piv < 0) throw std::domain_error("singular matrix");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      for (int j = 0; j < rhs.cols; ++j) std::swap(rhs(c, j), rhs(piv, j));
    }
    const S p = m(c, c);
    for (int i = 0; i < n; ++i) {
      if (i == c || ScalarTraits<S>::is_zero(m(i, c))) continue;
      const S f = m(i, c) / p;
      for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
      for (int j = 0; j < rhs.cols; ++j) rhs(i, j) -= f * rhs(c, j);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rhs.cols; ++j) rhs(i, j) /= m(i, i);
  return rhs;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& m) {
  return solve(m, Matrix<S>::identity(m.rows));
}

/// Sylvester criterion on leading minors; exact for rationals.
template <class S>
bool is_positive_definite(const Matrix<S>& m) {
  if (m.rows != m.cols) return false;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < i; ++j)
      if (!detail::negligible(S(m(i, j) - m(j, i)), 1e-12 * std::max(1.0, m.max_abs()))) return false;
  if constexpr (ScalarTraits<S>::exact) {
    for (int k = 1; k <= m.rows; ++k) {
      Matrix<S> sub(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = m(i, j);
      if (determinant(sub) <= 0) return false;
    }
    return true;
  } else {
    Eigen::MatrixXd e(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
    Eigen::LLT<Eigen::MatrixXd> llt(e);
    return llt.info() == Eigen::Success;
  }
}

template <class S>
Matrix<S> to_matrix(const DenseTensor<S>& t) {
  if (t.rank != 2) throw ValidationError("rank-2 tensor expected");
  Matrix<S> m(t.dim, t.dim);
  for (int i = 0; i < t.dim; ++i)
    for (int j = 0; j < t.dim; ++j) m(i, j) = t(i, j);
  return m;
}

template <class S>
DenseTensor<S> to_tensor(const Matrix<S>& m, Symmetry sym = Symmetry::none) {
  DenseTensor<S> t(m.rows, 2, sym);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) t(i, j) = m(i, j);
  return t;
}

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

template <class S>
Matrix<double> to_double_matrix(const Matrix<S>& m) {
  Matrix<double> out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) out.a[i] = to_double(m.a[i]);
  return out;
}

/// Ascending eigenvalues of the symmetric part of m.
inline Eigen::VectorXd symmetric_eigenvalues(const Matrix<double>& m) {
  Eigen::MatrixXd e = to_eigen(m);
  Eigen::MatrixXd s = 0.5 * (e + e.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace geoflow
