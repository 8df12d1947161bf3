#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "g2.hpp"
#include "linalg.hpp"
#include "tensor.hpp"

namespace geoflow {

/// Basis of Sym^2(R^n): E_ii then E_ij + E_ji (i < j), lexicographic; normalized divides off-diagonals by sqrt 2.
/// The normalized frame is orthonormal for <P, Q> = sum P_ij Q_ij and needs floating-point scalars.
template <class S>
struct Sym2Frame {
  int n = 0;
  bool normalized = false;
  std::vector<std::pair<int, int>> slots;

  Sym2Frame(int dim, bool orthonormal) : n(dim), normalized(orthonormal) {
    if constexpr (ScalarTraits<S>::exact)
      if (orthonormal) throw ValidationError("the orthonormal Sym2 frame requires floating-point scalars");
    for (int i = 0; i < n; ++i) slots.emplace_back(i, i);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  }

  int size() const { return static_cast<int>(slots.size()); }

  S off_diagonal_scale() const {
    if constexpr (ScalarTraits<S>::exact) return S(1);
    else return normalized ? 1.0 / std::sqrt(2.0) : 1.0;
  }

  DenseTensor<S> element(int a) const {
    DenseTensor<S> E(n, 2, Symmetry::sym2);
    const auto [i, j] = slots[a];
    if (i == j) E(i, i) = S(1);
    else E.set_sym(i, j, off_diagonal_scale());
    return E;
  }

  std::vector<S> coords(const DenseTensor<S>& h) const {
    std::vector<S> c(size());
    for (int a = 0; a < size(); ++a) {
      const auto [i, j] = slots[a];
      // h = sum c_a E_a: diagonal entries read off directly, off-diagonals divided by the basis scale.
      c[a] = (i == j) ? h(i, i) : S(h(i, j) / off_diagonal_scale());
    }
    return c;
  }

  DenseTensor<S> from_coords(const std::vector<S>& c) const {
    DenseTensor<S> h(n, 2, Symmetry::sym2);
    for (int a = 0; a < size(); ++a) {
      const auto [i, j] = slots[a];
      if (i == j) h(i, i) = c[a];
      else h.set_sym(i, j, S(c[a] * off_diagonal_scale()));
    }
    return h;
  }

  Matrix<S> gram() const {
    Matrix<S> G(size(), size());
    for (int a = 0; a < size(); ++a)
      for (int b = 0; b < size(); ++b) G(a, b) = full_contraction(element(a), element(b));
    return G;
  }
};

/// Principal symbol at xi as a matrix in a Sym2Frame.
template <class S>
struct SymbolOperator {
  int n = 0;
  std::string name;
  DenseTensor<S> xi;
  bool orthonormal_frame = false;
  Matrix<S> matrix;

  DenseTensor<S> apply(const DenseTensor<S>& h) const {
    Sym2Frame<S> frame(n, orthonormal_frame);
    return frame.from_coords(matrix * frame.coords(h));
  }
};

namespace detail {

template <class S>
void require_nonzero(const DenseTensor<S>& xi) {
  if (xi.rank != 1) throw ValidationError("xi must be a covector");
  for (const auto& v : xi.entries)
    if (!ScalarTraits<S>::is_zero(v)) return;
  throw ValidationError("xi must be nonzero");
}

template <class S>
S norm_sq(const DenseTensor<S>& v) {
  return full_contraction(v, v);
}

template <class S>
DenseTensor<S> sym_outer(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  DenseTensor<S> out(a.dim, 2, Symmetry::sym2);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) out(i, j) = a(i) * b(j) + b(i) * a(j);
  return out;
}

template <class S>
S quad(const DenseTensor<S>& h, const DenseTensor<S>& xi) {
  S s(0);
  for (int i = 0; i < h.dim; ++i)
    for (int j = 0; j < h.dim; ++j) s += h(i, j) * xi(i) * xi(j);
  return s;
}

}  // namespace detail

template <class S>
DenseTensor<S> covector(std::initializer_list<S> v) {
  DenseTensor<S> x(static_cast<int>(v.size()), 1);
  int i = 0;
  for (const auto& e : v) x(i++) = e;
  return x;
}

/// A X = (xi (x) X + X (x) xi) / 2.
template <class S>
DenseTensor<S> symbol_A(const DenseTensor<S>& xi, const DenseTensor<S>& X) {
  detail::require_nonzero(xi);
  DenseTensor<S> out = detail::sym_outer(xi, X);
  out *= S(1) / S(2);
  return out;
}

/// B h = -xi (x) h(xi) - h(xi) (x) xi + |xi|^2 h + (tr h) xi (x) xi.
template <class S>
DenseTensor<S> apply_B(const DenseTensor<S>& xi, const DenseTensor<S>& h) {
  detail::require_nonzero(xi);
  const auto hx = mat_vec(h, xi);
  const S x2 = detail::norm_sq(xi), tr = trace(h);
  DenseTensor<S> out(h.dim, 2, Symmetry::sym2);
  for (int i = 0; i < h.dim; ++i)
    for (int j = 0; j < h.dim; ++j)
      out(i, j) = -xi(i) * hx(j) - hx(i) * xi(j) + x2 * h(i, j) + tr * xi(i) * xi(j);
  return out;
}

/// Q h = xi (x) h(xi) + h(xi) (x) xi - (tr h) xi (x) xi.
template <class S>
DenseTensor<S> apply_Q(const DenseTensor<S>& xi, const DenseTensor<S>& h) {
  detail::require_nonzero(xi);
  const auto hx = mat_vec(h, xi);
  const S tr = trace(h);
  DenseTensor<S> out(h.dim, 2, Symmetry::sym2);
  for (int i = 0; i < h.dim; ++i)
    for (int j = 0; j < h.dim; ++j) out(i, j) = xi(i) * hx(j) + hx(i) * xi(j) - tr * xi(i) * xi(j);
  return out;
}

/// Symbol of -Delta(tr h) g + Div(Div h) g: (-|xi|^2 tr h + h(xi, xi)) g.
template <class S>
DenseTensor<S> apply_scalar(const DenseTensor<S>& xi, const DenseTensor<S>& h) {
  detail::require_nonzero(xi);
  const S c = -detail::norm_sq(xi) * trace(h) + detail::quad(h, xi);
  DenseTensor<S> out = identity_metric<S>(h.dim);
  out *= c;
  return out;
}

/// Ricci-Bourguignon symbol without the DeTurck term: B h + b * scalar(h).
template <class S>
DenseTensor<S> apply_rb_plain(const DenseTensor<S>& xi, const DenseTensor<S>& h, const S& b) {
  DenseTensor<S> out = apply_B(xi, h);
  DenseTensor<S> s = apply_scalar(xi, h);
  s *= b;
  out += s;
  out.symmetry = Symmetry::sym2;
  return out;
}

/// DeTurck-modified Ricci-Bourguignon symbol: |xi|^2 h + b * scalar(h).
template <class S>
DenseTensor<S> apply_rb(const DenseTensor<S>& xi, const DenseTensor<S>& h, const S& b) {
  DenseTensor<S> out = h;
  out *= detail::norm_sq(xi);
  DenseTensor<S> s = apply_scalar(xi, h);
  s *= b;
  out += s;
  out.symmetry = Symmetry::sym2;
  return out;
}

/// h - (xi (x) X + X (x) xi), X = h(xi)/|xi|^2 - h(xi, xi) xi / (2|xi|^4).
template <class S>
DenseTensor<S> breve_projection(const DenseTensor<S>& h, const DenseTensor<S>& xi) {
  detail::require_nonzero(xi);
  const S x2 = detail::norm_sq(xi);
  const auto hx = mat_vec(h, xi);
  const S q = detail::quad(h, xi);
  DenseTensor<S> X(h.dim, 1);
  for (int i = 0; i < h.dim; ++i) X(i) = hx(i) / x2 - q * xi(i) / (S(2) * x2 * x2);
  DenseTensor<S> out = h - detail::sym_outer(xi, X);
  out.symmetry = Symmetry::sym2;
  return out;
}

/// Builds the matrix of a linear map on Sym^2 in the given frame.
template <class S, class F>
SymbolOperator<S> make_symbol(const std::string& name, const DenseTensor<S>& xi, bool orthonormal, F&& map) {
  detail::require_nonzero(xi);
  const int n = xi.dim;
  Sym2Frame<S> frame(n, orthonormal);
  SymbolOperator<S> op;
  op.n = n;
  op.name = name;
  op.xi = xi;
  op.orthonormal_frame = orthonormal;
  op.matrix = Matrix<S>(frame.size(), frame.size());
  for (int b = 0; b < frame.size(); ++b) {
    const auto col = frame.coords(map(frame.element(b)));
    for (int a = 0; a < frame.size(); ++a) op.matrix(a, b) = col[a];
  }
  return op;
}

template <class S>
constexpr bool default_orthonormal() {
  return !ScalarTraits<S>::exact;
}

template <class S>
SymbolOperator<S> symbol_B_ricci(const DenseTensor<S>& xi, bool orthonormal = default_orthonormal<S>()) {
  return make_symbol<S>("B", xi, orthonormal, [&](const DenseTensor<S>& h) { return apply_B(xi, h); });
}

template <class S>
SymbolOperator<S> symbol_Q_deturck(const DenseTensor<S>& xi, bool orthonormal = default_orthonormal<S>()) {
  return make_symbol<S>("Q", xi, orthonormal, [&](const DenseTensor<S>& h) { return apply_Q(xi, h); });
}

template <class S>
SymbolOperator<S> symbol_scalar_g(const DenseTensor<S>& xi, bool orthonormal = default_orthonormal<S>()) {
  return make_symbol<S>("scalar", xi, orthonormal, [&](const DenseTensor<S>& h) { return apply_scalar(xi, h); });
}

template <class S>
SymbolOperator<S> rb_symbol(const DenseTensor<S>& xi, const S& b, bool orthonormal = default_orthonormal<S>()) {
  return make_symbol<S>("rb", xi, orthonormal, [&](const DenseTensor<S>& h) { return apply_rb(xi, h, b); });
}

template <class S>
SymbolOperator<S> rb_plain_symbol(const DenseTensor<S>& xi, const S& b, bool orthonormal = default_orthonormal<S>()) {
  return make_symbol<S>("rb_plain", xi, orthonormal, [&](const DenseTensor<S>& h) { return apply_rb_plain(xi, h, b); });
}

/// Columns: coordinates of A(e_i), i = 1..n, in the frame.
template <class S>
Matrix<S> symbol_A_matrix(const DenseTensor<S>& xi, bool orthonormal = default_orthonormal<S>()) {
  const int n = xi.dim;
  Sym2Frame<S> frame(n, orthonormal);
  Matrix<S> M(frame.size(), n);
  for (int i = 0; i < n; ++i) {
    const auto c = frame.coords(symbol_A(xi, basis_vector<S>(n, i)));
    for (int a = 0; a < frame.size(); ++a) M(a, i) = c[a];
  }
  return M;
}

/// dim ker M = size - rank.
template <class S>
int kernel_dim(const Matrix<S>& M) {
  return M.cols - matrix_rank(M);
}

/// True when ker(op) equals the column span of im (exact for rational scalars).
template <class S>
bool kernel_equals_span(const Matrix<S>& op, const Matrix<S>& im) {
  const int r_im = matrix_rank(im);
  const Matrix<S> prod = op * im;
  if (matrix_rank(prod) != 0) return false;  // im inside ker
  return kernel_dim(op) == r_im;
}

struct ParabolicityReport {
  double min_sym_eig = 0.0;
  bool positive = false;
};

constexpr double kPositivityTolerance = 1e-9;

/// Minimum eigenvalue of (M + M^T)/2, optionally restricted to the span of the columns of `subspace`.
inline ParabolicityReport parabolicity_report(const Matrix<double>& M,
                                              const std::optional<Matrix<double>>& subspace = std::nullopt,
                                              double tol = kPositivityTolerance) {
  Eigen::MatrixXd e = to_eigen(M);
  Eigen::MatrixXd s = 0.5 * (e + e.transpose());
  if (subspace) {
    Eigen::MatrixXd V = to_eigen(*subspace);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    const Eigen::Index r = Eigen::FullPivLU<Eigen::MatrixXd>(V).rank();
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(V.rows(), r);
    s = Q.transpose() * s * Q;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  ParabolicityReport rep;
  rep.min_sym_eig = es.eigenvalues().minCoeff();
  rep.positive = rep.min_sym_eig > tol;
  return rep;
}

template <class S>
ParabolicityReport parabolicity_report(const SymbolOperator<S>& op,
                                       const std::optional<Matrix<double>>& subspace = std::nullopt) {
  if (!op.orthonormal_frame) throw ValidationError("parabolicity needs the orthonormal Sym2 frame");
  return parabolicity_report(to_double_matrix(op.matrix), subspace);
}

/// Orthonormal-frame basis of (im A)^perp at xi, as columns.
inline Matrix<double> im_A_complement(const DenseTensor<double>& xi) {
  const Matrix<double> A = symbol_A_matrix(xi, true);
  Eigen::MatrixXd e = to_eigen(A);
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(e);
  Eigen::MatrixXd Q = qr.matrixQ();
  const Eigen::Index r = qr.rank();
  Matrix<double> out(static_cast<int>(e.rows()), static_cast<int>(e.rows() - r));
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out(i, j) = Q(i, r + j);
  return out;
}

/// Interval -2(n-1)/n +- (2/n) sqrt(n^2 - n + 1) on which the RB symbol is certified positive.
inline std::pair<double, double> rb_parabolic_interval(int n) {
  if (n < 2) throw ValidationError("n must be at least 2");
  const double c = -2.0 * (n - 1) / n, r = 2.0 / n * std::sqrt(static_cast<double>(n) * n - n + 1);
  return {c - r, c + r};
}

/// Quadratic form in (mu, lambda) bounding <C h, h>/|xi|^4 from below, h = lambda g + h0, mu = h0(xi, xi)/|xi|^2:
/// mu^2 - b n lambda mu + (n - b n^2 + b n) lambda^2.
template <class S>
Matrix<S> rb_certificate_form(int n, const S& b) {
  Matrix<S> F(2, 2);
  F(0, 0) = S(1);
  F(0, 1) = F(1, 0) = -b * S(n) / S(2);
  F(1, 1) = S(n) - b * S(n) * S(n) + b * S(n);
  return F;
}

/// det of the certificate form times -4/n^2: b^2 + (4/n)(n-1) b - 4/n; negative iff certified.
template <class S>
S rb_certificate_polynomial(int n, const S& b) {
  return b * b + S(4 * (n - 1)) / S(n) * b - S(4) / S(n);
}

/// Exact positivity interval of the symmetrized DeTurck-RB symbol: -2 +- 2 sqrt(n/(n-1)).
inline std::pair<double, double> rb_symmetric_positivity_interval(int n) {
  if (n < 2) throw ValidationError("n must be at least 2");
  const double r = 2.0 * std::sqrt(static_cast<double>(n) / (n - 1));
  return {-2.0 - r, -2.0 + r};
}

struct RbScanRow {
  double b = 0.0;
  double min_sym_eig = 0.0;
  bool positive = false;
  double certificate_min_eig = 0.0;
  bool certified = false;
};

/// Scan of b in [b_min, b_max] with the given step; xi = e_1.
inline std::vector<RbScanRow> rb_scan(int n, double b_min, double b_max, double step) {
  if (n < 2) throw ValidationError("n must be at least 2");
  if (!(step > 0.0) || b_max < b_min) throw ValidationError("invalid scan range");
  const auto xi = basis_vector<double>(n, 0);
  const long count = static_cast<long>(std::floor((b_max - b_min) / step + 1e-9)) + 1;
  std::vector<RbScanRow> rows(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    RbScanRow r;
    r.b = b_min + static_cast<double>(k) * step;
    const auto rep = parabolicity_report(rb_symbol(xi, r.b));
    r.min_sym_eig = rep.min_sym_eig;
    r.positive = rep.positive;
    const auto cert = parabolicity_report(rb_certificate_form(n, r.b));
    r.certificate_min_eig = cert.min_sym_eig;
    r.certified = cert.positive;
    rows[static_cast<std::size_t>(k)] = r;
  }
  return rows;
}

/// Endpoints of the run of rows where `flag` holds, refined by bisection on `indicator`.
template <class Flag, class F>
std::pair<double, double> locate_interval(const std::vector<RbScanRow>& rows, Flag flag, F&& indicator) {
  long first = -1, last = -1;
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (flag(rows[k])) {
      if (first < 0) first = static_cast<long>(k);
      last = static_cast<long>(k);
    }
  if (first < 0) throw ValidationError("no positive rows in the scan");
  auto refine = [&](double in, double out) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (in + out);
      if (indicator(mid)) in = mid;
      else out = mid;
    }
    return 0.5 * (in + out);
  };
  double lo = rows[first].b, hi = rows[last].b;
  if (first > 0) lo = refine(rows[first].b, rows[first - 1].b);
  if (static_cast<std::size_t>(last + 1) < rows.size()) hi = refine(rows[last].b, rows[last + 1].b);
  return {lo, hi};
}

/// Coefficients of the G2 flow family (-Rc + lambda F + a L_T g) <> phi + (b1 Div T + b2 Div T^t) _| psi.
struct FlowCoefficients {
  double a = 0.0;
  double lambda = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

struct InequalityCheck {
  std::string name;
  double value = 0.0;
  bool pass = false;
};

struct DgkResult {
  bool admissible = false;
  std::vector<InequalityCheck> checks;
  std::vector<std::string> failed() const {
    std::vector<std::string> f;
    for (const auto& c : checks)
      if (!c.pass) f.push_back(c.name);
    return f;
  }
};

/// 0 <= b1 - a - 1 < 4, b1 + b2 >= 1, |lambda| < (1 - (b1 - a - 1)/4)/4.
inline DgkResult dgk_admissible(const FlowCoefficients& c) {
  const double s = c.b1 - c.a - 1.0;
  DgkResult r;
  r.checks.push_back({"0 ≤ b1−a−1", s, 0.0 <= s});
  r.checks.push_back({"b1−a−1 < 4", s, s < 4.0});
  r.checks.push_back({"b1+b2 ≥ 1", c.b1 + c.b2, c.b1 + c.b2 >= 1.0});
  const double bound = 0.25 * (1.0 - 0.25 * s);
  r.checks.push_back({"|λ| < ¼(1 − ¼(b1−a−1))", std::fabs(c.lambda) - bound, std::fabs(c.lambda) < bound});
  r.admissible = true;
  for (const auto& ch : r.checks) r.admissible = r.admissible && ch.pass;
  return r;
}

/// B1 only, for any n.
template <class S>
DenseTensor<S> bianchi_B1(const DenseTensor<S>& h, const DenseTensor<S>& xi) {
  detail::require_nonzero(xi);
  DenseTensor<S> out(xi.dim, 1);
  const S tr = trace(h);
  for (int k = 0; k < xi.dim; ++k) {
    S acc(0);
    for (int a = 0; a < xi.dim; ++a) acc += xi(a) * h(a, k);
    out(k) = acc - xi(k) * tr / S(2);
  }
  return out;
}

template <class S>
struct BianchiPair {
  DenseTensor<S> B1h;
  DenseTensor<S> B2X;
};

/// (B1 h)_k = xi_a h_ak - xi_k tr h / 2 and (B2 X)_k = xi_a X_b phi_abk.
template <class S>
BianchiPair<S> bianchi_operators(const DenseTensor<S>& h, const DenseTensor<S>& X, const DenseTensor<S>& xi,
                                 const G2Point<S>& pt) {
  if (xi.dim != 7) throw ValidationError("B2 requires n = 7");
  BianchiPair<S> out{bianchi_B1(h, xi), DenseTensor<S>(7, 1)};
  for (int k = 0; k < 7; ++k) {
    S acc(0);
    for (int a = 0; a < 7; ++a)
      for (int b = 0; b < 7; ++b) acc += xi(a) * X(b) * pt.phi(a, b, k);
    out.B2X(k) = acc;
  }
  return out;
}

}  // namespace geoflow
