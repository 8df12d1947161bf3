#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "errors.hpp"
#include "tensor.hpp"

namespace geoflow {

using Complex = std::complex<double>;
using Mode = std::array<int, 3>;

/// Truncated Fourier series of a real k-form on the flat unit torus T^n:
/// alpha(x) = sum_m alpha_m e^{2 pi i m.x}, each alpha_m a full antisymmetric coefficient array.
struct FourierForm {
  int n = 1;
  int degree = 0;
  int K = 16;
  std::map<Mode, std::vector<Complex>> modes;

  FourierForm() = default;
  FourierForm(int dim, int k, int truncation = 16) : n(dim), degree(k), K(truncation) {
    if (n < 1 || n > 3) throw ValidationError("FourierForm supports n = 1..3");
    if (k < 0 || k > n) throw ValidationError("form degree out of range");
    if (truncation < 0) throw ValidationError("truncation must be nonnegative");
  }

  std::size_t coeff_size() const { return DenseTensor<double>::ipow(n, degree); }

  void check_mode(const Mode& m) const {
    for (int a = 0; a < 3; ++a) {
      if (a >= n && m[a] != 0) throw ValidationError("mode has components beyond the torus dimension");
      if (std::abs(m[a]) > K) throw ValidationError("mode exceeds the truncation K");
    }
  }

  std::vector<Complex>& coeff(const Mode& m) {
    check_mode(m);
    auto it = modes.find(m);
    if (it == modes.end()) it = modes.emplace(m, std::vector<Complex>(coeff_size())).first;
    return it->second;
  }

  /// Adds c * e_I (antisymmetrized) at mode m and the conjugate at -m, keeping the form real.
  void add_real_term(const Mode& m, const Index& I, Complex c) {
    DenseTensor<double> shape(n, degree, Symmetry::antisym);
    auto put = [&](const Mode& mm, Complex v) {
      auto& a = coeff(mm);
      Index sorted = I;
      const int s0 = permutation_sign(I);
      if (s0 == 0) throw ValidationError("repeated index in a form component");
      std::sort(sorted.begin(), sorted.end());
      Index p = sorted;
      do {
        a[shape.offset(p)] += static_cast<double>(permutation_sign(p) * s0) * v;
      } while (std::next_permutation(p.begin(), p.end()));
    };
    const Mode neg{-m[0], -m[1], -m[2]};
    if (neg == m) {
      put(m, Complex(c.real(), 0.0));
    } else {
      put(m, c);
      put(neg, std::conj(c));
    }
  }

  /// Largest |alpha_{-m} - conj(alpha_m)|.
  double reality_defect() const {
    double d = 0.0;
    for (const auto& [m, a] : modes) {
      const Mode neg{-m[0], -m[1], -m[2]};
      auto it = modes.find(neg);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const Complex other = it == modes.end() ? Complex(0.0) : it->second[i];
        d = std::max(d, std::abs(other - std::conj(a[i])));
      }
    }
    return d;
  }

  /// Real value of component I at position x.
  double evaluate(const Index& I, const std::array<double, 3>& x) const {
    DenseTensor<double> shape(n, degree);
    const std::size_t o = shape.offset(I);
    Complex s(0.0);
    for (const auto& [m, a] : modes) {
      double ph = 0.0;
      for (int d = 0; d < n; ++d) ph += m[d] * x[d];
      s += a[o] * std::exp(Complex(0.0, 2.0 * M_PI * ph));
    }
    return s.real();
  }
};

inline double mode_norm_sq(const Mode& m) {
  return static_cast<double>(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
}

/// L^2 inner product on T^n with the (1/k!) form convention, by Parseval.
inline double l2_inner(const FourierForm& a, const FourierForm& b) {
  double s = 0.0;
  double fact = 1.0;
  for (int i = 2; i <= a.degree; ++i) fact *= i;
  for (const auto& [m, ca] : a.modes) {
    auto it = b.modes.find(m);
    if (it == b.modes.end()) continue;
    for (std::size_t i = 0; i < ca.size(); ++i) s += (ca[i] * std::conj(it->second[i])).real();
  }
  return s / fact;
}

inline double l2_norm(const FourierForm& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

namespace detail {

/// (v ^ a) for a real 1-form v and a complex k-form coefficient array (full storage).
inline std::vector<Complex> wedge_vector(const std::vector<double>& v, const std::vector<Complex>& a, int n, int k) {
  DenseTensor<double> in(n, k), out(n, k + 1);
  std::vector<Complex> r(out.size());
  if (k + 1 > n) return r;
  for (std::size_t o = 0; o < out.size(); ++o) {
    const Index I = out.unflatten(o);
    Complex acc(0.0);
    for (int s = 0; s <= k; ++s) {
      Index rest;
      for (int t = 0; t <= k; ++t)
        if (t != s) rest.push_back(I[t]);
      acc += (s % 2 == 0 ? 1.0 : -1.0) * v[I[s]] * a[in.offset(rest)];
    }
    r[o] = acc;
  }
  return r;
}

/// (v _| a) for a real vector v and a complex k-form coefficient array.
inline std::vector<Complex> interior_vector(const std::vector<double>& v, const std::vector<Complex>& a, int n, int k) {
  const std::size_t stride = DenseTensor<double>::ipow(n, k - 1);
  std::vector<Complex> r(stride);
  for (int i = 0; i < n; ++i)
    for (std::size_t o = 0; o < stride; ++o) r[o] += v[i] * a[i * stride + o];
  return r;
}

inline std::vector<double> unit_direction(const Mode& m, int n) {
  std::vector<double> v(n);
  const double len = std::sqrt(mode_norm_sq(m));
  for (int a = 0; a < n; ++a) v[a] = m[a] / len;
  return v;
}

}  // namespace detail

/// One exact step of d/dt alpha = -Delta_d alpha: each mode decays by exp(-(2 pi)^2 |m|^2 dt).
inline FourierForm hodge_heat_step(const FourierForm& alpha, double dt) {
  if (dt < 0.0) throw ValidationError("dt must be nonnegative");
  FourierForm out = alpha;
  for (auto& [m, a] : out.modes) {
    const double f = std::exp(-4.0 * M_PI * M_PI * mode_norm_sq(m) * dt);
    for (auto& c : a) c *= f;
  }
  return out;
}

/// t -> infinity limit: the zero mode.
inline FourierForm hodge_heat_limit(const FourierForm& alpha) {
  FourierForm out(alpha.n, alpha.degree, alpha.K);
  auto it = alpha.modes.find(Mode{0, 0, 0});
  if (it != alpha.modes.end()) out.modes.emplace(it->first, it->second);
  return out;
}

/// Largest |m ^ alpha_m| over modes (zero iff the form is closed).
inline double closedness_defect(const FourierForm& alpha) {
  double d = 0.0;
  for (const auto& [m, a] : alpha.modes) {
    if (mode_norm_sq(m) == 0.0) continue;
    std::vector<double> v(alpha.n);
    for (int i = 0; i < alpha.n; ++i) v[i] = m[i];
    for (const auto& c : detail::wedge_vector(v, a, alpha.n, alpha.degree)) d = std::max(d, std::abs(c));
  }
  return d;
}

struct HodgeParts {
  FourierForm harmonic;
  FourierForm exact;
  FourierForm coexact;
};

/// Per mode with unit direction u: exact part u ^ (u _| a), coexact part u _| (u ^ a); zero mode is harmonic.
inline HodgeParts hodge_decompose(const FourierForm& alpha) {
  HodgeParts p{FourierForm(alpha.n, alpha.degree, alpha.K), FourierForm(alpha.n, alpha.degree, alpha.K),
               FourierForm(alpha.n, alpha.degree, alpha.K)};
  const int n = alpha.n, k = alpha.degree;
  for (const auto& [m, a] : alpha.modes) {
    if (mode_norm_sq(m) == 0.0) {
      p.harmonic.modes[m] = a;
      continue;
    }
    const auto u = detail::unit_direction(m, n);
    std::vector<Complex> ex(a.size()), co(a.size());
    if (k > 0) ex = detail::wedge_vector(u, detail::interior_vector(u, a, n, k), n, k - 1);
    if (k < n) co = detail::interior_vector(u, detail::wedge_vector(u, a, n, k), n, k + 1);
    p.exact.modes[m] = ex;
    p.coexact.modes[m] = co;
  }
  return p;
}

inline FourierForm operator+(FourierForm a, const FourierForm& b) {
  for (const auto& [m, cb] : b.modes) {
    auto& ca = a.coeff(m);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] += cb[i];
  }
  return a;
}

inline FourierForm operator-(FourierForm a, const FourierForm& b) {
  for (const auto& [m, cb] : b.modes) {
    auto& ca = a.coeff(m);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] -= cb[i];
  }
  return a;
}

inline double max_abs_coeff(const FourierForm& a) {
  double d = 0.0;
  for (const auto& [m, c] : a.modes)
    for (const auto& v : c) d = std::max(d, std::abs(v));
  return d;
}

/// d(f) for a real scalar function given as a 0-form series.
inline FourierForm exterior_derivative(const FourierForm& f) {
  FourierForm out(f.n, f.degree + 1, f.K);
  for (const auto& [m, a] : f.modes) {
    std::vector<double> v(f.n);
    for (int i = 0; i < f.n; ++i) v[i] = 2.0 * M_PI * m[i];
    auto w = detail::wedge_vector(v, a, f.n, f.degree);
    for (auto& c : w) c *= Complex(0.0, 1.0);
    out.modes[m] = w;
  }
  return out;
}

}  // namespace geoflow
