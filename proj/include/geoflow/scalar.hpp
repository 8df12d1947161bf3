#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace geoflow {

/// Exact rational scalar used for the bit-exact identity checks.
using Exact = boost::multiprecision::cpp_rational;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double from_int(std::int64_t v) { return static_cast<double>(v); }
  static double from_ratio(std::int64_t p, std::int64_t q) {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
  static bool is_zero(double v) { return v == 0.0; }
  static double sqrt(double v) {
    if (v < 0.0) throw std::domain_error("sqrt of negative value");
    return std::sqrt(v);
  }
  /// Real n-th root for odd n, principal root for even n.
  static double nth_root(double v, int n) {
    if (n % 2 == 1) return v < 0 ? -std::pow(-v, 1.0 / n) : std::pow(v, 1.0 / n);
    if (v < 0.0) throw std::domain_error("even root of negative value");
    return std::pow(v, 1.0 / n);
  }
  static std::string to_string(double v);
};

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

/// Exact integer n-th root of a nonnegative integer, or -1 when not a perfect power.
inline BigInt exact_int_root(const BigInt& v, int n) {
  if (v < 0) return BigInt(-1);
  if (v == 0 || v == 1) return v;
  // Newton iteration on integers, starting above the root.
  const double approx = std::pow(v.convert_to<double>(), 1.0 / n);
  BigInt x = BigInt(static_cast<long long>(approx)) + 2;
  for (;;) {
    BigInt xn1 = boost::multiprecision::pow(x, static_cast<unsigned>(n - 1));
    BigInt y = ((n - 1) * x + v / xn1) / n;
    if (y >= x) break;
    x = y;
  }
  while (boost::multiprecision::pow(x, static_cast<unsigned>(n)) > v) --x;
  while (boost::multiprecision::pow(x + 1, static_cast<unsigned>(n)) <= v) ++x;
  if (boost::multiprecision::pow(x, static_cast<unsigned>(n)) != v) return BigInt(-1);
  return x;
}

}  // namespace detail

template <>
struct ScalarTraits<Exact> {
  static constexpr bool exact = true;
  static Exact from_int(std::int64_t v) { return Exact(v); }
  static Exact from_ratio(std::int64_t p, std::int64_t q) { return Exact(p) / Exact(q); }
  static double to_double(const Exact& v) { return v.convert_to<double>(); }
  static Exact abs(const Exact& v) { return v < 0 ? Exact(-v) : v; }
  static bool is_zero(const Exact& v) { return v == 0; }

  /// Exact n-th root; throws std::domain_error when the root is irrational.
  static Exact nth_root(const Exact& v, int n) {
    const bool negative = v < 0;
    if (negative && n % 2 == 0) throw std::domain_error("even root of negative value");
    const Exact a = negative ? Exact(-v) : v;
    const auto p = detail::exact_int_root(boost::multiprecision::numerator(a), n);
    const auto q = detail::exact_int_root(boost::multiprecision::denominator(a), n);
    if (p < 0 || q < 0) throw std::domain_error("root is not rational");
    Exact r(p, q);
    return negative ? Exact(-r) : r;
  }
  static Exact sqrt(const Exact& v) { return nth_root(v, 2); }

  /// "p/q", or "p" for integers.
  static std::string to_string(const Exact& v) {
    const auto q = boost::multiprecision::denominator(v);
    if (q == 1) return boost::multiprecision::numerator(v).str();
    return boost::multiprecision::numerator(v).str() + "/" + q.str();
  }
  static Exact parse(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Exact(detail::BigInt(s));
    return Exact(detail::BigInt(s.substr(0, slash)), detail::BigInt(s.substr(slash + 1)));
  }
};

/// CSV/JSON float formatting: 17 significant digits.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string ScalarTraits<double>::to_string(double v) { return format_double(v); }

template <class S>
double to_double(const S& v) {
  return ScalarTraits<S>::to_double(v);
}

}  // namespace geoflow
