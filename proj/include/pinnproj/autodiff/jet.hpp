#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "pinnproj/autodiff/tape.hpp"
#include "pinnproj/errors.hpp"

namespace pinnproj::ad {

/// Value and first three derivatives with respect to one seeded scalar input.
///
/// Lanes hold derivatives (not Taylor coefficients). `T` may be a float type
/// or `Var`, in which case every lane is itself differentiable with respect
/// to whatever was taped upstream (network parameters in practice).
template <class T>
struct Jet {
  T v{};
  T d1{};
  T d2{};
  T d3{};

  Jet() = default;
  /// A constant: value `value`, zero derivative lanes.
  Jet(T value) : v(std::move(value)), d1(0), d2(0), d3(0) {}  // NOLINT(google-explicit-constructor)
  Jet(T value, T first, T second, T third)
      : v(std::move(value)), d1(std::move(first)), d2(std::move(second)), d3(std::move(third)) {}

  static Jet constant(T value) { return {value, T(0), T(0), T(0)}; }
  static Jet seed(T value) { return {value, T(1), T(0), T(0)}; }
};

template <class T>
auto value_of(const Jet<T>& j) {
  return value_of(j.v);
}

namespace detail {

/// Compose a scalar function with derivatives f0..f3 (at a.v) with jet `a`.
template <class T>
Jet<T> chain(const Jet<T>& a, const T& f0, const T& f1, const T& f2, const T& f3) {
  const T d1sq = a.d1 * a.d1;
  return {f0, f1 * a.d1, f2 * d1sq + f1 * a.d2,
          f3 * d1sq * a.d1 + T(3) * f2 * a.d1 * a.d2 + f1 * a.d3};
}

}  // namespace detail

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}
template <class T>
Jet<T> operator-(const Jet<T>& a) {
  return {-a.v, -a.d1, -a.d2, -a.d3};
}
template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + T(2) * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + T(3) * (a.d2 * b.d1 + a.d1 * b.d2) + a.v * b.d3};
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const T& s) {
  return {a.v + s, a.d1, a.d2, a.d3};
}
template <class T>
Jet<T> operator+(const T& s, const Jet<T>& a) {
  return a + s;
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const T& s) {
  return {a.v - s, a.d1, a.d2, a.d3};
}
template <class T>
Jet<T> operator*(const Jet<T>& a, const T& s) {
  return {a.v * s, a.d1 * s, a.d2 * s, a.d3 * s};
}
template <class T>
Jet<T> operator*(const T& s, const Jet<T>& a) {
  return a * s;
}

template <class T>
Jet<T> reciprocal(const Jet<T>& a) {
  if (value_of(a.v) == 0) throw DomainError("jet division: divisor is zero");
  const T r = T(1) / a.v;
  const T r2 = r * r;
  return detail::chain(a, r, -r2, T(2) * r2 * r, T(-6) * r2 * r2);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * reciprocal(b);
}
template <class T>
Jet<T> operator/(const Jet<T>& a, const T& s) {
  if (value_of(s) == 0) throw DomainError("jet division: divisor is zero");
  return a * (T(1) / s);
}

template <class T>
Jet<T> tanh(const Jet<T>& a) {
  using std::tanh;
  const T y = tanh(a.v);
  const T t1 = T(1) - y * y;
  const T t2 = T(-2) * y * t1;
  const T t3 = T(-2) * t1 * t1 + T(4) * y * y * t1;
  return detail::chain(a, y, t1, t2, t3);
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  const T y = exp(a.v);
  return detail::chain(a, y, y, y, y);
}

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  using std::sqrt;
  if (value_of(a.v) < 0) throw DomainError("jet sqrt: negative argument");
  if (value_of(a.v) == 0) throw DomainError("jet sqrt: derivatives undefined at 0");
  const T s = sqrt(a.v);
  const T inv = T(1) / a.v;
  const T f1 = T(0.5) / s;
  const T f2 = T(-0.5) * f1 * inv;
  const T f3 = T(-1.5) * f2 * inv;
  return detail::chain(a, s, f1, f2, f3);
}

template <class T>
Jet<T> pow(const Jet<T>& a, double p) {
  using std::pow;
  const double x = static_cast<double>(value_of(a.v));
  if (x < 0 && std::trunc(p) != p) throw DomainError("jet pow: negative base, fractional exponent");
  if (x == 0 && (p < 0 || (p < 3 && std::trunc(p) != p))) throw DomainError("jet pow: derivatives undefined at 0");
  auto term = [&](double coeff, double e) -> T {
    if (coeff == 0) return T(0);
    if (e == 0) return T(coeff);
    return T(coeff) * pow(a.v, e);
  };
  return detail::chain(a, term(1, p), term(p, p - 1), term(p * (p - 1), p - 2),
                       term(p * (p - 1) * (p - 2), p - 3));
}

/// Evaluate `expr` (a callable over jets) with the input seeded at `x`.
template <class F>
Jet<double> jet_eval(F&& expr, double x) {
  return expr(Jet<double>::seed(x));
}

}  // namespace pinnproj::ad
