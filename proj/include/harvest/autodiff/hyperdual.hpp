#pragma once

#include <cmath>
#include <concepts>
#include <type_traits>

#include "harvest/autodiff/scalar_math.hpp"

namespace harvest::autodiff {

/// Truncated second-order Taylor number along two seed directions.
///
/// With input x + s1*e1 + s2*e2, `d1` and `d2` carry df/ds1 and df/ds2 and
/// `d12` carries d2f/ds1ds2 (e1*e2 = 0 but e1e2 != 0). Seeding e1 = e2 = e_i
/// gives the pure second partial in d12.
template <class T = double>
struct HyperDual {
  T value{};
  T d1{};
  T d2{};
  T d12{};

  HyperDual() = default;
  HyperDual(T v) : value(v) {}  // NOLINT(google-explicit-constructor)
  HyperDual(T v, T a, T b, T ab) : value(v), d1(a), d2(b), d12(ab) {}

  HyperDual& operator+=(const HyperDual& o) { return *this = *this + o; }
  HyperDual& operator-=(const HyperDual& o) { return *this = *this - o; }
  HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }
};

using HyperDualScalar = HyperDual<double>;

template <class>
struct is_hyperdual : std::false_type {};
template <class T>
struct is_hyperdual<HyperDual<T>> : std::true_type {};

/// Plain scalar that may be mixed with HyperDual<T>.
template <class S, class T>
concept HyperDualScalarOperand = (!is_hyperdual<S>::value) && std::convertible_to<S, T>;

template <class T>
HyperDual<T> operator+(const HyperDual<T>& a, const HyperDual<T>& b) {
  return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}
template <class T>
HyperDual<T> operator-(const HyperDual<T>& a, const HyperDual<T>& b) {
  return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}
template <class T>
HyperDual<T> operator-(const HyperDual<T>& a) {
  return {-a.value, -a.d1, -a.d2, -a.d12};
}
template <class T>
HyperDual<T> operator*(const HyperDual<T>& f, const HyperDual<T>& g) {
  return {f.value * g.value, f.d1 * g.value + f.value * g.d1, f.d2 * g.value + f.value * g.d2,
          f.d12 * g.value + f.d1 * g.d2 + f.d2 * g.d1 + f.value * g.d12};
}

template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator+(const HyperDual<T>& a, const S& s) {
  return {a.value + T(s), a.d1, a.d2, a.d12};
}
template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator+(const S& s, const HyperDual<T>& a) {
  return a + s;
}
template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator-(const HyperDual<T>& a, const S& s) {
  return {a.value - T(s), a.d1, a.d2, a.d12};
}
template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator-(const S& s, const HyperDual<T>& a) {
  return {T(s) - a.value, -a.d1, -a.d2, -a.d12};
}
template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator*(const HyperDual<T>& a, const S& s) {
  const T k(s);
  return {a.value * k, a.d1 * k, a.d2 * k, a.d12 * k};
}
template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator*(const S& s, const HyperDual<T>& a) {
  return a * s;
}

/// f(a) from f, f', f'' evaluated at a.value.
template <class T>
HyperDual<T> chain(const HyperDual<T>& a, const T& f0, const T& f1, const T& f2) {
  return {f0, f1 * a.d1, f1 * a.d2, f2 * a.d1 * a.d2 + f1 * a.d12};
}

template <class T>
HyperDual<T> reciprocal(const HyperDual<T>& a) {
  const T inv = T(1.0) / a.value;
  const T inv2 = inv * inv;
  return chain(a, inv, -inv2, T(2.0) * inv2 * inv);
}

template <class T>
HyperDual<T> operator/(const HyperDual<T>& a, const HyperDual<T>& b) {
  return a * reciprocal(b);
}
template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator/(const HyperDual<T>& a, const S& s) {
  return a * (T(1.0) / T(s));
}
template <class T, class S>
  requires HyperDualScalarOperand<S, T>
HyperDual<T> operator/(const S& s, const HyperDual<T>& a) {
  return reciprocal(a) * s;
}

template <class T>
HyperDual<T> tanh(const HyperDual<T>& a) {
  using std::tanh;
  const T y = tanh(a.value);
  const T s1 = T(1.0) - y * y;
  return chain(a, y, s1, T(-2.0) * y * s1);
}

template <class T>
HyperDual<T> sin(const HyperDual<T>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.value);
  return chain(a, s, cos(a.value), -s);
}

template <class T>
HyperDual<T> cos(const HyperDual<T>& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a.value);
  return chain(a, c, -sin(a.value), -c);
}

template <class T>
HyperDual<T> exp(const HyperDual<T>& a) {
  using std::exp;
  const T e = exp(a.value);
  return chain(a, e, e, e);
}

template <class T>
HyperDual<T> log(const HyperDual<T>& a) {
  using std::log;
  const T inv = T(1.0) / a.value;
  return chain(a, log(a.value), inv, -inv * inv);
}

template <class T>
HyperDual<T> pow(const HyperDual<T>& a, double p) {
  using std::pow;
  return chain(a, pow(a.value, p), p * pow(a.value, p - 1.0),
               p * (p - 1.0) * pow(a.value, p - 2.0));
}

template <class T>
HyperDual<T> sqrt(const HyperDual<T>& a) {
  return pow(a, 0.5);
}

template <class T>
HyperDual<T> softplus(const HyperDual<T>& a) {
  const T s = sigmoid(a.value);
  return chain(a, softplus(a.value), s, s * (T(1.0) - s));
}

}  // namespace harvest::autodiff
