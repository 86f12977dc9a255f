#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "harvest/autodiff/scalar_math.hpp"

namespace harvest::autodiff {

/// First-order forward mode over N seed directions. Used to get the partials
/// of a small pointwise expression (a PDE residual) with respect to its jet
/// inputs in one pass.
template <std::size_t N>
struct GradDual {
  double value = 0.0;
  std::array<double, N> grad{};

  GradDual() = default;
  GradDual(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  static GradDual seed(double v, std::size_t k) {
    GradDual g(v);
    g.grad[k] = 1.0;
    return g;
  }
};

template <std::size_t N>
GradDual<N> scale_chain(const GradDual<N>& a, double f0, double f1) {
  GradDual<N> r(f0);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = f1 * a.grad[i];
  return r;
}

template <std::size_t N>
GradDual<N> operator+(const GradDual<N>& a, const GradDual<N>& b) {
  GradDual<N> r(a.value + b.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] + b.grad[i];
  return r;
}
template <std::size_t N>
GradDual<N> operator-(const GradDual<N>& a, const GradDual<N>& b) {
  GradDual<N> r(a.value - b.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] - b.grad[i];
  return r;
}
template <std::size_t N>
GradDual<N> operator-(const GradDual<N>& a) {
  return scale_chain(a, -a.value, -1.0);
}
template <std::size_t N>
GradDual<N> operator*(const GradDual<N>& a, const GradDual<N>& b) {
  GradDual<N> r(a.value * b.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  return r;
}
template <std::size_t N>
GradDual<N> operator/(const GradDual<N>& a, const GradDual<N>& b) {
  const double q = a.value / b.value;
  GradDual<N> r(q);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = (a.grad[i] - q * b.grad[i]) / b.value;
  return r;
}
template <std::size_t N>
GradDual<N> operator+(const GradDual<N>& a, double s) {
  GradDual<N> r = a;
  r.value += s;
  return r;
}
template <std::size_t N>
GradDual<N> operator+(double s, const GradDual<N>& a) {
  return a + s;
}
template <std::size_t N>
GradDual<N> operator-(const GradDual<N>& a, double s) {
  return a + (-s);
}
template <std::size_t N>
GradDual<N> operator-(double s, const GradDual<N>& a) {
  return scale_chain(a, s - a.value, -1.0);
}
template <std::size_t N>
GradDual<N> operator*(const GradDual<N>& a, double s) {
  return scale_chain(a, a.value * s, s);
}
template <std::size_t N>
GradDual<N> operator*(double s, const GradDual<N>& a) {
  return a * s;
}
template <std::size_t N>
GradDual<N> operator/(const GradDual<N>& a, double s) {
  return a * (1.0 / s);
}

template <std::size_t N>
GradDual<N> tanh(const GradDual<N>& a) {
  const double y = std::tanh(a.value);
  return scale_chain(a, y, 1.0 - y * y);
}
template <std::size_t N>
GradDual<N> sin(const GradDual<N>& a) {
  return scale_chain(a, std::sin(a.value), std::cos(a.value));
}
template <std::size_t N>
GradDual<N> cos(const GradDual<N>& a) {
  return scale_chain(a, std::cos(a.value), -std::sin(a.value));
}
template <std::size_t N>
GradDual<N> exp(const GradDual<N>& a) {
  const double e = std::exp(a.value);
  return scale_chain(a, e, e);
}
template <std::size_t N>
GradDual<N> log(const GradDual<N>& a) {
  return scale_chain(a, std::log(a.value), 1.0 / a.value);
}
template <std::size_t N>
GradDual<N> pow(const GradDual<N>& a, double p) {
  return scale_chain(a, std::pow(a.value, p), p * std::pow(a.value, p - 1.0));
}
template <std::size_t N>
GradDual<N> softplus(const GradDual<N>& a) {
  return scale_chain(a, softplus(a.value), sigmoid(a.value));
}

}  // namespace harvest::autodiff
