#pragma once

#include <array>
#include <functional>
#include <initializer_list>
#include <string>

#include "harvest/autodiff/grad_dual.hpp"
#include "harvest/autodiff/tape.hpp"
#include "harvest/common/error.hpp"

namespace harvest::autodiff {

/// Derivatives of a scalar field u(x, t) up to order two. Axis 0 is x, axis 1 is t.
enum class JetComponent : int { kU = 0, kUx, kUt, kUxx, kUxt, kUtt };
inline constexpr int kJetSize = 6;

using ComponentMask = unsigned;

constexpr ComponentMask bit(JetComponent c) { return 1u << static_cast<int>(c); }

template <class T>
struct JetPoint {
  T u{};
  T u_x{};
  T u_t{};
  T u_xx{};
  T u_xt{};
  T u_tt{};

  T& at(JetComponent c) {
    switch (c) {
      case JetComponent::kU: return u;
      case JetComponent::kUx: return u_x;
      case JetComponent::kUt: return u_t;
      case JetComponent::kUxx: return u_xx;
      case JetComponent::kUxt: return u_xt;
      case JetComponent::kUtt: return u_tt;
    }
    return u;
  }
  const T& at(JetComponent c) const { return const_cast<JetPoint*>(this)->at(c); }
};

/// Partial derivative order along x and t.
struct Partial {
  int dx = 0;
  int dt = 0;
};

/// Maps a partial to its jet component; throws UnsupportedOrderError above order two.
JetComponent component_of(Partial p);

using Coord = std::array<double, 2>;
using ResidualGrad = GradDual<kJetSize>;

/// A scalar expression of the jet of u at a point, e.g. u_t - u_xx - f(x, t).
///
/// Built from one generic callable; stored for the three scalar types it is
/// evaluated with: plain double, forward partials over the six jet components
/// (batched training path) and tape variables (reference forward-over-reverse path).
struct PointOperator {
  ComponentMask mask = bit(JetComponent::kU);
  std::function<double(const JetPoint<double>&, const Coord&)> plain;
  std::function<ResidualGrad(const JetPoint<ResidualGrad>&, const Coord&)> fast;
  std::function<Var(const JetPoint<Var>&, const Coord&)> taped;

  template <class F>
  static PointOperator make(std::initializer_list<Partial> reads, F f) {
    PointOperator op;
    op.mask = bit(JetComponent::kU);
    for (Partial p : reads) op.mask |= bit(component_of(p));
    op.plain = f;
    op.fast = f;
    op.taped = f;
    return op;
  }

  /// Value and partials with respect to the six jet components.
  ResidualGrad evaluate(const JetPoint<double>& jet, const Coord& where) const;
};

}  // namespace harvest::autodiff
