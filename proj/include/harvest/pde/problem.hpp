#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "harvest/autodiff/hyperdual.hpp"
#include "harvest/autodiff/jet.hpp"
#include "harvest/autodiff/mlp_jet.hpp"
#include "harvest/nn/mlp_spec.hpp"

namespace harvest::pde {

using autodiff::Coord;

/// Axis-aligned box over (x, t).
struct Domain {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double t_lo = 0.0;
  double t_hi = 1.0;

  bool strictly_inside(const Coord& p) const {
    return p[0] > x_lo && p[0] < x_hi && p[1] > t_lo && p[1] < t_hi;
  }
  double area() const { return (x_hi - x_lo) * (t_hi - t_lo); }
  /// Maps the box onto [-1, 1]^2 for network input.
  autodiff::InputMap input_map() const {
    return {{0.5 * (x_lo + x_hi), 0.5 * (t_lo + t_hi)}, {0.5 * (x_hi - x_lo), 0.5 * (t_hi - t_lo)}};
  }
};

enum class BoundaryKind { kInitial, kInitialVelocity, kLeft, kRight };

std::string to_string(BoundaryKind kind);

/// One piece of the boundary/initial condition set: where it lives and the
/// expression B(u) that must vanish there.
struct BoundaryPiece {
  BoundaryKind kind = BoundaryKind::kInitial;
  autodiff::PointOperator op;

  bool contains(const Domain& d, const Coord& p) const;
};

/// A network approximating u(x, t), with the input normalization it was trained under.
struct PinnModel {
  nn::MlpSpec spec;
  std::vector<double> params;
  autodiff::InputMap map;
};

using ExactSolution =
    std::function<autodiff::HyperDualScalar(const autodiff::HyperDualScalar& x,
                                            const autodiff::HyperDualScalar& t)>;

struct PdeProblem {
  std::string name;
  Domain domain;
  double z = 1.0;
  autodiff::PointOperator residual;
  std::vector<BoundaryPiece> boundary;
  double boundary_weight = 1.0;
  /// Closed form, empty when the problem has none.
  ExactSolution exact;
  /// Trained stand-in for problems without a closed form.
  std::shared_ptr<const PinnModel> reference;

  bool has_exact() const { return static_cast<bool>(exact); }
  bool has_reference() const { return has_exact() || reference != nullptr; }
};

/// u_t = u_xx + (z^2 pi^2 - 1) e^{-t} sin(z pi x) on [-1/z, 1/z] x [0, 1],
/// exact solution sin(z pi x) e^{-t}.
PdeProblem make_diffusion(double z);
/// u_tt = 4 z^2 u_xx on [0, 1] x [0, 1] with u_t(x, 0) = 0. z must be a positive integer.
PdeProblem make_wave(double z);
/// u_t + u u_x = z u_xx on [-1, 1] x [0, 1], u(x, 0) = -sin(pi x). No closed form.
PdeProblem make_burgers(double z);
/// Dispatch on "diffusion", "wave" or "burgers".
PdeProblem make_problem(const std::string& name, double z);

double exact_value(const PdeProblem& problem, const Coord& p);
/// All six jet components of the closed form at p, by hyper-dual evaluation.
autodiff::JetPoint<double> exact_jet(const PdeProblem& problem, const Coord& p);

}  // namespace harvest::pde
