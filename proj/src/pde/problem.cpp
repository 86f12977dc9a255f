#include "harvest/pde/problem.hpp"

#include <cmath>
#include <numbers>

#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"

namespace harvest::pde {

using autodiff::HyperDualScalar;
using autodiff::PointOperator;
constexpr double kPi = std::numbers::pi;

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::kInitial:
      return "initial";
    case BoundaryKind::kInitialVelocity:
      return "initial_velocity";
    case BoundaryKind::kLeft:
      return "left";
    case BoundaryKind::kRight:
      return "right";
  }
  return "unknown";
}

bool BoundaryPiece::contains(const Domain& d, const Coord& p) const {
  switch (kind) {
    case BoundaryKind::kInitial:
    case BoundaryKind::kInitialVelocity:
      return p[1] == d.t_lo && p[0] >= d.x_lo && p[0] <= d.x_hi;
    case BoundaryKind::kLeft:
      return p[0] == d.x_lo && p[1] >= d.t_lo && p[1] <= d.t_hi;
    case BoundaryKind::kRight:
      return p[0] == d.x_hi && p[1] >= d.t_lo && p[1] <= d.t_hi;
  }
  return false;
}

namespace {

BoundaryPiece dirichlet_zero(BoundaryKind kind) {
  return {kind, PointOperator::make({}, [](const auto& j, const Coord&) { return j.u; })};
}

void require_positive(const std::string& name, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw ConfigError(name + ": z must be positive, got " + format_double(z));
  }
}

}  // namespace

PdeProblem make_diffusion(double z) {
  require_positive("diffusion", z);
  PdeProblem p;
  p.name = "diffusion";
  p.z = z;
  p.domain = {-1.0 / z, 1.0 / z, 0.0, 1.0};
  const double k = z * kPi;
  p.residual = PointOperator::make({{0, 1}, {2, 0}}, [k](const auto& j, const Coord& c) {
    return j.u_t - j.u_xx - (k * k - 1.0) * std::exp(-c[1]) * std::sin(k * c[0]);
  });
  p.boundary.push_back({BoundaryKind::kInitial,
                        PointOperator::make({}, [k](const auto& j, const Coord& c) {
                          return j.u - std::sin(k * c[0]);
                        })});
  p.boundary.push_back(dirichlet_zero(BoundaryKind::kLeft));
  p.boundary.push_back(dirichlet_zero(BoundaryKind::kRight));
  p.exact = [k](const HyperDualScalar& x, const HyperDualScalar& t) { return sin(k * x) * exp(-t); };
  return p;
}

PdeProblem make_wave(double z) {
  require_positive("wave", z);
  if (z != std::round(z)) throw ConfigError("wave: z must be an integer, got " + format_double(z));
  PdeProblem p;
  p.name = "wave";
  p.z = z;
  p.domain = {0.0, 1.0, 0.0, 1.0};
  const double c2 = 4.0 * z * z;
  p.residual = PointOperator::make({{0, 2}, {2, 0}},
                                   [c2](const auto& j, const Coord&) { return j.u_tt - c2 * j.u_xx; });
  p.boundary.push_back({BoundaryKind::kInitial,
                        PointOperator::make({}, [](const auto& j, const Coord& c) {
                          return j.u - (std::sin(kPi * c[0]) + 0.5 * std::sin(4.0 * kPi * c[0]));
                        })});
  p.boundary.push_back({BoundaryKind::kInitialVelocity,
                        PointOperator::make({{0, 1}}, [](const auto& j, const Coord&) { return j.u_t; })});
  p.boundary.push_back(dirichlet_zero(BoundaryKind::kLeft));
  p.boundary.push_back(dirichlet_zero(BoundaryKind::kRight));
  p.exact = [z](const HyperDualScalar& x, const HyperDualScalar& t) {
    return sin(kPi * x) * cos(2.0 * z * kPi * t) + 0.5 * sin(4.0 * kPi * x) * cos(8.0 * z * kPi * t);
  };
  return p;
}

PdeProblem make_burgers(double z) {
  require_positive("burgers", z);
  PdeProblem p;
  p.name = "burgers";
  p.z = z;
  p.domain = {-1.0, 1.0, 0.0, 1.0};
  p.residual = PointOperator::make({{0, 1}, {1, 0}, {2, 0}}, [z](const auto& j, const Coord&) {
    return j.u_t + j.u * j.u_x - z * j.u_xx;
  });
  p.boundary.push_back({BoundaryKind::kInitial,
                        PointOperator::make({}, [](const auto& j, const Coord& c) {
                          return j.u + std::sin(kPi * c[0]);
                        })});
  p.boundary.push_back(dirichlet_zero(BoundaryKind::kLeft));
  p.boundary.push_back(dirichlet_zero(BoundaryKind::kRight));
  return p;
}

PdeProblem make_problem(const std::string& name, double z) {
  if (name == "diffusion") return make_diffusion(z);
  if (name == "wave") return make_wave(z);
  if (name == "burgers") return make_burgers(z);
  throw ConfigError("unknown PDE environment '" + name + "'");
}

double exact_value(const PdeProblem& problem, const Coord& p) {
  if (!problem.has_exact()) throw Error(problem.name + " has no closed-form solution");
  return problem.exact(HyperDualScalar(p[0]), HyperDualScalar(p[1])).value;
}

autodiff::JetPoint<double> exact_jet(const PdeProblem& problem, const Coord& p) {
  if (!problem.has_exact()) throw Error(problem.name + " has no closed-form solution");
  const auto xx = problem.exact(HyperDualScalar(p[0], 1.0, 1.0, 0.0), HyperDualScalar(p[1]));
  const auto tt = problem.exact(HyperDualScalar(p[0]), HyperDualScalar(p[1], 1.0, 1.0, 0.0));
  const auto xt = problem.exact(HyperDualScalar(p[0], 1.0, 0.0, 0.0), HyperDualScalar(p[1], 0.0, 1.0, 0.0));
  autodiff::JetPoint<double> j;
  j.u = xx.value;
  j.u_x = xx.d1;
  j.u_xx = xx.d12;
  j.u_t = tt.d1;
  j.u_tt = tt.d12;
  j.u_xt = xt.d12;
  return j;
}

}  // namespace harvest::pde
