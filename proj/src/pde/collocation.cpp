#include "harvest/pde/collocation.hpp"

#include "harvest/common/allocation.hpp"
#include "harvest/common/error.hpp"

namespace harvest::pde {

int CollocationSet::boundary_count() const {
  int n = 0;
  for (const auto& b : boundary) n += static_cast<int>(b.cols());
  return n;
}

Eigen::MatrixXd uniform_interior(const Domain& domain, int count, Rng& rng) {
  if (count < 0) throw SamplingError("negative point count");
  Eigen::MatrixXd pts(2, count);
  for (int n = 0; n < count; ++n) {
    pts(0, n) = domain.x_lo + (domain.x_hi - domain.x_lo) * uniform_open(rng);
    pts(1, n) = domain.t_lo + (domain.t_hi - domain.t_lo) * uniform_open(rng);
  }
  return pts;
}

std::vector<Eigen::MatrixXd> sample_boundary(const PdeProblem& problem, int count, Rng& rng) {
  const std::size_t pieces = problem.boundary.size();
  std::vector<Eigen::MatrixXd> out(pieces);
  if (pieces == 0) return out;
  const std::vector<double> even(pieces, 1.0);
  const auto counts = largest_remainder(even, count);
  const Domain& d = problem.domain;
  for (std::size_t k = 0; k < pieces; ++k) {
    Eigen::MatrixXd& m = out[k];
    m.resize(2, counts[k]);
    for (int n = 0; n < counts[k]; ++n) {
      switch (problem.boundary[k].kind) {
        case BoundaryKind::kInitial:
        case BoundaryKind::kInitialVelocity:
          m(0, n) = d.x_lo + (d.x_hi - d.x_lo) * uniform_open(rng);
          m(1, n) = d.t_lo;
          break;
        case BoundaryKind::kLeft:
          m(0, n) = d.x_lo;
          m(1, n) = d.t_lo + (d.t_hi - d.t_lo) * uniform_open(rng);
          break;
        case BoundaryKind::kRight:
          m(0, n) = d.x_hi;
          m(1, n) = d.t_lo + (d.t_hi - d.t_lo) * uniform_open(rng);
          break;
      }
    }
  }
  return out;
}

}  // namespace harvest::pde
