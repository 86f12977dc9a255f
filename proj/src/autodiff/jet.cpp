#include "harvest/autodiff/jet.hpp"

namespace harvest::autodiff {

JetComponent component_of(Partial p) {
  if (p.dx < 0 || p.dt < 0) throw UnsupportedOrderError("negative derivative order");
  const int order = p.dx + p.dt;
  if (order > 2) {
    throw UnsupportedOrderError("derivative of order " + std::to_string(order) +
                                " requested; at most second order is supported");
  }
  if (order == 0) return JetComponent::kU;
  if (order == 1) return p.dx == 1 ? JetComponent::kUx : JetComponent::kUt;
  if (p.dx == 2) return JetComponent::kUxx;
  if (p.dt == 2) return JetComponent::kUtt;
  return JetComponent::kUxt;
}

ResidualGrad PointOperator::evaluate(const JetPoint<double>& jet, const Coord& where) const {
  JetPoint<ResidualGrad> seeded;
  for (int k = 0; k < kJetSize; ++k) {
    const auto c = static_cast<JetComponent>(k);
    seeded.at(c) = ResidualGrad::seed(jet.at(c), static_cast<std::size_t>(k));
  }
  return fast(seeded, where);
}

}  // namespace harvest::autodiff
