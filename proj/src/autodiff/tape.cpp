#include "harvest/autodiff/tape.hpp"

#include <cmath>

#include "harvest/autodiff/scalar_math.hpp"
#include "harvest/common/error.hpp"

namespace harvest::autodiff {

Var ParamTape::parameter(std::size_t slot, double value) {
  Var v = variable(value);
  slots_.push_back({v.index_, slot});
  return v;
}

std::vector<Var> ParamTape::parameters(std::span<const double> params) {
  std::vector<Var> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.push_back(parameter(i, params[i]));
  return out;
}

Var ParamTape::variable(double value) {
  nodes_.push_back(Node{});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), value);
}

void ParamTape::check_owner(const Var& v) const {
  if (!v.is_constant() && v.tape_ != this) {
    throw Error("variable belongs to a different tape");
  }
}

Var ParamTape::unary(const Var& a, double value, double da) {
  if (a.is_constant()) return Var(value);
  check_owner(a);
  nodes_.push_back(Node{a.index_, kNone, da, 0.0});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), value);
}

Var ParamTape::binary(const Var& a, const Var& b, double value, double da, double db) {
  if (a.is_constant()) return unary(b, value, db);
  if (b.is_constant()) return unary(a, value, da);
  check_owner(a);
  check_owner(b);
  nodes_.push_back(Node{a.index_, b.index_, da, db});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), value);
}

std::vector<double> ParamTape::adjoints(const Var& root) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  if (root.is_constant()) return adj;
  check_owner(root);
  adj[root.index_] = 1.0;
  for (std::size_t i = root.index_ + 1; i-- > 0;) {
    const double g = adj[i];
    if (g == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.a != kNone) adj[n.a] += g * n.da;
    if (n.b != kNone) adj[n.b] += g * n.db;
  }
  return adj;
}

std::vector<double> ParamTape::grad_params(std::span<const Var> roots,
                                           std::size_t param_count) const {
  if (roots.size() != 1) {
    throw DimensionError("grad_params needs a scalar root, got " + std::to_string(roots.size()) +
                         " outputs");
  }
  return grad_params(roots.front(), param_count);
}

std::vector<double> ParamTape::grad_params(const Var& root, std::size_t param_count) const {
  std::vector<double> grad(param_count, 0.0);
  if (root.is_constant()) return grad;
  const std::vector<double> adj = adjoints(root);
  for (const Slot& s : slots_) {
    if (s.slot >= param_count) {
      throw DimensionError("parameter slot " + std::to_string(s.slot) +
                           " outside gradient of length " + std::to_string(param_count));
    }
    grad[s.slot] += adj[s.node];
  }
  return grad;
}

std::vector<double> ParamTape::gradient(const Var& root, std::span<const Var> leaves) const {
  const std::vector<double> adj = adjoints(root);
  std::vector<double> out(leaves.size(), 0.0);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i].is_constant()) continue;
    check_owner(leaves[i]);
    out[i] = adj[leaves[i].index_];
  }
  return out;
}

void ParamTape::clear() {
  nodes_.clear();
  slots_.clear();
}

namespace {

ParamTape* owner(const Var& a, const Var& b) { return a.is_constant() ? b.tape() : a.tape(); }

}  // namespace

Var operator+(const Var& a, const Var& b) {
  ParamTape* t = owner(a, b);
  const double v = a.value() + b.value();
  return t ? t->binary(a, b, v, 1.0, 1.0) : Var(v);
}

Var operator-(const Var& a, const Var& b) {
  ParamTape* t = owner(a, b);
  const double v = a.value() - b.value();
  return t ? t->binary(a, b, v, 1.0, -1.0) : Var(v);
}

Var operator*(const Var& a, const Var& b) {
  ParamTape* t = owner(a, b);
  const double v = a.value() * b.value();
  return t ? t->binary(a, b, v, b.value(), a.value()) : Var(v);
}

Var operator/(const Var& a, const Var& b) {
  ParamTape* t = owner(a, b);
  const double v = a.value() / b.value();
  return t ? t->binary(a, b, v, 1.0 / b.value(), -v / b.value()) : Var(v);
}

Var operator-(const Var& a) {
  return a.is_constant() ? Var(-a.value()) : a.tape()->unary(a, -a.value(), -1.0);
}

Var& operator+=(Var& a, const Var& b) { return a = a + b; }
Var& operator-=(Var& a, const Var& b) { return a = a - b; }
Var& operator*=(Var& a, const Var& b) { return a = a * b; }

namespace {

Var apply(const Var& a, double value, double da) {
  return a.is_constant() ? Var(value) : a.tape()->unary(a, value, da);
}

}  // namespace

Var tanh(const Var& a) {
  const double y = std::tanh(a.value());
  return apply(a, y, 1.0 - y * y);
}

Var sin(const Var& a) { return apply(a, std::sin(a.value()), std::cos(a.value())); }
Var cos(const Var& a) { return apply(a, std::cos(a.value()), -std::sin(a.value())); }

Var exp(const Var& a) {
  const double y = std::exp(a.value());
  return apply(a, y, y);
}

Var log(const Var& a) { return apply(a, std::log(a.value()), 1.0 / a.value()); }

Var sqrt(const Var& a) {
  const double y = std::sqrt(a.value());
  return apply(a, y, 0.5 / y);
}

Var pow(const Var& a, double p) {
  return apply(a, std::pow(a.value(), p), p * std::pow(a.value(), p - 1.0));
}

Var softplus(const Var& a) { return apply(a, softplus(a.value()), sigmoid(a.value())); }

Var sigmoid(const Var& a) {
  const double s = sigmoid(a.value());
  return apply(a, s, s * (1.0 - s));
}

Var relu(const Var& a) {
  return a.value() > 0.0 ? apply(a, a.value(), 1.0) : Var(0.0);
}

}  // namespace harvest::autodiff
