#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace harvest::autodiff {

class ParamTape;

/// Scalar handle into a ParamTape. A default or double-constructed Var is a
/// constant and never touches a tape.
class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  ParamTape* tape() const { return tape_; }
  std::uint32_t index() const { return index_; }

 private:
  friend class ParamTape;
  Var(ParamTape* tape, std::uint32_t index, double value)
      : tape_(tape), index_(index), value_(value) {}

  ParamTape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

/// Append-only Wengert list over a flat parameter vector.
///
/// Each node keeps at most two parents with their local partials. Parameter
/// leaves remember the slot of the flat vector they stand for, so a backward
/// sweep can be folded straight into a gradient of parameter length.
/// Single-threaded; use one tape per loss evaluation.
class ParamTape {
 public:
  ParamTape() = default;
  ParamTape(const ParamTape&) = delete;
  ParamTape& operator=(const ParamTape&) = delete;

  Var parameter(std::size_t slot, double value);
  /// Registers every slot of `params` in order.
  std::vector<Var> parameters(std::span<const double> params);
  /// Differentiable leaf that is not a parameter.
  Var variable(double value);

  Var unary(const Var& a, double value, double da);
  Var binary(const Var& a, const Var& b, double value, double da, double db);

  /// Adjoint of every node for d(root)/d(node).
  std::vector<double> adjoints(const Var& root) const;

  /// Gradient of a scalar loss with respect to the flat parameter vector.
  /// Throws DimensionError unless exactly one root is given.
  std::vector<double> grad_params(std::span<const Var> roots, std::size_t param_count) const;
  std::vector<double> grad_params(const Var& root, std::size_t param_count) const;

  /// d(root)/d(leaf) for each leaf created with variable() or parameter().
  std::vector<double> gradient(const Var& root, std::span<const Var> leaves) const;

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;
  struct Node {
    std::uint32_t a = kNone;
    std::uint32_t b = kNone;
    double da = 0.0;
    double db = 0.0;
  };
  struct Slot {
    std::uint32_t node;
    std::size_t slot;
  };

  void check_owner(const Var& v) const;

  std::vector<Node> nodes_;
  std::vector<Slot> slots_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var& operator+=(Var& a, const Var& b);
Var& operator-=(Var& a, const Var& b);
Var& operator*=(Var& a, const Var& b);

Var tanh(const Var& a);
Var sin(const Var& a);
Var cos(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var sqrt(const Var& a);
Var pow(const Var& a, double p);
Var softplus(const Var& a);
Var sigmoid(const Var& a);
/// max(0, a) with derivative 0 at the kink.
Var relu(const Var& a);

}  // namespace harvest::autodiff
