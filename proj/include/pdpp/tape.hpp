#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pdpp/tensor.hpp"

PDPP_NAMESPACE_BEGIN

/// Eager reverse-mode autodiff record.
///
/// While a Tape is active (see `Tape::Scope`), every primitive whose inputs
/// include a tensor with `requires_grad` appends one node. Nodes are appended
/// in execution order, so inputs always precede the node that consumes them.
/// With no active tape, primitives only compute values.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  struct Node {
    std::string op;
    std::vector<Tensor> inputs;
    Tensor output;
    BackwardFn backward;
  };

  /// Makes a tape the active recorder for the current thread until destroyed.
  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active();

  void push(std::string op, std::vector<Tensor> inputs, Tensor output, BackwardFn backward);

  /// Reverse sweep from a one-element loss. Leaf gradients accumulate across
  /// calls; intermediate gradients are reset at the start of every sweep.
  void backward(const Tensor& loss);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  void clear() { nodes_.clear(); }

 private:
  std::vector<Node> nodes_;
};

PDPP_NAMESPACE_END
