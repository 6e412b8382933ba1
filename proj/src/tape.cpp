#include "pdpp/tape.hpp"

#include <algorithm>

#include "pdpp/errors.hpp"

PDPP_NAMESPACE_BEGIN

namespace {
thread_local Tape* g_active = nullptr;
}

Tape::Scope::Scope(Tape& tape) : previous_(g_active) { g_active = &tape; }
Tape::Scope::~Scope() { g_active = previous_; }

Tape* Tape::active() { return g_active; }

void Tape::push(std::string op, std::vector<Tensor> inputs, Tensor output, BackwardFn backward) {
  nodes_.push_back(Node{std::move(op), std::move(inputs), std::move(output), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward needs a one-element loss, got " +
                        (loss.defined() ? shape_string(loss.shape()) : std::string("undefined")));
  }
  const bool produced_here =
      std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.output.id() == loss.id(); });
  if (!produced_here && !loss.requires_grad()) {
    throw ContractError("loss is not reachable from this tape");
  }

  for (Node& n : nodes_) {
    if (n.output.has_grad()) n.output.zero_grad();
  }
  Tensor seed = loss;
  seed.grad()[0] += Real{1};

  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!it->output.has_grad()) continue;  // not downstream of anything reached
    it->backward();
  }
}

PDPP_NAMESPACE_END
