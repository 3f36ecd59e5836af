// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/core/tape.hpp"

namespace mvsr {

namespace {
thread_local Tape* g_active = nullptr;
}

Tape::Tape() {
  prev_ = g_active;
  g_active = this;
}

Tape::~Tape() { g_active = prev_; }

Tape* Tape::active() { return g_active; }

void Tape::backward(const Tensor& loss) {
  check(loss.defined() && loss.numel() == 1,
        cat("backward requires a scalar loss, got ",
            loss.defined() ? shape_str(loss.shape()) : std::string("undefined")));
  check(!walked_, "tape already backward-walked");
  walked_ = true;
  const_cast<Tensor&>(loss).ensure_grad();
  loss.grad_storage()->fill(1.0);
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    bool any_out_grad = false;
    for (const Tensor& o : it->outputs)
      if (o.has_grad()) any_out_grad = true;
    if (any_out_grad) it->backward(*it);
  }
}

bool recording(std::initializer_list<Tensor> inputs) {
  if (!Tape::active()) return false;
  for (const Tensor& t : inputs)
    if (t.defined() && t.needs_grad()) return true;
  return false;
}

}  // namespace mvsr
