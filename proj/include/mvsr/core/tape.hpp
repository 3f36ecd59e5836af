// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "mvsr/core/tensor.hpp"

namespace mvsr {

struct OpRecord {
  const char* name;
  std::vector<Tensor> inputs;
  std::vector<Tensor> outputs;
  // Reads output grads, accumulates into input grads. Called exactly once.
  std::function<void(const OpRecord&)> backward;
};

// Records operations in execution order while alive. Confined to one logical
// execution context; the innermost live tape is the active one.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active();

  void record(OpRecord rec) { ops_.push_back(std::move(rec)); }
  size_t size() const { return ops_.size(); }

  // Reverse sweep from a scalar loss. Every recorded operation is visited
  // exactly once, in reverse execution order.
  void backward(const Tensor& loss);

 private:
  std::vector<OpRecord> ops_;
  Tape* prev_ = nullptr;
  bool walked_ = false;
};

// True when the active tape should record an op consuming these inputs.
bool recording(std::initializer_list<Tensor> inputs);

}  // namespace mvsr
