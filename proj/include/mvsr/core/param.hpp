// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mvsr/core/tensor.hpp"

namespace mvsr {

// A named trainable tensor plus its optimizer state.
struct Parameter {
  std::string name;
  Tensor value;   // requires_grad = true
  Tensor adam_m;  // first moment, allocated on first step
  Tensor adam_v;  // second moment
  int64_t steps = 0;
};

using ParamPtr = std::shared_ptr<Parameter>;

// Owns the parameters and persistent buffers (e.g. running statistics) of a
// model, addressable by slash-separated name paths for checkpointing.
class ParamRegistry {
 public:
  ParamPtr add(const std::string& name, Tensor init);
  Tensor add_buffer(const std::string& name, Tensor init);

  ParamPtr find(const std::string& name) const;
  const std::vector<ParamPtr>& params() const { return params_; }
  const std::vector<std::pair<std::string, Tensor>>& buffers() const { return buffers_; }

  // Parameters whose names start with the prefix.
  std::vector<ParamPtr> with_prefix(const std::string& prefix) const;

  void zero_grads();
  int64_t total_elements() const;

 private:
  std::vector<ParamPtr> params_;
  std::vector<std::pair<std::string, Tensor>> buffers_;
};

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double grad_clip = 0.0;  // global-norm clip; 0 disables
};

// One Adam update with bias correction over the given parameters; consumes
// and zeroes their gradients. Parameters without a gradient buffer are
// treated as zero-gradient (state still advances).
void adam_step(const std::vector<ParamPtr>& params, const AdamConfig& cfg);

}  // namespace mvsr
