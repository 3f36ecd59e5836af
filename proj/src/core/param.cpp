// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/core/param.hpp"

#include <cmath>

#include "mvsr/core/dtype.hpp"

namespace mvsr {

ParamPtr ParamRegistry::add(const std::string& name, Tensor init) {
  check(find(name) == nullptr, cat("duplicate parameter name: ", name));
  auto p = std::make_shared<Parameter>();
  p->name = name;
  p->value = std::move(init);
  p->value.set_requires_grad(true);
  params_.push_back(p);
  return p;
}

Tensor ParamRegistry::add_buffer(const std::string& name, Tensor init) {
  for (auto& [n, t] : buffers_) check(n != name, cat("duplicate buffer name: ", name));
  buffers_.emplace_back(name, init);
  return init;
}

ParamPtr ParamRegistry::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return p;
  return nullptr;
}

std::vector<ParamPtr> ParamRegistry::with_prefix(const std::string& prefix) const {
  std::vector<ParamPtr> out;
  for (const auto& p : params_)
    if (p->name.rfind(prefix, 0) == 0) out.push_back(p);
  return out;
}

void ParamRegistry::zero_grads() {
  for (const auto& p : params_) p->value.zero_grad();
}

int64_t ParamRegistry::total_elements() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p->value.numel();
  return n;
}

void adam_step(const std::vector<ParamPtr>& params, const AdamConfig& cfg) {
  double clip_scale = 1.0;
  if (cfg.grad_clip > 0) {
    double sq = 0;
    for (const auto& p : params) {
      if (!p->value.has_grad()) continue;
      const Storage* g = p->value.grad_storage();
      for (int64_t i = 0; i < p->value.numel(); ++i) {
        const double v = g->get(i);
        sq += v * v;
      }
    }
    const double norm = std::sqrt(sq);
    if (norm > cfg.grad_clip) clip_scale = cfg.grad_clip / norm;
  }

  for (const auto& p : params) {
    Tensor& val = p->value;
    if (!p->adam_m.defined()) {
      p->adam_m = Tensor::zeros(val.shape(), val.dtype());
      p->adam_v = Tensor::zeros(val.shape(), val.dtype());
    }
    p->steps += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, (double)p->steps);
    const double bc2 = 1.0 - std::pow(cfg.beta2, (double)p->steps);
    const Storage* g = val.has_grad() ? val.grad_storage() : nullptr;
    dispatch(val.dtype(), [&]<class T>(T) {
      T* pv = val.data<T>();
      T* pm = p->adam_m.data<T>();
      T* pvv = p->adam_v.data<T>();
      for (int64_t i = 0, n = val.numel(); i < n; ++i) {
        const double gi = (g ? g->get(i) : 0.0) * clip_scale;
        const double m = cfg.beta1 * (double)pm[i] + (1.0 - cfg.beta1) * gi;
        const double v = cfg.beta2 * (double)pvv[i] + (1.0 - cfg.beta2) * gi * gi;
        pm[i] = (T)m;
        pvv[i] = (T)v;
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        pv[i] = (T)((double)pv[i] - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
      }
    });
    val.zero_grad();
  }
}

}  // namespace mvsr
