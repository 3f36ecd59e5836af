// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/core/tensor.hpp"

#include <algorithm>
#include <cstring>

namespace mvsr {

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

std::shared_ptr<Storage> Storage::make(Dtype dt, int64_t n) {
  auto s = std::make_shared<Storage>();
  s->dtype = dt;
  if (dt == Dtype::F32)
    s->f32.assign((size_t)n, 0.0f);
  else
    s->f64.assign((size_t)n, 0.0);
  return s;
}

void Storage::fill(double v) {
  if (dtype == Dtype::F32)
    std::fill(f32.begin(), f32.end(), (float)v);
  else
    std::fill(f64.begin(), f64.end(), v);
}

Tensor Tensor::zeros(Shape shape, Dtype dt, bool requires_grad) {
  for (int64_t d : shape) check(d > 0, cat("non-positive extent in shape ", shape_str(shape)));
  auto node = std::make_shared<TensorNode>();
  node->store = Storage::make(dt, shape_numel(shape));
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(node);
}

Tensor Tensor::zeros_like(const Tensor& t) { return zeros(t.shape(), t.dtype()); }

Tensor Tensor::full(Shape shape, double v, Dtype dt) {
  Tensor t = zeros(std::move(shape), dt);
  t.fill(v);
  return t;
}

Tensor Tensor::scalar(double v, Dtype dt) { return full({1}, v, dt); }

Tensor Tensor::from_span(Shape shape, std::span<const double> vals, Dtype dt) {
  check((int64_t)vals.size() == shape_numel(shape),
        cat("from_span: ", vals.size(), " values for shape ", shape_str(shape)));
  Tensor t = zeros(std::move(shape), dt);
  for (int64_t i = 0; i < t.numel(); ++i) t.set(i, vals[(size_t)i]);
  return t;
}

void Tensor::ensure_grad() {
  if (!node_->grad) node_->grad = Storage::make(dtype(), numel());
}

Tensor Tensor::grad() {
  ensure_grad();
  auto node = std::make_shared<TensorNode>();
  node->shape = shape();
  node->store = node_->grad;
  return Tensor(node);
}

Tensor Tensor::reshape(Shape s) const {
  check(shape_numel(s) == numel(),
        cat("reshape ", shape_str(shape()), " -> ", shape_str(s), ": element count differs"));
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(s);
  node->store = node_->store;
  node->requires_grad = node_->requires_grad;
  node->on_graph = node_->on_graph;
  return Tensor(node);
}

Tensor Tensor::clone() const {
  Tensor t = zeros(shape(), dtype());
  if (dtype() == Dtype::F32)
    t.node()->store->f32 = node_->store->f32;
  else
    t.node()->store->f64 = node_->store->f64;
  return t;
}

Tensor Tensor::astype(Dtype dt) const {
  if (dt == dtype()) return clone();
  Tensor t = zeros(shape(), dt);
  for (int64_t i = 0; i < numel(); ++i) t.set(i, get(i));
  return t;
}

std::vector<double> Tensor::to_vector() const {
  std::vector<double> v((size_t)numel());
  for (int64_t i = 0; i < numel(); ++i) v[(size_t)i] = get(i);
  return v;
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape() == b.shape(); }

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  if (!same_shape(a, b) || a.dtype() != b.dtype()) return false;
  if (a.dtype() == Dtype::F32)
    return std::memcmp(a.data<float>(), b.data<float>(), sizeof(float) * (size_t)a.numel()) == 0;
  return std::memcmp(a.data<double>(), b.data<double>(), sizeof(double) * (size_t)a.numel()) == 0;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  check(same_shape(a, b), cat("max_abs_diff shape mismatch ", shape_str(a.shape()), " vs ",
                              shape_str(b.shape())));
  double m = 0;
  for (int64_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a.get(i) - b.get(i)));
  return m;
}

}  // namespace mvsr
