// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvsr/core/dtype.hpp"

namespace mvsr {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

template <class... A>
std::string cat(A&&... a) {
  std::ostringstream o;
  (o << ... << a);
  return o.str();
}

[[noreturn]] inline void fail(const std::string& msg) { throw std::invalid_argument(msg); }

inline void check(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

// Flat numeric buffer in one of the two supported widths.
struct Storage {
  Dtype dtype = Dtype::F64;
  std::vector<float> f32;
  std::vector<double> f64;

  static std::shared_ptr<Storage> make(Dtype dt, int64_t n);
  int64_t size() const { return dtype == Dtype::F32 ? (int64_t)f32.size() : (int64_t)f64.size(); }

  template <class T>
  T* data();
  template <class T>
  const T* data() const;

  double get(int64_t i) const { return dtype == Dtype::F32 ? (double)f32[i] : f64[i]; }
  void set(int64_t i, double v) {
    if (dtype == Dtype::F32)
      f32[i] = (float)v;
    else
      f64[i] = v;
  }
  void fill(double v);
};

template <>
inline float* Storage::data<float>() {
  return f32.data();
}
template <>
inline double* Storage::data<double>() {
  return f64.data();
}
template <>
inline const float* Storage::data<float>() const {
  return f32.data();
}
template <>
inline const double* Storage::data<double>() const {
  return f64.data();
}

struct TensorNode {
  Shape shape;
  std::shared_ptr<Storage> store;
  bool requires_grad = false;  // leaf flag, set by the owner of the tensor
  bool on_graph = false;       // produced by an operation recorded on a tape
  std::shared_ptr<Storage> grad;  // lazily allocated, same shape/dtype
};

// Value-semantic handle to a shared n-d array node. Tensors handed to a
// recorded operation are treated as immutable from then on.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode> n) : node_(std::move(n)) {}

  static Tensor zeros(Shape shape, Dtype dt = Dtype::F64, bool requires_grad = false);
  static Tensor zeros_like(const Tensor& t);
  static Tensor full(Shape shape, double v, Dtype dt = Dtype::F64);
  static Tensor scalar(double v, Dtype dt = Dtype::F64);
  static Tensor from_span(Shape shape, std::span<const double> vals, Dtype dt = Dtype::F64);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int rank() const { return (int)node_->shape.size(); }
  int64_t dim(int i) const { return node_->shape[i]; }
  int64_t numel() const { return node_->store->size(); }
  Dtype dtype() const { return node_->store->dtype; }

  bool requires_grad() const { return node_->requires_grad; }
  Tensor& set_requires_grad(bool b) {
    node_->requires_grad = b;
    return *this;
  }
  bool on_graph() const { return node_->on_graph; }
  void set_on_graph(bool b) { node_->on_graph = b; }
  // True when gradients must be accumulated into or propagated through this tensor.
  bool needs_grad() const { return node_->requires_grad || node_->on_graph; }

  template <class T>
  T* data() {
    return node_->store->data<T>();
  }
  template <class T>
  const T* data() const {
    return node_->store->data<T>();
  }

  double get(int64_t i) const { return node_->store->get(i); }
  void set(int64_t i, double v) { node_->store->set(i, v); }
  double item() const {
    check(numel() == 1, cat("item() on tensor of ", numel(), " elements"));
    return get(0);
  }
  void fill(double v) { node_->store->fill(v); }

  bool has_grad() const { return node_->grad != nullptr; }
  void ensure_grad();
  void zero_grad() { node_->grad.reset(); }
  // Gradient as a tensor sharing the accumulator buffer (allocates zeros on
  // first use).
  Tensor grad();
  Storage* grad_storage() const { return node_->grad.get(); }

  Tensor reshape(Shape s) const;  // shares storage
  Tensor clone() const;           // deep copy of the values (not the grad)
  Tensor astype(Dtype dt) const;

  std::vector<double> to_vector() const;

  std::shared_ptr<TensorNode> node() const { return node_; }

 private:
  std::shared_ptr<TensorNode> node_;
};

bool same_shape(const Tensor& a, const Tensor& b);
bool bitwise_equal(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace mvsr
