// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "mvsr/core/dtype.hpp"
#include "mvsr/core/ops.hpp"
#include "mvsr/core/parallel.hpp"
#include "mvsr/core/tape.hpp"
#include "mvsr/core/tensor.hpp"

namespace mvsr {
namespace detail {

inline void record_op(const char* name, std::vector<Tensor> ins, std::vector<Tensor> outs,
                      std::function<void(const OpRecord&)> bw) {
  for (Tensor& o : outs) o.set_on_graph(true);
  Tape::active()->record(OpRecord{name, std::move(ins), std::move(outs), std::move(bw)});
}

// grad(t) += g, elementwise over flat buffers of equal length.
inline void accum(Tensor t, const Storage& g) {
  t.ensure_grad();
  Storage* dst = t.grad_storage();
  dispatch(t.dtype(), [&]<class T>(T) {
    T* d = dst->data<T>();
    const T* s = g.data<T>();
    for (int64_t i = 0, n = t.numel(); i < n; ++i) d[i] += s[i];
  });
}

// Broadcast plan for a binary elementwise op: element strides per input
// (0 along broadcast axes) plus the output shape.
struct BcastPlan {
  Shape out_shape;
  std::vector<int64_t> dims;        // output extents
  std::vector<int64_t> sa, sb;      // strides into a and b
  int64_t numel = 1;
};

inline BcastPlan broadcast_plan(const Shape& a, const Shape& b) {
  BcastPlan p;
  const int ra = (int)a.size(), rb = (int)b.size();
  const int r = std::max(ra, rb);
  p.dims.resize((size_t)r);
  p.sa.resize((size_t)r);
  p.sb.resize((size_t)r);
  // right-aligned extents
  std::vector<int64_t> ea((size_t)r, 1), eb((size_t)r, 1);
  for (int i = 0; i < ra; ++i) ea[(size_t)(r - ra + i)] = a[(size_t)i];
  for (int i = 0; i < rb; ++i) eb[(size_t)(r - rb + i)] = b[(size_t)i];
  for (int i = 0; i < r; ++i) {
    check(ea[(size_t)i] == eb[(size_t)i] || ea[(size_t)i] == 1 || eb[(size_t)i] == 1,
          cat("shapes not broadcastable: ", shape_str(a), " vs ", shape_str(b)));
    p.dims[(size_t)i] = std::max(ea[(size_t)i], eb[(size_t)i]);
    p.numel *= p.dims[(size_t)i];
  }
  // contiguous row-major strides of the (right-aligned) inputs
  int64_t acc = 1;
  for (int i = r - 1; i >= 0; --i) {
    p.sa[(size_t)i] = (ea[(size_t)i] == 1) ? 0 : acc;
    acc *= ea[(size_t)i];
  }
  acc = 1;
  for (int i = r - 1; i >= 0; --i) {
    p.sb[(size_t)i] = (eb[(size_t)i] == 1) ? 0 : acc;
    acc *= eb[(size_t)i];
  }
  p.out_shape = p.dims;
  return p;
}

// Odometer walk over the broadcast output; f(out_index, a_index, b_index).
template <class F>
void bcast_walk(const BcastPlan& p, F f) {
  const int r = (int)p.dims.size();
  std::vector<int64_t> idx((size_t)r, 0);
  int64_t ia = 0, ib = 0;
  for (int64_t o = 0; o < p.numel; ++o) {
    f(o, ia, ib);
    for (int d = r - 1; d >= 0; --d) {
      idx[(size_t)d]++;
      ia += p.sa[(size_t)d];
      ib += p.sb[(size_t)d];
      if (idx[(size_t)d] < p.dims[(size_t)d]) break;
      ia -= p.sa[(size_t)d] * p.dims[(size_t)d];
      ib -= p.sb[(size_t)d] * p.dims[(size_t)d];
      idx[(size_t)d] = 0;
    }
  }
}

template <class Fwd, class Dfdx>
Tensor pointwise_unary(const char* name, const Tensor& x, Fwd fwd, Dfdx dfdx) {
  Tensor y = Tensor::zeros(x.shape(), x.dtype());
  dispatch(x.dtype(), [&]<class T>(T) {
    const T* px = x.data<T>();
    T* py = y.data<T>();
    parallel_for(
        x.numel(),
        [&](int64_t b, int64_t e) {
          for (int64_t i = b; i < e; ++i) py[i] = (T)fwd((double)px[i]);
        },
        1 << 14);
  });
  if (recording({x})) {
    record_op(name, {x}, {y}, [dfdx](const OpRecord& r) {
      Tensor x = r.inputs[0];
      Tensor y = r.outputs[0];
      if (!y.has_grad() || !x.needs_grad()) return;
      x.ensure_grad();
      dispatch(x.dtype(), [&]<class T>(T) {
        const T* px = x.data<T>();
        const T* py = y.data<T>();
        const T* gy = y.grad_storage()->data<T>();
        T* gx = x.grad_storage()->data<T>();
        for (int64_t i = 0, n = x.numel(); i < n; ++i)
          gx[i] += (T)(gy[i] * dfdx((double)px[i], (double)py[i]));
      });
    });
  }
  return y;
}

// Row-major GEMM: c (+)= op_a(a) * op_b(b). Defined in ops_matmul.cpp.
template <class T>
void gemm(const T* a, int64_t ra, int64_t ca, bool ta, const T* b, int64_t rb, int64_t cb,
          bool tb, T* c, bool accumulate);

}  // namespace detail
}  // namespace mvsr
