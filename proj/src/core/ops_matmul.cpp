// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>

#include "ops_internal.hpp"

namespace mvsr {

using detail::record_op;

namespace {

template <class T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class T>
using CMatMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// C(+)= op_a(A) * op_b(B); A is ra x ca as stored.
template <class T>
void gemm_accum(const T* a, int64_t ra, int64_t ca, bool ta, const T* b, int64_t rb, int64_t cb,
                bool tb, T* c, bool accumulate) {
  CMatMap<T> ma(a, ra, ca), mb(b, rb, cb);
  const int64_t m = ta ? ca : ra;
  const int64_t n = tb ? rb : cb;
  MatMap<T> mc(c, m, n);
  if (!ta && !tb) {
    if (accumulate)
      mc.noalias() += ma * mb;
    else
      mc.noalias() = ma * mb;
  } else if (ta && !tb) {
    if (accumulate)
      mc.noalias() += ma.transpose() * mb;
    else
      mc.noalias() = ma.transpose() * mb;
  } else if (!ta && tb) {
    if (accumulate)
      mc.noalias() += ma * mb.transpose();
    else
      mc.noalias() = ma * mb.transpose();
  } else {
    if (accumulate)
      mc.noalias() += ma.transpose() * mb.transpose();
    else
      mc.noalias() = ma.transpose() * mb.transpose();
  }
}

}  // namespace

namespace detail {
// Exposed for the conv kernels.
template <class T>
void gemm(const T* a, int64_t ra, int64_t ca, bool ta, const T* b, int64_t rb, int64_t cb,
          bool tb, T* c, bool accumulate) {
  gemm_accum(a, ra, ca, ta, b, rb, cb, tb, c, accumulate);
}
template void gemm<float>(const float*, int64_t, int64_t, bool, const float*, int64_t, int64_t,
                          bool, float*, bool);
template void gemm<double>(const double*, int64_t, int64_t, bool, const double*, int64_t,
                           int64_t, bool, double*, bool);
}  // namespace detail

Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_a, bool transpose_b) {
  check(a.rank() == 2 && b.rank() == 2, "matmul expects rank-2 tensors");
  check(a.dtype() == b.dtype(), "matmul dtype mismatch");
  const int64_t m = transpose_a ? a.dim(1) : a.dim(0);
  const int64_t ka = transpose_a ? a.dim(0) : a.dim(1);
  const int64_t kb = transpose_b ? b.dim(1) : b.dim(0);
  const int64_t n = transpose_b ? b.dim(0) : b.dim(1);
  check(ka == kb, cat("matmul inner extents differ: ", shape_str(a.shape()),
                      (transpose_a ? "^T" : ""), " x ", shape_str(b.shape()),
                      (transpose_b ? "^T" : "")));
  Tensor y = Tensor::zeros({m, n}, a.dtype());
  dispatch(a.dtype(), [&]<class T>(T) {
    gemm_accum<T>(a.data<T>(), a.dim(0), a.dim(1), transpose_a, b.data<T>(), b.dim(0), b.dim(1),
                  transpose_b, y.data<T>(), false);
  });
  if (recording({a, b})) {
    record_op("matmul", {a, b}, {y}, [transpose_a, transpose_b](const OpRecord& r) {
      Tensor a = r.inputs[0], b = r.inputs[1], y = r.outputs[0];
      if (!y.has_grad()) return;
      dispatch(a.dtype(), [&]<class T>(T) {
        const T* g = y.grad_storage()->data<T>();
        const int64_t gr = y.dim(0), gc = y.dim(1);
        if (a.needs_grad()) {
          a.ensure_grad();
          T* ga = a.grad_storage()->data<T>();
          if (!transpose_a)  // dA = op_b(B)-consistent product with dC
            gemm_accum<T>(g, gr, gc, false, b.data<T>(), b.dim(0), b.dim(1), !transpose_b, ga,
                          true);
          else  // A used transposed: dA = op_b(B) * dC^T
            gemm_accum<T>(b.data<T>(), b.dim(0), b.dim(1), transpose_b, g, gr, gc, true, ga,
                          true);
        }
        if (b.needs_grad()) {
          b.ensure_grad();
          T* gb = b.grad_storage()->data<T>();
          if (!transpose_b)  // dB = op_a(A)^T * dC
            gemm_accum<T>(a.data<T>(), a.dim(0), a.dim(1), !transpose_a, g, gr, gc, false, gb,
                          true);
          else  // B used transposed: dB = dC^T * op_a(A)
            gemm_accum<T>(g, gr, gc, true, a.data<T>(), a.dim(0), a.dim(1), transpose_a, gb,
                          true);
        }
      });
    });
  }
  return y;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  check(x.rank() == 2 && weight.rank() == 2, "linear expects rank-2 input and weight");
  check(x.dim(1) == weight.dim(1),
        cat("linear: input width ", x.dim(1), " vs weight fan-in ", weight.dim(1)));
  Tensor y = matmul(x, weight, false, true);
  if (bias.defined()) {
    check(bias.rank() == 1 && bias.dim(0) == weight.dim(0), "linear: bad bias shape");
    y = add(y, bias);
  }
  return y;
}

}  // namespace mvsr
