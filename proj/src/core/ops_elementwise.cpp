// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "ops_internal.hpp"

namespace mvsr {

using detail::accum;
using detail::bcast_walk;
using detail::broadcast_plan;
using detail::pointwise_unary;
using detail::record_op;

namespace {

enum class BinKind { Add, Sub, Mul };

Tensor binary_op(const char* name, BinKind kind, const Tensor& a, const Tensor& b) {
  check(a.dtype() == b.dtype(), cat(name, ": dtype mismatch"));
  // Fast path: identical shapes.
  if (same_shape(a, b)) {
    Tensor y = Tensor::zeros(a.shape(), a.dtype());
    dispatch(a.dtype(), [&]<class T>(T) {
      const T* pa = a.data<T>();
      const T* pb = b.data<T>();
      T* py = y.data<T>();
      parallel_for(
          a.numel(),
          [&](int64_t lo, int64_t hi) {
            switch (kind) {
              case BinKind::Add:
                for (int64_t i = lo; i < hi; ++i) py[i] = pa[i] + pb[i];
                break;
              case BinKind::Sub:
                for (int64_t i = lo; i < hi; ++i) py[i] = pa[i] - pb[i];
                break;
              case BinKind::Mul:
                for (int64_t i = lo; i < hi; ++i) py[i] = pa[i] * pb[i];
                break;
            }
          },
          1 << 14);
    });
    if (recording({a, b})) {
      record_op(name, {a, b}, {y}, [kind](const OpRecord& r) {
        Tensor a = r.inputs[0], b = r.inputs[1], y = r.outputs[0];
        if (!y.has_grad()) return;
        dispatch(a.dtype(), [&]<class T>(T) {
          const T* gy = y.grad_storage()->data<T>();
          const int64_t n = a.numel();
          if (a.needs_grad()) {
            a.ensure_grad();
            T* ga = a.grad_storage()->data<T>();
            const T* pb = b.data<T>();
            for (int64_t i = 0; i < n; ++i)
              ga[i] += kind == BinKind::Mul ? gy[i] * pb[i] : gy[i];
          }
          if (b.needs_grad()) {
            b.ensure_grad();
            T* gb = b.grad_storage()->data<T>();
            const T* pa = a.data<T>();
            for (int64_t i = 0; i < n; ++i)
              gb[i] += kind == BinKind::Mul  ? gy[i] * pa[i]
                       : kind == BinKind::Sub ? -gy[i]
                                               : gy[i];
          }
        });
      });
    }
    return y;
  }

  // General broadcasting path.
  auto plan = broadcast_plan(a.shape(), b.shape());
  Tensor y = Tensor::zeros(plan.out_shape, a.dtype());
  dispatch(a.dtype(), [&]<class T>(T) {
    const T* pa = a.data<T>();
    const T* pb = b.data<T>();
    T* py = y.data<T>();
    bcast_walk(plan, [&](int64_t o, int64_t ia, int64_t ib) {
      switch (kind) {
        case BinKind::Add: py[o] = pa[ia] + pb[ib]; break;
        case BinKind::Sub: py[o] = pa[ia] - pb[ib]; break;
        case BinKind::Mul: py[o] = pa[ia] * pb[ib]; break;
      }
    });
  });
  if (recording({a, b})) {
    record_op(name, {a, b}, {y}, [kind, plan](const OpRecord& r) {
      Tensor a = r.inputs[0], b = r.inputs[1], y = r.outputs[0];
      if (!y.has_grad()) return;
      dispatch(a.dtype(), [&]<class T>(T) {
        const T* gy = y.grad_storage()->data<T>();
        const T* pa = a.data<T>();
        const T* pb = b.data<T>();
        T* ga = nullptr;
        T* gb = nullptr;
        if (a.needs_grad()) {
          a.ensure_grad();
          ga = a.grad_storage()->data<T>();
        }
        if (b.needs_grad()) {
          b.ensure_grad();
          gb = b.grad_storage()->data<T>();
        }
        bcast_walk(plan, [&](int64_t o, int64_t ia, int64_t ib) {
          if (ga) ga[ia] += kind == BinKind::Mul ? gy[o] * pb[ib] : gy[o];
          if (gb)
            gb[ib] += kind == BinKind::Mul  ? gy[o] * pa[ia]
                      : kind == BinKind::Sub ? -gy[o]
                                              : gy[o];
        });
      });
    });
  }
  return y;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary_op("add", BinKind::Add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary_op("sub", BinKind::Sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary_op("mul", BinKind::Mul, a, b); }

Tensor neg(const Tensor& x) {
  return pointwise_unary(
      "neg", x, [](double v) { return -v; }, [](double, double) { return -1.0; });
}

Tensor scale(const Tensor& x, double s) {
  return pointwise_unary(
      "scale", x, [s](double v) { return s * v; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& x, double s) {
  return pointwise_unary(
      "add_scalar", x, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Tensor relu(const Tensor& x) {
  return pointwise_unary(
      "relu", x, [](double v) { return v > 0 ? v : 0.0; },
      [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

namespace {
double sigmoid_stable(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}
}  // namespace

Tensor sigmoid(const Tensor& x) {
  return pointwise_unary(
      "sigmoid", x, sigmoid_stable, [](double, double y) { return y * (1.0 - y); });
}

Tensor softplus(const Tensor& x) {
  return pointwise_unary(
      "softplus", x,
      [](double v) {
        if (v > 30.0) return v + std::exp(-v);
        if (v < -30.0) return std::exp(v);
        return std::log1p(std::exp(v));
      },
      [](double v, double) { return sigmoid_stable(v); });
}

Tensor exp(const Tensor& x) {
  return pointwise_unary(
      "exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor sin(const Tensor& x) {
  return pointwise_unary(
      "sin", x, [](double v) { return std::sin(v); },
      [](double v, double) { return std::cos(v); });
}

Tensor cos(const Tensor& x) {
  return pointwise_unary(
      "cos", x, [](double v) { return std::cos(v); },
      [](double v, double) { return -std::sin(v); });
}

Tensor sum(const Tensor& x) {
  Tensor y = Tensor::zeros({1}, x.dtype());
  double acc = 0;
  for (int64_t i = 0, n = x.numel(); i < n; ++i) acc += x.get(i);
  y.set(0, acc);
  if (recording({x})) {
    record_op("sum", {x}, {y}, [](const OpRecord& r) {
      Tensor x = r.inputs[0], y = r.outputs[0];
      if (!y.has_grad() || !x.needs_grad()) return;
      x.ensure_grad();
      const double g = y.grad_storage()->get(0);
      dispatch(x.dtype(), [&]<class T>(T) {
        T* gx = x.grad_storage()->data<T>();
        for (int64_t i = 0, n = x.numel(); i < n; ++i) gx[i] += (T)g;
      });
    });
  }
  return y;
}

Tensor mean(const Tensor& x) {
  const double inv = 1.0 / (double)x.numel();
  Tensor s = sum(x);
  return scale(s, inv);
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  check(!parts.empty(), "concat of zero tensors");
  const int r = parts[0].rank();
  check(axis >= 0 && axis < r, cat("concat axis ", axis, " out of range for rank ", r));
  Shape out_shape = parts[0].shape();
  int64_t axis_total = 0;
  for (const Tensor& p : parts) {
    check(p.rank() == r && p.dtype() == parts[0].dtype(), "concat: incompatible parts");
    for (int i = 0; i < r; ++i)
      if (i != axis)
        check(p.dim(i) == out_shape[(size_t)i],
              cat("concat: extent mismatch at dim ", i, ": ", shape_str(p.shape()), " vs ",
                  shape_str(parts[0].shape())));
    axis_total += p.dim(axis);
  }
  out_shape[(size_t)axis] = axis_total;
  Tensor y = Tensor::zeros(out_shape, parts[0].dtype());

  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= out_shape[(size_t)i];
  for (int i = axis + 1; i < r; ++i) inner *= out_shape[(size_t)i];

  dispatch(y.dtype(), [&]<class T>(T) {
    T* py = y.data<T>();
    int64_t offset = 0;  // along the axis
    for (const Tensor& p : parts) {
      const T* pp = p.data<T>();
      const int64_t pa = p.dim(axis);
      for (int64_t o = 0; o < outer; ++o)
        std::memcpy(py + (o * axis_total + offset) * inner, pp + o * pa * inner,
                    sizeof(T) * (size_t)(pa * inner));
      offset += pa;
    }
  });

  bool any_grad = false;
  for (const Tensor& p : parts)
    if (recording({p})) any_grad = true;
  if (any_grad) {
    record_op("concat", parts, {y}, [axis, outer, inner, axis_total](const OpRecord& r) {
      Tensor y = r.outputs[0];
      if (!y.has_grad()) return;
      dispatch(y.dtype(), [&]<class T>(T) {
        const T* gy = y.grad_storage()->data<T>();
        int64_t offset = 0;
        for (Tensor p : r.inputs) {
          const int64_t pa = p.dim(axis);
          if (p.needs_grad()) {
            p.ensure_grad();
            T* gp = p.grad_storage()->data<T>();
            for (int64_t o = 0; o < outer; ++o) {
              const T* src = gy + (o * axis_total + offset) * inner;
              T* dst = gp + o * pa * inner;
              for (int64_t i = 0; i < pa * inner; ++i) dst[i] += src[i];
            }
          }
          offset += pa;
        }
      });
    });
  }
  return y;
}

Tensor narrow(const Tensor& x, int axis, int64_t start, int64_t len) {
  const int r = x.rank();
  check(axis >= 0 && axis < r, cat("narrow axis ", axis, " out of range"));
  check(start >= 0 && len > 0 && start + len <= x.dim(axis),
        cat("narrow [", start, ",", start + len, ") exceeds extent ", x.dim(axis)));
  Shape out_shape = x.shape();
  out_shape[(size_t)axis] = len;
  Tensor y = Tensor::zeros(out_shape, x.dtype());

  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= x.dim(i);
  for (int i = axis + 1; i < r; ++i) inner *= x.dim(i);
  const int64_t xa = x.dim(axis);

  dispatch(x.dtype(), [&]<class T>(T) {
    const T* px = x.data<T>();
    T* py = y.data<T>();
    for (int64_t o = 0; o < outer; ++o)
      std::memcpy(py + o * len * inner, px + (o * xa + start) * inner,
                  sizeof(T) * (size_t)(len * inner));
  });
  if (recording({x})) {
    record_op("narrow", {x}, {y}, [axis, start, len, outer, inner, xa](const OpRecord& r) {
      Tensor x = r.inputs[0], y = r.outputs[0];
      if (!y.has_grad() || !x.needs_grad()) return;
      x.ensure_grad();
      dispatch(x.dtype(), [&]<class T>(T) {
        const T* gy = y.grad_storage()->data<T>();
        T* gx = x.grad_storage()->data<T>();
        for (int64_t o = 0; o < outer; ++o) {
          const T* src = gy + o * len * inner;
          T* dst = gx + (o * xa + start) * inner;
          for (int64_t i = 0; i < len * inner; ++i) dst[i] += src[i];
        }
      });
    });
  }
  return y;
}

Tensor transpose2d(const Tensor& x) {
  check(x.rank() == 2, "transpose2d expects rank 2");
  const int64_t m = x.dim(0), n = x.dim(1);
  Tensor y = Tensor::zeros({n, m}, x.dtype());
  dispatch(x.dtype(), [&]<class T>(T) {
    const T* px = x.data<T>();
    T* py = y.data<T>();
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < n; ++j) py[j * m + i] = px[i * n + j];
  });
  if (recording({x})) {
    record_op("transpose2d", {x}, {y}, [m, n](const OpRecord& r) {
      Tensor x = r.inputs[0], y = r.outputs[0];
      if (!y.has_grad() || !x.needs_grad()) return;
      x.ensure_grad();
      dispatch(x.dtype(), [&]<class T>(T) {
        const T* gy = y.grad_storage()->data<T>();
        T* gx = x.grad_storage()->data<T>();
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) gx[i * n + j] += gy[j * m + i];
      });
    });
  }
  return y;
}

Tensor reshape(const Tensor& x, Shape shape) {
  Tensor y = x.reshape(std::move(shape));
  // Reshape shares storage; a separate node keeps grads per view.
  y.set_on_graph(false);
  if (recording({x})) {
    record_op("reshape", {x}, {y}, [](const OpRecord& r) {
      Tensor x = r.inputs[0], y = r.outputs[0];
      if (!y.has_grad() || !x.needs_grad()) return;
      accum(x, *y.grad_storage());
    });
  }
  return y;
}

Tensor mse_loss(const Tensor& pred, const Tensor& truth) {
  check(same_shape(pred, truth), cat("mse_loss shape mismatch: ", shape_str(pred.shape()),
                                     " vs ", shape_str(truth.shape())));
  Tensor d = sub(pred, truth);
  return mean(mul(d, d));
}

}  // namespace mvsr
