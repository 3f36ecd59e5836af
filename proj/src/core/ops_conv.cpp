// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
//
// Convolutions are lowered to im2col + GEMM; transposed convolution reuses
// the same column geometry from the output side.
#include "ops_internal.hpp"

namespace mvsr {

using detail::gemm;
using detail::record_op;

int64_t conv_out_extent(int64_t in, int kernel, int stride, int dilation, int padding) {
  const int64_t span = in + 2ll * padding - (int64_t)dilation * (kernel - 1) - 1;
  check(span >= 0, cat("conv: kernel span exceeds padded input (in=", in, ", k=", kernel,
                       ", d=", dilation, ", p=", padding, ")"));
  return span / stride + 1;
}

int64_t conv_transpose_out_extent(int64_t in, int kernel, int stride, int padding,
                                  int output_padding) {
  return (in - 1) * stride - 2ll * padding + kernel + output_padding;
}

namespace {

// Column geometry for one conv: maps (c,ktaps) x (output positions) to input
// positions. `in`/`out` are spatial extents, rank 2 or 3.
struct Geom {
  int rank;
  int64_t channels;
  int64_t in[3], out[3];
  int k[3];
  int stride, dilation, pad;

  int64_t taps() const {
    int64_t t = 1;
    for (int i = 0; i < rank; ++i) t *= k[i];
    return t;
  }
  int64_t in_numel() const {
    int64_t t = 1;
    for (int i = 0; i < rank; ++i) t *= in[i];
    return t;
  }
  int64_t out_numel() const {
    int64_t t = 1;
    for (int i = 0; i < rank; ++i) t *= out[i];
    return t;
  }
};

// col:[channels*taps, out_numel] <- gather from x:[channels, in...]
template <class T>
void im2col(const Geom& g, const T* x, T* col) {
  const int64_t on = g.out_numel();
  const int64_t rows = g.channels * g.taps();
  parallel_for(rows, [&](int64_t r0, int64_t r1) {
    for (int64_t row = r0; row < r1; ++row) {
      int64_t rest = row;
      int kk[3] = {0, 0, 0};
      for (int a = g.rank - 1; a >= 0; --a) {
        kk[a] = (int)(rest % g.k[a]);
        rest /= g.k[a];
      }
      const int64_t c = rest;
      const T* xc = x + c * g.in_numel();
      T* crow = col + row * on;
      if (g.rank == 2) {
        int64_t o = 0;
        for (int64_t oy = 0; oy < g.out[0]; ++oy) {
          const int64_t iy = oy * g.stride + (int64_t)kk[0] * g.dilation - g.pad;
          const bool yok = iy >= 0 && iy < g.in[0];
          for (int64_t ox = 0; ox < g.out[1]; ++ox, ++o) {
            const int64_t ix = ox * g.stride + (int64_t)kk[1] * g.dilation - g.pad;
            crow[o] = (yok && ix >= 0 && ix < g.in[1]) ? xc[iy * g.in[1] + ix] : T(0);
          }
        }
      } else {
        int64_t o = 0;
        for (int64_t oz = 0; oz < g.out[0]; ++oz) {
          const int64_t iz = oz * g.stride + (int64_t)kk[0] * g.dilation - g.pad;
          const bool zok = iz >= 0 && iz < g.in[0];
          for (int64_t oy = 0; oy < g.out[1]; ++oy) {
            const int64_t iy = oy * g.stride + (int64_t)kk[1] * g.dilation - g.pad;
            const bool yok = zok && iy >= 0 && iy < g.in[1];
            for (int64_t ox = 0; ox < g.out[2]; ++ox, ++o) {
              const int64_t ix = ox * g.stride + (int64_t)kk[2] * g.dilation - g.pad;
              crow[o] =
                  (yok && ix >= 0 && ix < g.in[2]) ? xc[(iz * g.in[1] + iy) * g.in[2] + ix] : T(0);
            }
          }
        }
      }
    }
  }, 1);
}

// x:[channels, in...] += scatter of col:[channels*taps, out_numel].
// Parallel over channels; all writes for a channel stay in its plane.
template <class T>
void col2im_add(const Geom& g, const T* col, T* x) {
  const int64_t on = g.out_numel();
  const int64_t taps = g.taps();
  parallel_for(g.channels, [&](int64_t c0, int64_t c1) {
    for (int64_t c = c0; c < c1; ++c) {
      T* xc = x + c * g.in_numel();
      for (int64_t t = 0; t < taps; ++t) {
        int64_t rest = t;
        int kk[3] = {0, 0, 0};
        for (int a = g.rank - 1; a >= 0; --a) {
          kk[a] = (int)(rest % g.k[a]);
          rest /= g.k[a];
        }
        const T* crow = col + (c * taps + t) * on;
        if (g.rank == 2) {
          int64_t o = 0;
          for (int64_t oy = 0; oy < g.out[0]; ++oy) {
            const int64_t iy = oy * g.stride + (int64_t)kk[0] * g.dilation - g.pad;
            const bool yok = iy >= 0 && iy < g.in[0];
            for (int64_t ox = 0; ox < g.out[1]; ++ox, ++o) {
              const int64_t ix = ox * g.stride + (int64_t)kk[1] * g.dilation - g.pad;
              if (yok && ix >= 0 && ix < g.in[1]) xc[iy * g.in[1] + ix] += crow[o];
            }
          }
        } else {
          int64_t o = 0;
          for (int64_t oz = 0; oz < g.out[0]; ++oz) {
            const int64_t iz = oz * g.stride + (int64_t)kk[0] * g.dilation - g.pad;
            const bool zok = iz >= 0 && iz < g.in[0];
            for (int64_t oy = 0; oy < g.out[1]; ++oy) {
              const int64_t iy = oy * g.stride + (int64_t)kk[1] * g.dilation - g.pad;
              const bool yok = zok && iy >= 0 && iy < g.in[1];
              for (int64_t ox = 0; ox < g.out[2]; ++ox, ++o) {
                const int64_t ix = ox * g.stride + (int64_t)kk[2] * g.dilation - g.pad;
                if (yok && ix >= 0 && ix < g.in[2]) xc[(iz * g.in[1] + iy) * g.in[2] + ix] += crow[o];
              }
            }
          }
        }
      }
    }
  }, 1);
}

Geom make_geom(int rank, const Shape& in_shape, const Shape& ker_shape, int stride,
               int dilation, int padding) {
  Geom g;
  g.rank = rank;
  g.channels = in_shape[1];
  for (int i = 0; i < rank; ++i) {
    g.in[i] = in_shape[(size_t)(2 + i)];
    g.k[i] = (int)ker_shape[(size_t)(2 + i)];
  }
  g.stride = stride;
  g.dilation = dilation;
  g.pad = padding;
  for (int i = 0; i < rank; ++i)
    g.out[i] = conv_out_extent(g.in[i], g.k[i], stride, dilation, padding);
  return g;
}

Tensor conv_nd(const char* name, int rank, const Tensor& input, const Tensor& kernel,
               int stride, int dilation, int padding) {
  check(input.rank() == rank + 2, cat(name, ": input must be rank ", rank + 2, ", got ",
                                      shape_str(input.shape())));
  check(kernel.rank() == rank + 2, cat(name, ": kernel must be rank ", rank + 2, ", got ",
                                       shape_str(kernel.shape())));
  check(stride >= 1 && dilation >= 1 && padding >= 0, cat(name, ": bad stride/dilation/padding"));
  check(input.dim(1) == kernel.dim(1),
        cat(name, ": input channels ", input.dim(1), " do not match kernel fan-in ",
            kernel.dim(1), " (input ", shape_str(input.shape()), ", kernel ",
            shape_str(kernel.shape()), ")"));
  check(input.dtype() == kernel.dtype(), cat(name, ": dtype mismatch"));

  const Geom g = make_geom(rank, input.shape(), kernel.shape(), stride, dilation, padding);
  const int64_t N = input.dim(0), Co = kernel.dim(0);
  Shape out_shape{N, Co};
  for (int i = 0; i < rank; ++i) out_shape.push_back(g.out[i]);
  Tensor y = Tensor::zeros(out_shape, input.dtype());

  const int64_t ck = g.channels * g.taps();
  const int64_t on = g.out_numel();
  dispatch(input.dtype(), [&]<class T>(T) {
    std::vector<T> col((size_t)(ck * on));
    for (int64_t n = 0; n < N; ++n) {
      im2col<T>(g, input.data<T>() + n * g.channels * g.in_numel(), col.data());
      gemm<T>(kernel.data<T>(), Co, ck, false, col.data(), ck, on, false,
              y.data<T>() + n * Co * on, false);
    }
  });

  if (recording({input, kernel})) {
    record_op(name, {input, kernel}, {y}, [g, N, Co, ck, on](const OpRecord& r) {
      Tensor input = r.inputs[0], kernel = r.inputs[1], y = r.outputs[0];
      if (!y.has_grad()) return;
      dispatch(input.dtype(), [&]<class T>(T) {
        const T* gy = y.grad_storage()->data<T>();
        std::vector<T> col((size_t)(ck * on));
        T* gw = nullptr;
        T* gx = nullptr;
        if (kernel.needs_grad()) {
          kernel.ensure_grad();
          gw = kernel.grad_storage()->data<T>();
        }
        if (input.needs_grad()) {
          input.ensure_grad();
          gx = input.grad_storage()->data<T>();
        }
        std::vector<T> gcol;
        if (gx) gcol.resize((size_t)(ck * on));
        for (int64_t n = 0; n < N; ++n) {
          const T* gyn = gy + n * Co * on;
          if (gw) {
            im2col<T>(g, input.data<T>() + n * g.channels * g.in_numel(), col.data());
            gemm<T>(gyn, Co, on, false, col.data(), ck, on, true, gw, true);
          }
          if (gx) {
            gemm<T>(kernel.data<T>(), Co, ck, true, gyn, Co, on, false, gcol.data(), false);
            col2im_add<T>(g, gcol.data(), gx + n * g.channels * g.in_numel());
          }
        }
      });
    });
  }
  return y;
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride, int dilation, int padding) {
  return conv_nd("conv2d", 2, input, kernel, stride, dilation, padding);
}

Tensor conv3d(const Tensor& input, const Tensor& kernel, int stride, int padding) {
  return conv_nd("conv3d", 3, input, kernel, stride, /*dilation=*/1, padding);
}

Tensor conv_transpose3d(const Tensor& input, const Tensor& kernel, int stride,
                        std::optional<std::array<int, 3>> output_padding) {
  check(input.rank() == 5, cat("conv_transpose3d: input must be rank 5, got ",
                               shape_str(input.shape())));
  check(kernel.rank() == 5, cat("conv_transpose3d: kernel must be rank 5, got ",
                                shape_str(kernel.shape())));
  check(input.dim(1) == kernel.dim(0),
        cat("conv_transpose3d: input channels ", input.dim(1), " do not match kernel ",
            shape_str(kernel.shape())));
  check(stride >= 1, "conv_transpose3d: bad stride");
  const int k = (int)kernel.dim(2);
  check(kernel.dim(3) == k && kernel.dim(4) == k, "conv_transpose3d: kernel must be cubic");
  const int pad = (k - 1) / 2;
  std::array<int, 3> op = output_padding.value_or(
      std::array<int, 3>{stride - 1, stride - 1, stride - 1});
  for (int a = 0; a < 3; ++a)
    check(op[(size_t)a] >= 0 && op[(size_t)a] < stride,
          cat("conv_transpose3d: output_padding must be in [0,stride), got ", op[(size_t)a]));

  const int64_t N = input.dim(0), Ci = input.dim(1), Co = kernel.dim(1);
  // Column geometry of the conv this operation transposes: its input is our
  // output and vice versa.
  Geom g;
  g.rank = 3;
  g.channels = Co;
  g.stride = stride;
  g.dilation = 1;
  g.pad = pad;
  for (int a = 0; a < 3; ++a) {
    g.k[a] = k;
    g.in[a] = conv_transpose_out_extent(input.dim(2 + a), k, stride, pad, op[(size_t)a]);
    g.out[a] = input.dim(2 + a);
  }
  for (int a = 0; a < 3; ++a)
    check(conv_out_extent(g.in[a], k, stride, 1, pad) == g.out[a],
          "conv_transpose3d: inconsistent output extent");

  Shape out_shape{N, Co, g.in[0], g.in[1], g.in[2]};
  Tensor y = Tensor::zeros(out_shape, input.dtype());

  const int64_t ck = Co * g.taps();     // rows of the column matrix
  const int64_t on = g.out_numel();     // equals the input spatial count
  const int64_t out_plane = g.in_numel();
  dispatch(input.dtype(), [&]<class T>(T) {
    std::vector<T> m((size_t)(ck * on));
    for (int64_t n = 0; n < N; ++n) {
      // m = kernel^T(ci -> co*taps) * x
      gemm<T>(kernel.data<T>(), Ci, ck, true, input.data<T>() + n * Ci * on, Ci, on, false,
              m.data(), false);
      col2im_add<T>(g, m.data(), y.data<T>() + n * Co * out_plane);
    }
  });

  if (recording({input, kernel})) {
    record_op("conv_transpose3d", {input, kernel}, {y},
              [g, N, Ci, Co, ck, on, out_plane](const OpRecord& r) {
                Tensor input = r.inputs[0], kernel = r.inputs[1], y = r.outputs[0];
                if (!y.has_grad()) return;
                dispatch(input.dtype(), [&]<class T>(T) {
                  const T* gy = y.grad_storage()->data<T>();
                  std::vector<T> col((size_t)(ck * on));
                  for (int64_t n = 0; n < N; ++n) {
                    im2col<T>(g, gy + n * Co * out_plane, col.data());
                    if (input.needs_grad()) {
                      input.ensure_grad();
                      // dX = kernel(ci x co*taps) * col
                      gemm<T>(kernel.data<T>(), Ci, ck, false, col.data(), ck, on, false,
                              input.grad_storage()->data<T>() + n * Ci * on, true);
                    }
                    if (kernel.needs_grad()) {
                      kernel.ensure_grad();
                      // dW = x * col^T
                      gemm<T>(input.data<T>() + n * Ci * on, Ci, on, false, col.data(), ck, on,
                              true, kernel.grad_storage()->data<T>(), true);
                    }
                  }
                });
              });
  }
  return y;
}

}  // namespace mvsr
