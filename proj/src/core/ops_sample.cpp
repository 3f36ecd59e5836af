// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "ops_internal.hpp"

namespace mvsr {

using detail::record_op;

namespace {

struct Tap1d {
  int64_t lo, hi;
  double frac;    // weight of hi
  bool interior;  // raw coordinate inside [0, extent-1]
};

inline Tap1d make_tap(double raw, int64_t extent) {
  Tap1d t;
  t.interior = raw >= 0.0 && raw <= (double)(extent - 1);
  double v = raw < 0.0 ? 0.0 : (raw > (double)(extent - 1) ? (double)(extent - 1) : raw);
  t.lo = (int64_t)std::floor(v);
  if (t.lo > extent - 1) t.lo = extent - 1;
  t.hi = std::min(t.lo + 1, extent - 1);
  t.frac = v - (double)t.lo;
  return t;
}

}  // namespace

Tensor sample_bilinear_2d(const Tensor& map, const Tensor& coords) {
  check(map.rank() == 3, cat("sample_bilinear_2d: map must be [C,H,W], got ",
                             shape_str(map.shape())));
  check(coords.rank() == 2 && coords.dim(1) == 2,
        cat("sample_bilinear_2d: coords must be [K,2], got ", shape_str(coords.shape())));
  check(map.dtype() == coords.dtype(), "sample_bilinear_2d: dtype mismatch");
  const int64_t C = map.dim(0), H = map.dim(1), W = map.dim(2), K = coords.dim(0);
  Tensor y = Tensor::zeros({K, C}, map.dtype());

  dispatch(map.dtype(), [&]<class T>(T) {
    const T* pm = map.data<T>();
    const T* pc = coords.data<T>();
    T* py = y.data<T>();
    parallel_for(K, [&](int64_t lo, int64_t hi) {
      for (int64_t k = lo; k < hi; ++k) {
        const Tap1d tx = make_tap((double)pc[k * 2 + 0], W);
        const Tap1d ty = make_tap((double)pc[k * 2 + 1], H);
        const double w00 = (1 - ty.frac) * (1 - tx.frac), w01 = (1 - ty.frac) * tx.frac;
        const double w10 = ty.frac * (1 - tx.frac), w11 = ty.frac * tx.frac;
        for (int64_t c = 0; c < C; ++c) {
          const T* plane = pm + c * H * W;
          py[k * C + c] = (T)(w00 * (double)plane[ty.lo * W + tx.lo] +
                              w01 * (double)plane[ty.lo * W + tx.hi] +
                              w10 * (double)plane[ty.hi * W + tx.lo] +
                              w11 * (double)plane[ty.hi * W + tx.hi]);
        }
      }
    });
  });

  if (recording({map, coords})) {
    record_op("sample_bilinear_2d", {map, coords}, {y}, [C, H, W, K](const OpRecord& r) {
      Tensor map = r.inputs[0], coords = r.inputs[1], y = r.outputs[0];
      if (!y.has_grad()) return;
      dispatch(map.dtype(), [&]<class T>(T) {
        const T* pm = map.data<T>();
        const T* pc = coords.data<T>();
        const T* gy = y.grad_storage()->data<T>();
        T* gm = nullptr;
        T* gc = nullptr;
        if (map.needs_grad()) {
          map.ensure_grad();
          gm = map.grad_storage()->data<T>();
        }
        if (coords.needs_grad()) {
          coords.ensure_grad();
          gc = coords.grad_storage()->data<T>();
        }
        for (int64_t k = 0; k < K; ++k) {
          const Tap1d tx = make_tap((double)pc[k * 2 + 0], W);
          const Tap1d ty = make_tap((double)pc[k * 2 + 1], H);
          const double w00 = (1 - ty.frac) * (1 - tx.frac), w01 = (1 - ty.frac) * tx.frac;
          const double w10 = ty.frac * (1 - tx.frac), w11 = ty.frac * tx.frac;
          double dx = 0, dy = 0;
          for (int64_t c = 0; c < C; ++c) {
            const double g = (double)gy[k * C + c];
            if (g == 0.0) continue;
            const T* plane = pm + c * H * W;
            if (gm) {
              T* gplane = gm + c * H * W;
              gplane[ty.lo * W + tx.lo] += (T)(g * w00);
              gplane[ty.lo * W + tx.hi] += (T)(g * w01);
              gplane[ty.hi * W + tx.lo] += (T)(g * w10);
              gplane[ty.hi * W + tx.hi] += (T)(g * w11);
            }
            if (gc) {
              const double v00 = (double)plane[ty.lo * W + tx.lo];
              const double v01 = (double)plane[ty.lo * W + tx.hi];
              const double v10 = (double)plane[ty.hi * W + tx.lo];
              const double v11 = (double)plane[ty.hi * W + tx.hi];
              dx += g * ((1 - ty.frac) * (v01 - v00) + ty.frac * (v11 - v10));
              dy += g * ((1 - tx.frac) * (v10 - v00) + tx.frac * (v11 - v01));
            }
          }
          if (gc) {
            // Clamped coordinates stop the gradient.
            gc[k * 2 + 0] += (T)(tx.interior ? dx : 0.0);
            gc[k * 2 + 1] += (T)(ty.interior ? dy : 0.0);
          }
        }
      });
    });
  }
  return y;
}

Tensor sample_trilinear_3d(const Tensor& volume, const Tensor& coords) {
  check(volume.rank() == 4, cat("sample_trilinear_3d: volume must be [C,D,H,W], got ",
                                shape_str(volume.shape())));
  check(coords.rank() == 2 && coords.dim(1) == 3,
        cat("sample_trilinear_3d: coords must be [K,3], got ", shape_str(coords.shape())));
  check(volume.dtype() == coords.dtype(), "sample_trilinear_3d: dtype mismatch");
  const int64_t C = volume.dim(0), D = volume.dim(1), H = volume.dim(2), W = volume.dim(3);
  const int64_t K = coords.dim(0);
  Tensor y = Tensor::zeros({K, C}, volume.dtype());

  auto taps_for = [D, H, W](const double* c3, Tap1d t[3]) {
    t[0] = make_tap(c3[0] * (double)(D - 1), D);
    t[1] = make_tap(c3[1] * (double)(H - 1), H);
    t[2] = make_tap(c3[2] * (double)(W - 1), W);
  };

  dispatch(volume.dtype(), [&]<class T>(T) {
    const T* pv = volume.data<T>();
    const T* pc = coords.data<T>();
    T* py = y.data<T>();
    parallel_for(K, [&](int64_t lo, int64_t hi) {
      for (int64_t k = lo; k < hi; ++k) {
        double c3[3] = {(double)pc[k * 3], (double)pc[k * 3 + 1], (double)pc[k * 3 + 2]};
        Tap1d t[3];
        taps_for(c3, t);
        for (int64_t c = 0; c < C; ++c) {
          const T* grid = pv + c * D * H * W;
          double acc = 0;
          for (int dz = 0; dz < 2; ++dz)
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx) {
                const double w = (dz ? t[0].frac : 1 - t[0].frac) *
                                 (dy ? t[1].frac : 1 - t[1].frac) *
                                 (dx ? t[2].frac : 1 - t[2].frac);
                const int64_t zi = dz ? t[0].hi : t[0].lo;
                const int64_t yi = dy ? t[1].hi : t[1].lo;
                const int64_t xi = dx ? t[2].hi : t[2].lo;
                acc += w * (double)grid[(zi * H + yi) * W + xi];
              }
          py[k * C + c] = (T)acc;
        }
      }
    });
  });

  if (recording({volume, coords})) {
    record_op("sample_trilinear_3d", {volume, coords}, {y}, [C, D, H, W, K](const OpRecord& r) {
      Tensor volume = r.inputs[0], coords = r.inputs[1], y = r.outputs[0];
      if (!y.has_grad()) return;
      dispatch(volume.dtype(), [&]<class T>(T) {
        const T* pv = volume.data<T>();
        const T* pc = coords.data<T>();
        const T* gy = y.grad_storage()->data<T>();
        T* gv = nullptr;
        T* gc = nullptr;
        if (volume.needs_grad()) {
          volume.ensure_grad();
          gv = volume.grad_storage()->data<T>();
        }
        if (coords.needs_grad()) {
          coords.ensure_grad();
          gc = coords.grad_storage()->data<T>();
        }
        for (int64_t k = 0; k < K; ++k) {
          Tap1d t[3];
          t[0] = make_tap((double)pc[k * 3] * (double)(D - 1), D);
          t[1] = make_tap((double)pc[k * 3 + 1] * (double)(H - 1), H);
          t[2] = make_tap((double)pc[k * 3 + 2] * (double)(W - 1), W);
          double dcoord[3] = {0, 0, 0};
          for (int64_t c = 0; c < C; ++c) {
            const double g = (double)gy[k * C + c];
            if (g == 0.0) continue;
            const T* grid = pv + c * D * H * W;
            T* ggrid = gv ? gv + c * D * H * W : nullptr;
            for (int dz = 0; dz < 2; ++dz)
              for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                  const double wz = dz ? t[0].frac : 1 - t[0].frac;
                  const double wy = dy ? t[1].frac : 1 - t[1].frac;
                  const double wx = dx ? t[2].frac : 1 - t[2].frac;
                  const int64_t zi = dz ? t[0].hi : t[0].lo;
                  const int64_t yi = dy ? t[1].hi : t[1].lo;
                  const int64_t xi = dx ? t[2].hi : t[2].lo;
                  const int64_t at = (zi * H + yi) * W + xi;
                  if (ggrid) ggrid[at] += (T)(g * wz * wy * wx);
                  if (gc) {
                    const double v = (double)grid[at];
                    dcoord[0] += g * (dz ? 1.0 : -1.0) * wy * wx * v;
                    dcoord[1] += g * wz * (dy ? 1.0 : -1.0) * wx * v;
                    dcoord[2] += g * wz * wy * (dx ? 1.0 : -1.0) * v;
                  }
                }
          }
          if (gc) {
            gc[k * 3 + 0] += (T)(t[0].interior ? dcoord[0] * (double)(D - 1) : 0.0);
            gc[k * 3 + 1] += (T)(t[1].interior ? dcoord[1] * (double)(H - 1) : 0.0);
            gc[k * 3 + 2] += (T)(t[2].interior ? dcoord[2] * (double)(W - 1) : 0.0);
          }
        }
      });
    });
  }
  return y;
}

Tensor box_downsample4(const Tensor& image) {
  check(image.rank() == 3, "box_downsample4: expects [C,H,W]");
  const int64_t C = image.dim(0), H = image.dim(1), W = image.dim(2);
  check(H % 4 == 0 && W % 4 == 0, cat("box_downsample4: dims must be divisible by 4, got ",
                                      shape_str(image.shape())));
  const int64_t Ho = H / 4, Wo = W / 4;
  Tensor y = Tensor::zeros({C, Ho, Wo}, image.dtype());
  dispatch(image.dtype(), [&]<class T>(T) {
    const T* px = image.data<T>();
    T* py = y.data<T>();
    parallel_for(C * Ho, [&](int64_t lo, int64_t hi) {
      for (int64_t row = lo; row < hi; ++row) {
        const int64_t c = row / Ho, oy = row % Ho;
        for (int64_t ox = 0; ox < Wo; ++ox) {
          double acc = 0;
          for (int64_t dy = 0; dy < 4; ++dy)
            for (int64_t dx = 0; dx < 4; ++dx)
              acc += (double)px[(c * H + oy * 4 + dy) * W + ox * 4 + dx];
          py[(c * Ho + oy) * Wo + ox] = (T)(acc / 16.0);
        }
      }
    });
  });
  if (recording({image})) {
    record_op("box_downsample4", {image}, {y}, [C, H, W, Ho, Wo](const OpRecord& r) {
      Tensor image = r.inputs[0], y = r.outputs[0];
      if (!y.has_grad() || !image.needs_grad()) return;
      image.ensure_grad();
      dispatch(image.dtype(), [&]<class T>(T) {
        const T* gy = y.grad_storage()->data<T>();
        T* gx = image.grad_storage()->data<T>();
        for (int64_t c = 0; c < C; ++c)
          for (int64_t oy = 0; oy < Ho; ++oy)
            for (int64_t ox = 0; ox < Wo; ++ox) {
              const double g = (double)gy[(c * Ho + oy) * Wo + ox] / 16.0;
              for (int64_t dy = 0; dy < 4; ++dy)
                for (int64_t dx = 0; dx < 4; ++dx)
                  gx[(c * H + oy * 4 + dy) * W + ox * 4 + dx] += (T)g;
            }
      });
    });
  }
  return y;
}

}  // namespace mvsr
