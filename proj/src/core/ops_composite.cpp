// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "ops_internal.hpp"

namespace mvsr {

using detail::record_op;

CompositeResult composite(const Tensor& sigma, const Tensor& radiance, const Tensor& delta,
                          const Tensor& zvals, const std::array<double, 3>& background) {
  check(sigma.rank() == 2, "composite: sigma must be [R,S]");
  const int64_t R = sigma.dim(0), S = sigma.dim(1);
  check(S >= 1, "composite: needs at least one sample per ray");
  check(radiance.rank() == 3 && radiance.dim(0) == R && radiance.dim(1) == S &&
            radiance.dim(2) == 3,
        cat("composite: radiance must be [", R, ",", S, ",3], got ",
            shape_str(radiance.shape())));
  check(same_shape(delta, sigma) && same_shape(zvals, sigma),
        "composite: delta/zvals must match sigma");

  const Dtype dt = sigma.dtype();
  Tensor color = Tensor::zeros({R, 3}, dt);
  Tensor alpha = Tensor::zeros({R}, dt);
  Tensor depth = Tensor::zeros({R}, dt);

  // Saved forward state for the backward sweep.
  auto weights = std::make_shared<std::vector<double>>((size_t)(R * S));
  auto trans = std::make_shared<std::vector<double>>((size_t)(R * (S + 1)));

  dispatch(dt, [&]<class T>(T) {
    const T* ps = sigma.data<T>();
    const T* pr = radiance.data<T>();
    const T* pd = delta.data<T>();
    const T* pz = zvals.data<T>();
    T* pc = color.data<T>();
    T* pa = alpha.data<T>();
    T* pdep = depth.data<T>();
    parallel_for(R, [&](int64_t lo, int64_t hi) {
      for (int64_t r = lo; r < hi; ++r) {
        double tau = 1.0;
        double acc[3] = {0, 0, 0};
        double wsum = 0, wz = 0;
        for (int64_t k = 0; k < S; ++k) {
          (*trans)[(size_t)(r * (S + 1) + k)] = tau;
          const double od = (double)ps[r * S + k] * (double)pd[r * S + k];
          const double e = std::exp(-od);
          const double w = tau * (1.0 - e);
          (*weights)[(size_t)(r * S + k)] = w;
          for (int c = 0; c < 3; ++c) acc[c] += w * (double)pr[(r * S + k) * 3 + c];
          wsum += w;
          wz += w * (double)pz[r * S + k];
          tau *= e;
        }
        (*trans)[(size_t)(r * (S + 1) + S)] = tau;
        for (int c = 0; c < 3; ++c) pc[r * 3 + c] = (T)(acc[c] + tau * background[(size_t)c]);
        pa[r] = (T)wsum;
        pdep[r] = (T)(wz / std::max(wsum, 1e-10));
      }
    }, 64);
  });

  if (recording({sigma, radiance})) {
    record_op("composite", {sigma, radiance, delta}, {color, alpha, depth},
              [R, S, background, weights, trans](const OpRecord& r) {
                Tensor sigma = r.inputs[0], radiance = r.inputs[1], delta = r.inputs[2];
                Tensor color = r.outputs[0], alpha = r.outputs[1];
                const bool has_gc = color.has_grad(), has_ga = alpha.has_grad();
                if (!has_gc && !has_ga) return;  // depth is a detached output
                dispatch(sigma.dtype(), [&]<class T>(T) {
                  const T* pr = radiance.data<T>();
                  const T* pd = delta.data<T>();
                  const T* gc = has_gc ? color.grad_storage()->data<T>() : nullptr;
                  const T* ga = has_ga ? alpha.grad_storage()->data<T>() : nullptr;
                  T* gs = nullptr;
                  T* gr = nullptr;
                  if (sigma.needs_grad()) {
                    sigma.ensure_grad();
                    gs = sigma.grad_storage()->data<T>();
                  }
                  if (radiance.needs_grad()) {
                    radiance.ensure_grad();
                    gr = radiance.grad_storage()->data<T>();
                  }
                  for (int64_t ray = 0; ray < R; ++ray) {
                    const double tau_end = (*trans)[(size_t)(ray * (S + 1) + S)];
                    // Suffix sums over samples after k, built by a reverse sweep.
                    double suffix[3] = {0, 0, 0};
                    double wsuffix = 0;
                    for (int64_t k = S - 1; k >= 0; --k) {
                      const double w = (*weights)[(size_t)(ray * S + k)];
                      const double tnext = (*trans)[(size_t)(ray * (S + 1) + k + 1)];
                      if (gr && gc)
                        for (int c = 0; c < 3; ++c)
                          gr[(ray * S + k) * 3 + c] += (T)((double)gc[ray * 3 + c] * w);
                      if (gs) {
                        double dsig = 0;
                        const double d = (double)pd[ray * S + k];
                        if (gc)
                          for (int c = 0; c < 3; ++c) {
                            const double drdsig =
                                d * (tnext * (double)pr[(ray * S + k) * 3 + c] - suffix[c] -
                                     tau_end * background[(size_t)c]);
                            dsig += (double)gc[ray * 3 + c] * drdsig;
                          }
                        if (ga)
                          dsig += (double)ga[ray] * d * (tnext - wsuffix);
                        gs[ray * S + k] += (T)dsig;
                      }
                      for (int c = 0; c < 3; ++c)
                        suffix[c] += w * (double)pr[(ray * S + k) * 3 + c];
                      wsuffix += w;
                    }
                  }
                });
              });
  }
  return {color, alpha, depth};
}

}  // namespace mvsr
