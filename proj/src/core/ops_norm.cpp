// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "ops_internal.hpp"

namespace mvsr {

using detail::record_op;

Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                  Tensor running_mean, Tensor running_var, bool training, double momentum,
                  double eps) {
  check(input.rank() >= 2, "batch_norm: input must have a channel axis");
  const int64_t N = input.dim(0), C = input.dim(1);
  int64_t spatial = 1;
  for (int i = 2; i < input.rank(); ++i) spatial *= input.dim(i);
  check(gamma.rank() == 1 && gamma.dim(0) == C && beta.rank() == 1 && beta.dim(0) == C,
        cat("batch_norm: gamma/beta must be [", C, "]"));
  check(running_mean.dim(0) == C && running_var.dim(0) == C,
        "batch_norm: running stats must be [C]");
  const int64_t count = N * spatial;
  if (training) check(count > 1, "batch_norm: training mode needs > 1 element per channel");

  std::vector<double> mu((size_t)C), inv_std((size_t)C);
  if (training) {
    dispatch(input.dtype(), [&]<class T>(T) {
      const T* px = input.data<T>();
      for (int64_t c = 0; c < C; ++c) {
        double s = 0, s2 = 0;
        for (int64_t n = 0; n < N; ++n) {
          const T* row = px + (n * C + c) * spatial;
          for (int64_t i = 0; i < spatial; ++i) {
            const double v = (double)row[i];
            s += v;
            s2 += v * v;
          }
        }
        const double m = s / (double)count;
        const double var = std::max(0.0, s2 / (double)count - m * m);
        mu[(size_t)c] = m;
        inv_std[(size_t)c] = 1.0 / std::sqrt(var + eps);
        running_mean.set(c, (1.0 - momentum) * running_mean.get(c) + momentum * m);
        running_var.set(c, (1.0 - momentum) * running_var.get(c) + momentum * var);
      }
    });
  } else {
    for (int64_t c = 0; c < C; ++c) {
      mu[(size_t)c] = running_mean.get(c);
      inv_std[(size_t)c] = 1.0 / std::sqrt(running_var.get(c) + eps);
    }
  }

  Tensor y = Tensor::zeros(input.shape(), input.dtype());
  dispatch(input.dtype(), [&]<class T>(T) {
    const T* px = input.data<T>();
    T* py = y.data<T>();
    parallel_for(N * C, [&](int64_t lo, int64_t hi) {
      for (int64_t nc = lo; nc < hi; ++nc) {
        const int64_t c = nc % C;
        const double g = gamma.get(c), b = beta.get(c);
        const double m = mu[(size_t)c], is = inv_std[(size_t)c];
        const T* row = px + nc * spatial;
        T* out = py + nc * spatial;
        for (int64_t i = 0; i < spatial; ++i) out[i] = (T)(((double)row[i] - m) * is * g + b);
      }
    }, 1);
  });

  if (recording({input, gamma, beta})) {
    record_op("batch_norm", {input, gamma, beta}, {y},
              [N, C, spatial, count, mu, inv_std, training](const OpRecord& r) {
                Tensor input = r.inputs[0], gamma = r.inputs[1], beta = r.inputs[2];
                Tensor y = r.outputs[0];
                if (!y.has_grad()) return;
                dispatch(input.dtype(), [&]<class T>(T) {
                  const T* px = input.data<T>();
                  const T* gy = y.grad_storage()->data<T>();
                  for (int64_t c = 0; c < C; ++c) {
                    const double m = mu[(size_t)c], is = inv_std[(size_t)c];
                    double sum_gy = 0, sum_gy_xhat = 0;
                    for (int64_t n = 0; n < N; ++n) {
                      const int64_t base = (n * C + c) * spatial;
                      for (int64_t i = 0; i < spatial; ++i) {
                        const double g = (double)gy[base + i];
                        sum_gy += g;
                        sum_gy_xhat += g * ((double)px[base + i] - m) * is;
                      }
                    }
                    if (beta.needs_grad()) {
                      beta.ensure_grad();
                      beta.grad_storage()->set(c, beta.grad_storage()->get(c) + sum_gy);
                    }
                    if (gamma.needs_grad()) {
                      gamma.ensure_grad();
                      gamma.grad_storage()->set(c, gamma.grad_storage()->get(c) + sum_gy_xhat);
                    }
                    if (input.needs_grad()) {
                      input.ensure_grad();
                      T* gx = input.grad_storage()->data<T>();
                      const double gsc = gamma.get(c) * is;
                      const double mean_gy = sum_gy / (double)count;
                      const double mean_gy_xhat = sum_gy_xhat / (double)count;
                      for (int64_t n = 0; n < N; ++n) {
                        const int64_t base = (n * C + c) * spatial;
                        for (int64_t i = 0; i < spatial; ++i) {
                          const double g = (double)gy[base + i];
                          if (training) {
                            const double xhat = ((double)px[base + i] - m) * is;
                            gx[base + i] += (T)(gsc * (g - mean_gy - xhat * mean_gy_xhat));
                          } else {
                            gx[base + i] += (T)(gsc * g);
                          }
                        }
                      }
                    }
                  }
                });
              });
  }
  return y;
}

}  // namespace mvsr
