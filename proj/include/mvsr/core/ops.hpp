// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "mvsr/core/tape.hpp"
#include "mvsr/core/tensor.hpp"

namespace mvsr {

// ---- elementwise ----------------------------------------------------------
Tensor add(const Tensor& a, const Tensor& b);  // numpy-style broadcasting
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& x);
Tensor scale(const Tensor& x, double s);
Tensor add_scalar(const Tensor& x, double s);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor sin(const Tensor& x);
Tensor cos(const Tensor& x);

// ---- reductions / structure -----------------------------------------------
Tensor sum(const Tensor& x);   // -> scalar
Tensor mean(const Tensor& x);  // -> scalar
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor transpose2d(const Tensor& x);  // [M,N] -> [N,M]
// Contiguous sub-range [start, start+len) along `axis`.
Tensor narrow(const Tensor& x, int axis, int64_t start, int64_t len);
Tensor reshape(const Tensor& x, Shape shape);

// ---- dense linear algebra ---------------------------------------------------
Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_a = false,
              bool transpose_b = false);
// y = x * W^T + b for x:[N,in], W:[out,in], b:[out] (b optional).
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// ---- convolutions -----------------------------------------------------------
// Cross-correlation. input:[N,C,H,W], kernel:[Co,C,kh,kw].
Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride, int dilation,
              int padding);
// input:[N,C,D,H,W], kernel:[Co,C,k,k,k]. Padding chosen by caller.
Tensor conv3d(const Tensor& input, const Tensor& kernel, int stride, int padding);
// Transposed (fractionally strided) convolution. kernel:[Ci,Co,k,k,k];
// padding = (k-1)/2. output_padding defaults to stride-1 per axis, which
// doubles extents at stride 2; an explicit per-axis value lets a caller hit
// the exact shape of a skip tensor.
Tensor conv_transpose3d(const Tensor& input, const Tensor& kernel, int stride,
                        std::optional<std::array<int, 3>> output_padding = std::nullopt);

// Output spatial extent of a conv axis.
int64_t conv_out_extent(int64_t in, int kernel, int stride, int dilation, int padding);
int64_t conv_transpose_out_extent(int64_t in, int kernel, int stride, int padding,
                                  int output_padding);

// ---- normalization ----------------------------------------------------------
// Per-channel batch normalization over all non-channel axes (channel axis 1).
// Training mode uses batch statistics (population variance) and updates the
// running buffers in place with the given momentum; eval mode uses the
// running buffers. gamma/beta: [C].
Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                  Tensor running_mean, Tensor running_var, bool training,
                  double momentum = 0.1, double eps = 1e-5);

// ---- grid sampling ----------------------------------------------------------
// Bilinear taps on map:[C,H,W] at coords:[K,2] given as (x,y) in pixel units.
// Out-of-range coordinates clamp to the border. Differentiable in both the
// map values and the coordinates.
Tensor sample_bilinear_2d(const Tensor& map, const Tensor& coords);
// Trilinear taps on volume:[C,D,H,W] at coords:[K,3]. Coordinate columns are
// (d,h,w) fractions in [0,1] of the grid (0 -> first voxel, 1 -> last).
// Border-clamped, differentiable in values and coords.
Tensor sample_trilinear_3d(const Tensor& volume, const Tensor& coords);

// 4x4 box-average downsampling of [C,H,W] (H,W divisible by 4).
Tensor box_downsample4(const Tensor& image);

// ---- ray compositing ---------------------------------------------------------
// Emission-absorption compositing over per-ray sample lists.
//   sigma:[R,S] densities, radiance:[R,S,3], delta:[R,S] step lengths,
//   zvals:[R,S] depth of each sample, background:[3].
// Returns {color:[R,3], alpha:[R], depth:[R]}. alpha_k = 1-exp(-sigma_k*delta_k),
// transmittance tau_k = prod_{j<k}(1-alpha_j), color = sum tau_k alpha_k r_k +
// tau_{S+1} * background, depth = sum w_k z_k / max(sum w_k, 1e-10).
// color and alpha are differentiable in sigma and radiance; depth is a
// detached diagnostic output.
struct CompositeResult {
  Tensor color;
  Tensor alpha;
  Tensor depth;
};
CompositeResult composite(const Tensor& sigma, const Tensor& radiance,
                          const Tensor& delta, const Tensor& zvals,
                          const std::array<double, 3>& background);

// ---- losses -------------------------------------------------------------------
// Mean squared error over all components.
Tensor mse_loss(const Tensor& pred, const Tensor& truth);

}  // namespace mvsr
