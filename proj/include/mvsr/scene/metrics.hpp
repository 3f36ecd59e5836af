// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "mvsr/scene/image.hpp"

namespace mvsr {

// 10*log10(1/MSE) over all channels, capped at 99 dB. Inputs in [0,1].
double psnr(const Image& a, const Image& b);

// Mean local structural similarity on the channel-mean grayscale image with
// an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, L=1. Rejects
// images smaller than the window.
double ssim(const Image& a, const Image& b);

struct DepthMetrics {
  double abs_err = 0;   // mean |pred - truth| over the mask
  double acc_001 = 0;   // fraction with error < 0.01
  double acc_005 = 0;   // fraction with error < 0.05
  int64_t count = 0;    // masked pixels; 0 means not applicable
};

DepthMetrics depth_metrics(const Plane& pred, const Plane& truth, const Plane& mask);

}  // namespace mvsr
