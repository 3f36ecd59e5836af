// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/scene/metrics.hpp"

#include <cmath>

namespace mvsr {

double psnr(const Image& a, const Image& b) {
  check(a.width == b.width && a.height == b.height, "psnr: image dims differ");
  check(a.width > 0, "psnr: empty image");
  double se = 0;
  const size_t n = a.rgb.size();
  for (size_t i = 0; i < n; ++i) {
    const double d = a.rgb[i] - b.rgb[i];
    se += d * d;
  }
  const double mse = se / (double)n;
  if (mse <= 0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;

std::vector<double> gaussian_kernel() {
  std::vector<double> k((size_t)kWin);
  double sum = 0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - (kWin - 1) / 2.0;
    k[(size_t)i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += k[(size_t)i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

Plane to_gray(const Image& img) {
  Plane g(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      g.at(y, x) = (img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2)) / 3.0;
  return g;
}

// Separable Gaussian filter; only positions where the window fits are used.
Plane blur_valid(const Plane& in, const std::vector<double>& k) {
  const int r = kWin / 2;
  Plane tmp(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = r; x < in.width - r; ++x) {
      double acc = 0;
      for (int i = 0; i < kWin; ++i) acc += k[(size_t)i] * in.at(y, x - r + i);
      tmp.at(y, x) = acc;
    }
  Plane out(in.width, in.height);
  for (int y = r; y < in.height - r; ++y)
    for (int x = r; x < in.width - r; ++x) {
      double acc = 0;
      for (int i = 0; i < kWin; ++i) acc += k[(size_t)i] * tmp.at(y - r + i, x);
      out.at(y, x) = acc;
    }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  check(a.width == b.width && a.height == b.height, "ssim: image dims differ");
  check(a.width >= kWin && a.height >= kWin,
        cat("ssim: images must be at least ", kWin, "x", kWin));
  const Plane ga = to_gray(a), gb = to_gray(b);
  const auto k = gaussian_kernel();

  Plane a2(a.width, a.height), b2(a.width, a.height), ab(a.width, a.height);
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      a2.at(y, x) = ga.at(y, x) * ga.at(y, x);
      b2.at(y, x) = gb.at(y, x) * gb.at(y, x);
      ab.at(y, x) = ga.at(y, x) * gb.at(y, x);
    }
  const Plane mu_a = blur_valid(ga, k), mu_b = blur_valid(gb, k);
  const Plane m_a2 = blur_valid(a2, k), m_b2 = blur_valid(b2, k), m_ab = blur_valid(ab, k);

  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;  // L = 1
  const int r = kWin / 2;
  double acc = 0;
  int64_t n = 0;
  for (int y = r; y < a.height - r; ++y)
    for (int x = r; x < a.width - r; ++x) {
      const double ma = mu_a.at(y, x), mb = mu_b.at(y, x);
      const double va = m_a2.at(y, x) - ma * ma;
      const double vb = m_b2.at(y, x) - mb * mb;
      const double cov = m_ab.at(y, x) - ma * mb;
      const double s = ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (va + vb + c2));
      acc += s;
      ++n;
    }
  return acc / (double)n;
}

DepthMetrics depth_metrics(const Plane& pred, const Plane& truth, const Plane& mask) {
  check(pred.width == truth.width && pred.height == truth.height &&
            pred.width == mask.width && pred.height == mask.height,
        "depth_metrics: dims differ");
  DepthMetrics m;
  double sum = 0;
  int64_t ok1 = 0, ok5 = 0;
  for (size_t i = 0; i < pred.v.size(); ++i) {
    if (mask.v[i] < 0.5) continue;
    const double e = std::abs(pred.v[i] - truth.v[i]);
    sum += e;
    if (e < 0.01) ++ok1;
    if (e < 0.05) ++ok5;
    ++m.count;
  }
  if (m.count > 0) {
    m.abs_err = sum / (double)m.count;
    m.acc_001 = (double)ok1 / (double)m.count;
    m.acc_005 = (double)ok5 / (double)m.count;
  }
  return m;
}

}  // namespace mvsr
