// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mvsr/core/tensor.hpp"

namespace mvsr {

// RGB raster, values in [0,1], row-major top-down.
struct Image {
  int width = 0, height = 0;
  std::vector<double> rgb;  // height*width*3

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb((size_t)(w * h * 3), 0.0) {}
  double& at(int y, int x, int c) { return rgb[(size_t)((y * width + x) * 3 + c)]; }
  double at(int y, int x, int c) const { return rgb[(size_t)((y * width + x) * 3 + c)]; }
  int64_t pixels() const { return (int64_t)width * height; }
};

// Single-channel raster (depth, alpha).
struct Plane {
  int width = 0, height = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0) : width(w), height(h), v((size_t)(w * h), fill) {}
  double& at(int y, int x) { return v[(size_t)(y * width + x)]; }
  double at(int y, int x) const { return v[(size_t)(y * width + x)]; }
};

// 8-bit RGB PNG.
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& img);

// 32-bit float grayscale PFM ("Pf", little-endian, bottom-up scanlines).
Plane read_pfm(const std::string& path);
void write_pfm(const std::string& path, const Plane& plane);

// Image <-> [3,H,W] tensor.
Tensor image_to_tensor(const Image& img, Dtype dt = Dtype::F64);
Image tensor_to_image(const Tensor& t);

}  // namespace mvsr
