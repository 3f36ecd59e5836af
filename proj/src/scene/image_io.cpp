// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "mvsr/scene/image.hpp"

namespace mvsr {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  check(fp != nullptr, cat("cannot open ", path));
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  check(png != nullptr, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(cat("libpng failed reading ", path));
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  Image img((int)w, (int)h);
  std::vector<png_byte> row(w * 3);
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.at((int)y, (int)x, c) = row[x * 3 + (png_uint_32)c] / 255.0;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::string& path, const Image& img) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  check(fp != nullptr, cat("cannot open ", path, " for writing"));
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  check(png != nullptr, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(cat("libpng failed writing ", path));
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, (png_uint_32)img.width, (png_uint_32)img.height, 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row((size_t)img.width * 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = std::min(1.0, std::max(0.0, img.at(y, x, c)));
        row[(size_t)(x * 3 + c)] = (png_byte)std::lround(v * 255.0);
      }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Plane read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), cat("cannot open ", path));
  std::string tag;
  in >> tag;
  check(tag == "Pf", cat(path, ": only grayscale Pf supported, got '", tag, "'"));
  int w = 0, h = 0;
  double scale = 0;
  in >> w >> h >> scale;
  check(w > 0 && h > 0, cat(path, ": bad PFM dims"));
  check(scale < 0, cat(path, ": only little-endian PFM supported"));
  in.get();  // single whitespace before payload
  Plane p(w, h);
  std::vector<float> row((size_t)w);
  for (int y = h - 1; y >= 0; --y) {  // bottom-up scanlines
    in.read(reinterpret_cast<char*>(row.data()), (std::streamsize)(4 * (size_t)w));
    check(in.good(), cat(path, ": truncated PFM"));
    for (int x = 0; x < w; ++x) p.at(y, x) = row[(size_t)x];
  }
  return p;
}

void write_pfm(const std::string& path, const Plane& plane) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check(out.good(), cat("cannot open ", path, " for writing"));
  out << "Pf\n" << plane.width << " " << plane.height << "\n-1.0\n";
  std::vector<float> row((size_t)plane.width);
  for (int y = plane.height - 1; y >= 0; --y) {
    for (int x = 0; x < plane.width; ++x) row[(size_t)x] = (float)plane.at(y, x);
    out.write(reinterpret_cast<const char*>(row.data()), (std::streamsize)(4 * (size_t)plane.width));
  }
  check(out.good(), cat("write failed for ", path));
}

Tensor image_to_tensor(const Image& img, Dtype dt) {
  Tensor t = Tensor::zeros({3, img.height, img.width}, dt);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        t.set(((int64_t)c * img.height + y) * img.width + x, img.at(y, x, c));
  return t;
}

Image tensor_to_image(const Tensor& t) {
  check(t.rank() == 3 && t.dim(0) == 3, cat("tensor_to_image expects [3,H,W], got ",
                                            shape_str(t.shape())));
  Image img((int)t.dim(2), (int)t.dim(1));
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        img.at(y, x, c) = t.get(((int64_t)c * img.height + y) * img.width + x);
  return img;
}

}  // namespace mvsr
