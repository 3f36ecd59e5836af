// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace mvsr {

enum class Dtype : uint8_t { F32 = 0, F64 = 1 };

inline const char* dtype_name(Dtype d) { return d == Dtype::F32 ? "f32" : "f64"; }
inline int dtype_size(Dtype d) { return d == Dtype::F32 ? 4 : 8; }

// Runs f with a value of the scalar type selected by dt. Kernels are written
// once as templated lambdas and instantiated for both widths.
template <class F>
decltype(auto) dispatch(Dtype dt, F&& f) {
  if (dt == Dtype::F64) return f(double{});
  return f(float{});
}

}  // namespace mvsr
