// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "mvsr/core/param.hpp"
#include "mvsr/core/tensor.hpp"

namespace mvsr {

// Binary tensor container (see docs/checkpoint-format.md):
//   magic "MVSC" | u32 version=1 | u8 width (4|8) | u32 entry count
//   entries: u32 name_len | name | u32 ndim | u32 dims[ndim] | payload
// Payload is little-endian IEEE floats of the flagged width. Writes go to a
// temporary file renamed into place.
void save_checkpoint(const std::string& path, const ParamRegistry& registry,
                     bool include_optimizer_state = false);

// Name -> tensor map of one checkpoint file.
std::map<std::string, Tensor> load_checkpoint(const std::string& path);

// Copies values from the file into matching registry entries (parameters and
// buffers). Missing or shape-mismatched names raise; extra entries in the
// file are ignored. Restores optimizer state when present.
void restore_registry(const std::string& path, ParamRegistry& registry);

}  // namespace mvsr
