// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mvsr/geometry/camera.hpp"
#include "mvsr/scene/image.hpp"

namespace mvsr {

struct SceneView {
  std::string camera_file;
  std::string image_file;
  std::string split;       // input | finetune | test
  std::string depth_file;  // optional ("-" in the manifest)
  std::string alpha_file;  // optional
  Camera camera;
  Image image;
  bool image_loaded = false;
};

// One captured scene: cameras plus images listed by a plain-text manifest.
// Line format: <camera-file> <image-file> <split> [depth-file [alpha-file]].
struct SceneDataset {
  std::string dir;
  std::vector<SceneView> views;

  std::vector<int> split_indices(const std::string& split) const;
  const SceneView& reference() const { return views.at(0); }
};

SceneDataset load_scene(const std::string& dir, bool load_images = true);
void write_manifest(const std::string& dir, const std::vector<SceneView>& views);

// Truth depth/alpha for a view when present in the manifest.
Plane load_view_depth(const SceneDataset& ds, int view);
Plane load_view_alpha(const SceneDataset& ds, int view);

}  // namespace mvsr
