// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/scene/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mvsr/core/tensor.hpp"

namespace mvsr {

namespace fs = std::filesystem;

std::vector<int> SceneDataset::split_indices(const std::string& split) const {
  std::vector<int> out;
  for (size_t i = 0; i < views.size(); ++i)
    if (views[i].split == split) out.push_back((int)i);
  return out;
}

SceneDataset load_scene(const std::string& dir, bool load_images) {
  SceneDataset ds;
  ds.dir = dir;
  const fs::path root(dir);
  const fs::path manifest = root / "manifest.txt";
  std::ifstream in(manifest);
  check(in.good(), cat("cannot open scene manifest ", manifest.string()));

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    SceneView v;
    ls >> v.camera_file >> v.image_file >> v.split;
    check(!ls.fail(), cat("malformed manifest line: ", line));
    ls >> v.depth_file >> v.alpha_file;
    if (v.depth_file == "-") v.depth_file.clear();
    if (v.alpha_file == "-") v.alpha_file.clear();
    check(v.split == "input" || v.split == "finetune" || v.split == "test",
          cat("unknown split tag '", v.split, "' in ", manifest.string()));
    v.camera = load_camera((root / v.camera_file).string());
    ds.views.push_back(std::move(v));
  }
  check(ds.views.size() >= 4, cat("scene needs at least 4 views, got ", ds.views.size()));
  check(ds.split_indices("input").size() == 3, "scene must tag exactly 3 input views");

  int w = -1, h = -1;
  for (auto& v : ds.views) {
    if (load_images) {
      v.image = read_png((root / v.image_file).string());
      v.image_loaded = true;
      v.camera.width = v.image.width;
      v.camera.height = v.image.height;
    } else {
      // Dims still come from the image header so cameras are usable.
      Image img = read_png((root / v.image_file).string());
      v.camera.width = img.width;
      v.camera.height = img.height;
    }
    if (w < 0) {
      w = v.camera.width;
      h = v.camera.height;
    }
    check(v.camera.width == w && v.camera.height == h, "all views must share image dimensions");
  }
  check(w % 4 == 0 && h % 4 == 0, cat("image dims must be divisible by 4, got ", w, "x", h));

  const auto inputs = ds.split_indices("input");
  for (size_t i = 0; i < inputs.size(); ++i)
    for (size_t j = i + 1; j < inputs.size(); ++j) {
      const double d = (ds.views[(size_t)inputs[i]].camera.center() -
                        ds.views[(size_t)inputs[j]].camera.center())
                           .norm();
      check(d > 1e-9, "degenerate scene: coincident input camera centers");
    }
  return ds;
}

void write_manifest(const std::string& dir, const std::vector<SceneView>& views) {
  const fs::path root(dir);
  std::ofstream out(root / "manifest.txt");
  check(out.good(), cat("cannot write manifest in ", dir));
  for (const auto& v : views) {
    out << v.camera_file << " " << v.image_file << " " << v.split << " "
        << (v.depth_file.empty() ? "-" : v.depth_file) << " "
        << (v.alpha_file.empty() ? "-" : v.alpha_file) << "\n";
  }
  check(out.good(), cat("write failed for manifest in ", dir));
}

Plane load_view_depth(const SceneDataset& ds, int view) {
  const SceneView& v = ds.views.at((size_t)view);
  check(!v.depth_file.empty(), cat("view ", view, " has no depth file"));
  return read_pfm((fs::path(ds.dir) / v.depth_file).string());
}

Plane load_view_alpha(const SceneDataset& ds, int view) {
  const SceneView& v = ds.views.at((size_t)view);
  check(!v.alpha_file.empty(), cat("view ", view, " has no alpha file"));
  return read_pfm((fs::path(ds.dir) / v.alpha_file).string());
}

}  // namespace mvsr
