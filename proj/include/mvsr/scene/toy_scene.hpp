// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mvsr/geometry/camera.hpp"
#include "mvsr/scene/image.hpp"

namespace mvsr {

// Constant-density primitive inside the unit working cube. A textured
// primitive carries a checkerboard albedo; an emitter modulates its albedo
// with the viewing direction.
struct Primitive {
  enum class Kind { Box, Sphere } kind = Kind::Box;
  Eigen::Vector3d box_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d box_max = Eigen::Vector3d::Ones();
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0;
  double density = 0;
  Eigen::Vector3d albedo = Eigen::Vector3d::Ones();
  bool textured = false;
  double checker_cell = 0.1;
  Eigen::Vector3d checker_albedo = Eigen::Vector3d::Zero();
  double emitter_strength = 0;  // 0 = view-independent
  Eigen::Vector3d emitter_axis = Eigen::Vector3d::UnitZ();
};

struct ToyScene {
  std::vector<Primitive> primitives;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();
  uint64_t seed = 0;
};

struct ToySceneOptions {
  int n_views = 20;
  int width = 80;
  int height = 64;
  bool ground_plane = false;
  int min_primitives = 2;
  int max_primitives = 3;
};

struct GeneratedScene {
  ToyScene scene;
  std::vector<Camera> cameras;  // [0..2] input, [3..15] fine-tune, [16..19] test
};

// Deterministic scene + camera rig from the seed. View 0 is the reference;
// the rig faces the cube center from a partial sphere.
GeneratedScene generate_toy_scene(uint64_t seed, const ToySceneOptions& opt = {});

// Split tag of a view index under the standard 20-view rig.
const char* rig_split(int view_index, int n_views);

struct RenderedView {
  Image image;
  Plane depth;  // camera-frame z, transmittance-weighted; far where empty
  Plane alpha;
};

// Analytic renderer: exact interval intersections and closed-form
// transmittance through the piecewise-constant medium. n_quadrature bounds
// the substeps used inside textured segments (>= 1024 for oracle use);
// constant-albedo segments are integrated in closed form regardless.
RenderedView reference_render(const ToyScene& scene, const Camera& cam, int n_quadrature = 1024);

// Same evaluation for a single ray given in world coordinates; used by
// oracle cross-checks. Returns color, alpha and depth along the look axis.
void reference_ray(const ToyScene& scene, const Eigen::Vector3d& origin,
                   const Eigen::Vector3d& dir, double dz, double far_depth, int n_quadrature,
                   Eigen::Vector3d* color, double* alpha, double* depth);

// Density and direction-dependent emitted radiance of the medium at a point;
// the piecewise-constant fields the analytic renderer integrates.
double medium_density(const ToyScene& scene, const Eigen::Vector3d& p);
Eigen::Vector3d medium_radiance(const ToyScene& scene, const Eigen::Vector3d& p,
                                const Eigen::Vector3d& dir);

}  // namespace mvsr
