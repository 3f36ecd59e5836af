// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mvsr {

// Pinhole camera with world-to-camera pose: x_cam = R * x_world + t.
// Depth means the camera-frame z component throughout.
struct Camera {
  Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  double near_z = 0.1;
  double far_z = 10.0;
  int width = 0;   // pixels; filled from the paired image when loading a scene
  int height = 0;

  Eigen::Vector3d center() const { return -R.transpose() * t; }
  // Unit look-at direction in world coordinates (third row of R).
  Eigen::Vector3d look_dir() const { return R.row(2).transpose(); }
};

// Throws when R is not orthonormal (1e-9), K is not upper-triangular with
// positive focals, or the depth range is invalid.
void validate_camera(const Camera& cam);

// Plane-sweep warp: pixel p_ref at depth z in the reference frame maps to
// K_src * R_src * (I + (C_ref - C_src) n_ref^T / z) * R_ref^T * K_ref^-1 * p_ref
// where C are camera centers and n_ref the reference look-at in world
// coordinates. Normalized so H(2,2) = 1; exact identity when src == ref.
Eigen::Matrix3d homography_at_depth(const Camera& ref, const Camera& src, double z);

// Intrinsics (and pixel dims) scaled by `factor`, e.g. 0.25 for feature maps.
Camera scaled_camera(const Camera& cam, double factor);

struct NdcPoint {
  double u = 0, v = 0, zn = 0;  // all in [0,1] inside the reference frustum
};

// (u,v) = pixel / (extent-1); zn linear in depth from near (0) to far (1).
NdcPoint ndc_of(const Camera& ref, const Eigen::Vector3d& x_ref_frame);
Eigen::Vector3d ndc_inverse(const Camera& ref, const NdcPoint& p);

struct Ray {
  Eigen::Vector3d origin;  // reference camera frame
  Eigen::Vector3d dir;     // unit vector, reference camera frame
  double px = 0, py = 0;   // source pixel in the target view
  Eigen::Vector3d rgb = Eigen::Vector3d::Zero();
  bool has_rgb = false;
};
using RayBatch = std::vector<Ray>;

// Rays through the given target pixels, expressed in the reference frame.
RayBatch generate_rays(const Camera& ref, const Camera& target,
                       const std::vector<std::pair<double, double>>& pixels);

struct Projection {
  double u = 0, v = 0;  // pixel coordinates
  double depth = 0;     // camera-frame z
  bool behind = false;
};

Projection project_to_view(const Camera& cam, const Eigen::Vector3d& x_world);

// Text format: 3 rows K, 3 rows [R|t], one row "near far".
Camera load_camera(const std::string& path);
void save_camera(const std::string& path, const Camera& cam);

}  // namespace mvsr
