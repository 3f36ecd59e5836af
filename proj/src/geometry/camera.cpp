// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/geometry/camera.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "mvsr/core/tensor.hpp"

namespace mvsr {

void validate_camera(const Camera& cam) {
  const Eigen::Matrix3d rtr = cam.R.transpose() * cam.R - Eigen::Matrix3d::Identity();
  check(rtr.cwiseAbs().maxCoeff() < 1e-9, "camera rotation is not orthonormal");
  check(cam.K(1, 0) == 0 && cam.K(2, 0) == 0 && cam.K(2, 1) == 0,
        "camera intrinsics must be upper-triangular");
  check(cam.K(0, 0) > 0 && cam.K(1, 1) > 0, "camera focal lengths must be positive");
  check(std::abs(cam.K(2, 2) - 1.0) < 1e-12, "K(2,2) must be 1");
  check(cam.near_z > 0 && cam.near_z < cam.far_z, "camera depth range must satisfy 0 < near < far");
}

Eigen::Matrix3d homography_at_depth(const Camera& ref, const Camera& src, double z) {
  check(z > 0, cat("homography_at_depth: depth must be positive, got ", z));
  if (src.K == ref.K && src.R == ref.R && src.t == ref.t) return Eigen::Matrix3d::Identity();
  const Eigen::Vector3d c_ref = ref.center();
  const Eigen::Vector3d c_src = src.center();
  const Eigen::Vector3d n_ref = ref.look_dir();
  Eigen::Matrix3d h = src.K * src.R *
                      (Eigen::Matrix3d::Identity() + (c_ref - c_src) * n_ref.transpose() / z) *
                      ref.R.transpose() * ref.K.inverse();
  if (std::abs(h(2, 2)) > 1e-12) h /= h(2, 2);
  return h;
}

Camera scaled_camera(const Camera& cam, double factor) {
  Camera out = cam;
  out.K.row(0) *= factor;
  out.K.row(1) *= factor;
  out.width = (int)std::llround(cam.width * factor);
  out.height = (int)std::llround(cam.height * factor);
  return out;
}

NdcPoint ndc_of(const Camera& ref, const Eigen::Vector3d& x_ref_frame) {
  const double z = x_ref_frame.z();
  check(z > 0, cat("ndc_of: point depth must be positive, got ", z));
  const Eigen::Vector3d p = ref.K * x_ref_frame;
  NdcPoint out;
  out.u = p.x() / z / (double)(ref.width - 1);
  out.v = p.y() / z / (double)(ref.height - 1);
  out.zn = (z - ref.near_z) / (ref.far_z - ref.near_z);
  return out;
}

Eigen::Vector3d ndc_inverse(const Camera& ref, const NdcPoint& p) {
  const double z = ref.near_z + p.zn * (ref.far_z - ref.near_z);
  const Eigen::Vector3d pix(p.u * (double)(ref.width - 1), p.v * (double)(ref.height - 1), 1.0);
  Eigen::Vector3d dir = ref.K.inverse() * pix;  // third component stays 1
  return z * dir;
}

RayBatch generate_rays(const Camera& ref, const Camera& target,
                       const std::vector<std::pair<double, double>>& pixels) {
  RayBatch rays;
  rays.reserve(pixels.size());
  const Eigen::Matrix3d k_inv = target.K.inverse();
  const Eigen::Vector3d origin_world = target.center();
  const Eigen::Vector3d origin_ref = ref.R * origin_world + ref.t;
  for (const auto& [px, py] : pixels) {
    Ray r;
    const Eigen::Vector3d dir_cam = k_inv * Eigen::Vector3d(px, py, 1.0);
    const Eigen::Vector3d dir_world = (target.R.transpose() * dir_cam).normalized();
    r.origin = origin_ref;
    r.dir = ref.R * dir_world;
    r.px = px;
    r.py = py;
    rays.push_back(r);
  }
  return rays;
}

Projection project_to_view(const Camera& cam, const Eigen::Vector3d& x_world) {
  const Eigen::Vector3d x = cam.R * x_world + cam.t;
  Projection out;
  out.depth = x.z();
  out.behind = x.z() <= 0;
  const double z = std::max(x.z(), 1e-12);
  const Eigen::Vector3d p = cam.K * x;
  out.u = p.x() / z;
  out.v = p.y() / z;
  return out;
}

Camera load_camera(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), cat("cannot open camera file ", path));
  Camera cam;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) in >> cam.K(r, c);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) in >> cam.R(r, c);
    in >> cam.t(r);
  }
  in >> cam.near_z >> cam.far_z;
  check(!in.fail(), cat("malformed camera file ", path));
  validate_camera(cam);
  return cam;
}

void save_camera(const std::string& path, const Camera& cam) {
  std::ofstream out(path);
  check(out.good(), cat("cannot write camera file ", path));
  out << std::setprecision(17);
  for (int r = 0; r < 3; ++r)
    out << cam.K(r, 0) << " " << cam.K(r, 1) << " " << cam.K(r, 2) << "\n";
  for (int r = 0; r < 3; ++r)
    out << cam.R(r, 0) << " " << cam.R(r, 1) << " " << cam.R(r, 2) << " " << cam.t(r) << "\n";
  out << cam.near_z << " " << cam.far_z << "\n";
  check(out.good(), cat("write failed for ", path));
}

}  // namespace mvsr
