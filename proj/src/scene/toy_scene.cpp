// Copyright (c) 2026 the mvsr authors
// SPDX-License-Identifier: Apache-2.0
#include "mvsr/scene/toy_scene.hpp"

#include <algorithm>
#include <cmath>

#include "mvsr/core/rng.hpp"
#include "mvsr/core/tensor.hpp"

namespace mvsr {

namespace {

Eigen::Vector3d hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) r = c, g = x;
  else if (hp < 2) r = x, g = c;
  else if (hp < 3) g = c, b = x;
  else if (hp < 4) g = x, b = c;
  else if (hp < 5) r = x, b = c;
  else r = c, b = x;
  const double m = v - c;
  return {r + m, g + m, b + m};
}

Camera make_camera(const Eigen::Vector3d& eye, const Eigen::Vector3d& target, double focal,
                   int width, int height, double near_z, double far_z) {
  Camera cam;
  const Eigen::Vector3d fwd = (target - eye).normalized();
  const Eigen::Vector3d up_hint(0, 1, 0);
  const Eigen::Vector3d right = up_hint.cross(fwd).normalized();
  const Eigen::Vector3d down = fwd.cross(right);
  cam.R.row(0) = right;
  cam.R.row(1) = down;
  cam.R.row(2) = fwd;
  cam.t = -cam.R * eye;
  cam.K << focal, 0, (width - 1) / 2.0, 0, focal, (height - 1) / 2.0, 0, 0, 1;
  cam.width = width;
  cam.height = height;
  cam.near_z = near_z;
  cam.far_z = far_z;
  return cam;
}

// Ray/primitive intersection interval; false when the ray misses.
bool intersect(const Primitive& p, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
               double* t0, double* t1) {
  if (p.kind == Primitive::Kind::Box) {
    double lo = -1e30, hi = 1e30;
    for (int a = 0; a < 3; ++a) {
      if (std::abs(d[a]) < 1e-14) {
        if (o[a] < p.box_min[a] || o[a] > p.box_max[a]) return false;
        continue;
      }
      double ta = (p.box_min[a] - o[a]) / d[a];
      double tb = (p.box_max[a] - o[a]) / d[a];
      if (ta > tb) std::swap(ta, tb);
      lo = std::max(lo, ta);
      hi = std::min(hi, tb);
    }
    if (hi <= lo) return false;
    *t0 = lo;
    *t1 = hi;
    return true;
  }
  const Eigen::Vector3d oc = o - p.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - p.radius * p.radius;
  const double disc = b * b - c;
  if (disc <= 0) return false;
  const double s = std::sqrt(disc);
  *t0 = -b - s;
  *t1 = -b + s;
  return true;
}

Eigen::Vector3d primitive_albedo(const Primitive& p, const Eigen::Vector3d& pos,
                                 const Eigen::Vector3d& dir) {
  Eigen::Vector3d a = p.albedo;
  if (p.textured) {
    const int64_t cx = (int64_t)std::floor(pos.x() / p.checker_cell);
    const int64_t cz = (int64_t)std::floor(pos.z() / p.checker_cell);
    if ((cx + cz) & 1) a = p.checker_albedo;
  }
  if (p.emitter_strength != 0) {
    const double f = 0.5 + 0.5 * p.emitter_strength * dir.dot(p.emitter_axis);
    a = (a * std::clamp(f, 0.0, 1.0)).cwiseMin(1.0);
  }
  return a;
}

}  // namespace

const char* rig_split(int view_index, int n_views) {
  check(n_views >= 8, "rig needs at least 8 views");
  if (view_index < 3) return "input";
  if (view_index >= n_views - 4) return "test";
  return "finetune";
}

GeneratedScene generate_toy_scene(uint64_t seed, const ToySceneOptions& opt) {
  Rng rng = Rng::stream(seed, 0x7051);
  GeneratedScene out;
  out.scene.seed = seed;

  const double g = rng.uniform(0.6, 0.8);
  out.scene.background = Eigen::Vector3d(g + rng.uniform(-0.05, 0.05),
                                         g + rng.uniform(-0.05, 0.05),
                                         g + rng.uniform(-0.05, 0.05));

  const int n_prims = opt.min_primitives +
                      (int)rng.below((uint64_t)(opt.max_primitives - opt.min_primitives + 1));
  for (int i = 0; i < n_prims; ++i) {
    Primitive p;
    const Eigen::Vector3d center(rng.uniform(0.32, 0.68), rng.uniform(0.32, 0.68),
                                 rng.uniform(0.32, 0.68));
    p.kind = rng.uniform() < 0.5 ? Primitive::Kind::Box : Primitive::Kind::Sphere;
    if (p.kind == Primitive::Kind::Box) {
      const Eigen::Vector3d half(rng.uniform(0.08, 0.18), rng.uniform(0.08, 0.18),
                                 rng.uniform(0.08, 0.18));
      p.box_min = center - half;
      p.box_max = center + half;
    } else {
      p.center = center;
      p.radius = rng.uniform(0.09, 0.17);
    }
    p.density = rng.uniform(30.0, 70.0);
    p.albedo = hsv_to_rgb(rng.uniform(), rng.uniform(0.5, 0.9), rng.uniform(0.55, 0.95));
    out.scene.primitives.push_back(p);
  }
  if (opt.ground_plane) {
    Primitive p;
    p.kind = Primitive::Kind::Box;
    p.box_min = Eigen::Vector3d(0.05, 0.08, 0.05);
    p.box_max = Eigen::Vector3d(0.95, 0.14, 0.95);
    p.density = 60.0;
    p.albedo = Eigen::Vector3d(0.85, 0.85, 0.8);
    p.textured = true;
    p.checker_albedo = Eigen::Vector3d(0.25, 0.25, 0.3);
    p.checker_cell = 0.12;
    out.scene.primitives.push_back(p);
  }

  // Rig: a partial sphere around the cube center. Views 0..2 form the tight
  // center cluster, view 3 is the nearby held-out target, then two rings;
  // the last four views sit between cluster and rings.
  const Eigen::Vector3d focus(0.5, 0.5, 0.5);
  const double base_az = 0.0, base_el = 0.55;  // radians
  std::vector<std::pair<double, double>> angles;
  angles.emplace_back(base_az, base_el);
  angles.emplace_back(base_az - 0.105, base_el + 0.05);
  angles.emplace_back(base_az + 0.105, base_el + 0.05);
  angles.emplace_back(base_az, base_el - 0.105);
  const int n_rest = opt.n_views - 8;
  for (int i = 0; i < n_rest; ++i) {  // two rings, fine-tune region
    const double ring = (i % 2 == 0) ? 0.21 : 0.35;
    const double phase = 2.0 * M_PI * (double)i / (double)n_rest;
    angles.emplace_back(base_az + ring * std::cos(phase), base_el + ring * 0.8 * std::sin(phase));
  }
  for (int i = 0; i < 4; ++i) {  // test views interleaved at mid radius
    const double phase = M_PI / 4.0 + i * M_PI / 2.0;
    angles.emplace_back(base_az + 0.17 * std::cos(phase), base_el + 0.14 * std::sin(phase));
  }

  const double focal = 1.08 * std::max(opt.width, opt.height);
  double min_dist = 1e9, max_dist = 0;
  std::vector<Eigen::Vector3d> eyes;
  for (size_t i = 0; i < angles.size(); ++i) {
    const double jitter_az = i == 0 ? 0.0 : rng.uniform(-0.02, 0.02);
    const double jitter_el = i == 0 ? 0.0 : rng.uniform(-0.02, 0.02);
    const double az = angles[i].first + jitter_az;
    const double el = angles[i].second + jitter_el;
    const double dist = rng.uniform(2.15, 2.3);
    const Eigen::Vector3d dir(std::cos(el) * std::sin(az), std::sin(el),
                              std::cos(el) * std::cos(az));
    eyes.push_back(focus + dist * dir);
    min_dist = std::min(min_dist, dist);
    max_dist = std::max(max_dist, dist);
  }
  const double near_z = min_dist - 0.85;
  const double far_z = max_dist + 0.85;
  for (const auto& eye : eyes)
    out.cameras.push_back(make_camera(eye, focus, focal, opt.width, opt.height, near_z, far_z));
  return out;
}

void reference_ray(const ToyScene& scene, const Eigen::Vector3d& origin,
                   const Eigen::Vector3d& dir, double dz, double far_depth, int n_quadrature,
                   Eigen::Vector3d* color, double* alpha, double* depth) {
  struct Event {
    double t;
    int prim;
    bool enter;
  };
  std::vector<Event> events;
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    double t0, t1;
    if (!intersect(scene.primitives[i], origin, dir, &t0, &t1)) continue;
    t0 = std::max(t0, 0.0);
    if (t1 <= t0) continue;
    events.push_back({t0, (int)i, true});
    events.push_back({t1, (int)i, false});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.enter > b.enter;
  });

  double trans = 1.0;
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double depth_acc = 0;
  std::vector<char> active(scene.primitives.size(), 0);
  double t_prev = events.empty() ? 0.0 : events.front().t;
  size_t e = 0;
  // Total t-extent used to apportion quadrature substeps of textured spans.
  double extent = 0;
  if (!events.empty()) extent = std::max(1e-9, events.back().t - events.front().t);

  auto integrate_span = [&](double ta, double tb) {
    double sigma = 0;
    Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
    bool textured = false;
    for (size_t i = 0; i < scene.primitives.size(); ++i) {
      if (!active[i]) continue;
      const Primitive& p = scene.primitives[i];
      sigma += p.density;
      if (p.textured)
        textured = true;
      else
        weighted += p.density * primitive_albedo(p, Eigen::Vector3d::Zero(), dir);
    }
    if (sigma <= 0 || tb <= ta) return;
    const int subs = textured
                         ? std::clamp((int)std::ceil((tb - ta) / extent * n_quadrature), 1,
                                      std::max(1, n_quadrature))
                         : 1;
    const double step = (tb - ta) / subs;
    for (int s = 0; s < subs; ++s) {
      const double sa = ta + s * step;
      const double mid = sa + 0.5 * step;
      Eigen::Vector3d w = weighted;
      if (textured)
        for (size_t i = 0; i < scene.primitives.size(); ++i)
          if (active[i] && scene.primitives[i].textured)
            w += scene.primitives[i].density *
                 primitive_albedo(scene.primitives[i], origin + mid * dir, dir);
      const Eigen::Vector3d albedo = w / sigma;
      const double sl = sigma * step;
      const double eterm = std::exp(-sl);
      acc += trans * (1.0 - eterm) * albedo;
      // closed form of the expected-depth integral over the span
      depth_acc += dz * trans * (sa * (1.0 - eterm) + (1.0 - eterm * (1.0 + sl)) / sigma);
      trans *= eterm;
    }
  };

  while (e < events.size()) {
    const double t_now = events[e].t;
    integrate_span(t_prev, t_now);
    while (e < events.size() && events[e].t == t_now) {
      active[(size_t)events[e].prim] = events[e].enter ? 1 : 0;
      ++e;
    }
    t_prev = t_now;
  }

  const double a = 1.0 - trans;
  *color = acc + trans * scene.background;
  *alpha = a;
  *depth = a > 1e-10 ? depth_acc / a : far_depth;
}

RenderedView reference_render(const ToyScene& scene, const Camera& cam, int n_quadrature) {
  RenderedView out;
  out.image = Image(cam.width, cam.height);
  out.depth = Plane(cam.width, cam.height);
  out.alpha = Plane(cam.width, cam.height);
  const Eigen::Matrix3d k_inv = cam.K.inverse();
  const Eigen::Matrix3d r_t = cam.R.transpose();
  const Eigen::Vector3d origin = cam.center();
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      const Eigen::Vector3d dir = (r_t * (k_inv * Eigen::Vector3d(x, y, 1.0))).normalized();
      const double dz = (cam.R * dir).z();
      Eigen::Vector3d color;
      double alpha, depth;
      reference_ray(scene, origin, dir, dz, cam.far_z, n_quadrature, &color, &alpha, &depth);
      for (int c = 0; c < 3; ++c) out.image.at(y, x, c) = std::clamp(color[c], 0.0, 1.0);
      out.depth.at(y, x) = depth;
      out.alpha.at(y, x) = alpha;
    }
  return out;
}

double medium_density(const ToyScene& scene, const Eigen::Vector3d& p) {
  double sigma = 0;
  for (const auto& prim : scene.primitives) {
    if (prim.kind == Primitive::Kind::Box) {
      if ((p.array() >= prim.box_min.array()).all() && (p.array() <= prim.box_max.array()).all())
        sigma += prim.density;
    } else if ((p - prim.center).norm() <= prim.radius) {
      sigma += prim.density;
    }
  }
  return sigma;
}

Eigen::Vector3d medium_radiance(const ToyScene& scene, const Eigen::Vector3d& p,
                                const Eigen::Vector3d& dir) {
  double sigma = 0;
  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  for (const auto& prim : scene.primitives) {
    bool inside = false;
    if (prim.kind == Primitive::Kind::Box)
      inside = (p.array() >= prim.box_min.array()).all() &&
               (p.array() <= prim.box_max.array()).all();
    else
      inside = (p - prim.center).norm() <= prim.radius;
    if (!inside) continue;
    sigma += prim.density;
    weighted += prim.density * primitive_albedo(prim, p, dir);
  }
  if (sigma <= 0) return Eigen::Vector3d::Zero();
  return weighted / sigma;
}

}  // namespace mvsr
