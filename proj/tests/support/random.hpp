#pragma once

// Seeded random geometry for property tests.

#include "geolab/registration.hpp"
#include "geolab/streamline.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace geolab::testing {

using Rng = std::mt19937_64;

inline Vector3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector3 v;
  do {
    v = Vector3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

/// Smooth random curve: a random walk whose direction drifts slowly.
inline Streamline random_curve(Rng& rng, int points = 40, double step_mm = 1.0,
                               double extent_mm = 50.0) {
  std::uniform_real_distribution<double> u(-extent_mm, extent_mm);
  Point3 p(u(rng), u(rng), u(rng));
  Vector3 dir = random_unit(rng);
  std::vector<Point3> pts{p};
  for (int i = 1; i < points; ++i) {
    dir = (dir + 0.3 * random_unit(rng)).normalized();
    p += step_mm * dir;
    pts.push_back(p);
  }
  return Streamline(std::move(pts));
}

inline ResampledStreamline random_resampled(Rng& rng, int k = kDefaultResamplePoints) {
  std::uniform_int_distribution<int> n(5, 60);
  return resample(random_curve(rng, n(rng)), k);
}

/// Copies of `prototype` with independent per-point noise.
inline std::vector<ResampledStreamline> noisy_copies(Rng& rng, const ResampledStreamline& prototype,
                                                     int count, double sigma_mm) {
  std::normal_distribution<double> n(0.0, sigma_mm);
  std::vector<ResampledStreamline> out;
  for (int c = 0; c < count; ++c) {
    std::vector<Point3> pts = prototype.points();
    for (auto& p : pts) p += Vector3(n(rng), n(rng), n(rng));
    out.emplace_back(std::move(pts));
  }
  return out;
}

/// Rotation of up to `max_deg` about a random axis and translation of up to
/// `max_mm` in a random direction, about `pivot`.
inline RigidTransform random_rigid(Rng& rng, double max_deg, double max_mm,
                                   const Point3& pivot = Point3::Zero()) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RigidTransform t;
  t.pivot = pivot;
  const double angle = max_deg * u(rng) * std::numbers::pi / 180.0;
  t.rotation_deg = euler_deg_from_rotation(Eigen::AngleAxisd(angle, random_unit(rng)).toRotationMatrix());
  t.translation = max_mm * u(rng) * random_unit(rng);
  return t;
}

/// Rigid transform with exactly the given rotation angle and translation norm.
inline RigidTransform exact_rigid(const Vector3& axis, double deg, const Vector3& direction,
                                  double mm, const Point3& pivot = Point3::Zero()) {
  RigidTransform t;
  t.pivot = pivot;
  t.rotation_deg = euler_deg_from_rotation(
      Eigen::AngleAxisd(deg * std::numbers::pi / 180.0, axis.normalized()).toRotationMatrix());
  t.translation = mm * direction.normalized();
  return t;
}

}  // namespace geolab::testing
