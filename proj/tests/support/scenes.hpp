#pragma once

// Scene layouts shared by the unit and acceptance tests.

#include "geolab/synth.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace geolab::testing {

struct GridSceneOptions {
  int bundles = 20;
  double spacing_mm = 60.0;
  double radius_mm = 5.0;
  double jitter_mm = 0.5;
  int count = 50;
  int distractors = 0;
};

/// U-shaped arcs on the nodes of a 3x3x3 lattice around the origin, each with
/// a seeded random orientation.
inline SceneSpec grid_scene(std::uint64_t seed, const GridSceneOptions& o = {}) {
  SceneSpec spec;
  spec.seed = seed;
  spec.distractor_count = o.distractors;
  const double half = o.spacing_mm + 2.0 * o.radius_mm;
  spec.extent_lo = Point3::Constant(-half);
  spec.extent_hi = Point3::Constant(half);
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> tilt(0.0, 180.0);
  std::uniform_real_distribution<double> azimuth(0.0, 360.0);
  for (int i = 0; i < o.bundles; ++i) {
    ArcSpec a;
    a.id = "u" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    a.center = Point3((i % 3 - 1) * o.spacing_mm, (i / 3 % 3 - 1) * o.spacing_mm,
                      (i / 9 % 3 - 1) * o.spacing_mm);
    a.radius_mm = o.radius_mm;
    a.span_deg = 180.0;
    a.tilt_deg = tilt(rng);
    a.azimuth_deg = azimuth(rng);
    a.jitter_mm = o.jitter_mm;
    a.count = o.count;
    spec.bundles.push_back(a);
  }
  return spec;
}

}  // namespace geolab::testing
