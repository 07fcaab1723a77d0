#pragma once

// Synthetic U-fiber scenes: jittered circular-arc bundles, random distractor
// polylines, rigid subject perturbations and ground-truth labels.

#include "geolab/registration.hpp"
#include "geolab/streamline.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geolab {

inline constexpr std::string_view kOutlierLabel = "outlier";

/// Circular arc of `span_deg` in the local xy-plane, symmetric about +y (so
/// the arc midpoint is at (0, radius, 0)), rotated by Rz(azimuth) * Rx(tilt)
/// and moved to `center`.
struct ArcSpec {
  std::string id;
  Point3 center = Point3::Zero();
  double radius_mm = 10.0;
  double span_deg = 180.0;
  double tilt_deg = 0.0;
  double azimuth_deg = 0.0;
  double jitter_mm = 0.5;
  int count = 50;
  int points = 30;  // samples per generated polyline
  std::optional<std::uint64_t> seed;  // derived from the scene seed when unset
};

struct SyntheticBundle {
  std::string id;
  std::vector<Streamline> streamlines;
  ArcSpec spec;
};

struct LocalPerturbation {
  double max_rotation_deg = 0.0;
  double max_translation_mm = 0.0;
};

struct SceneSpec {
  std::vector<ArcSpec> bundles;
  int distractor_count = 0;
  Point3 extent_lo = Point3(-80, -80, -80);
  Point3 extent_hi = Point3(80, 80, 80);
  // applied to the whole subject about the mean of the bundle centers
  Vector3 global_rotation_deg = Vector3::Zero();
  Vector3 global_translation_mm = Vector3::Zero();
  // random rigid motion per bundle about its arc center, drawn up to these bounds
  LocalPerturbation local;
  std::uint64_t seed = 1;
};

struct Scene {
  std::vector<SyntheticBundle> atlas;
  std::vector<Streamline> subject;
  std::vector<std::string> truth;        // per subject streamline: bundle id or "outlier"
  RigidTransform global_perturbation;    // atlas space -> subject space
  std::vector<RigidTransform> local_perturbations;  // per bundle, applied before the global one
};

/// Validates `spec` (throws InputError) and generates `count` jittered copies
/// of the arc. Each copy owns one stratum q of the unit interval (random
/// order) that sets its fold depth u = Phi^-1(q): radius R + sigma u and span
/// widened by sigma u of arc length. The same q gives a Rayleigh-distributed
/// lean of scale sigma / R radians, used as tilt (out of plane) and skew (in
/// plane) with signs alternating by stratum. 5% independent noise goes on top
/// of the angles, plus 0.1 sigma offset and 0.05 sigma per-point noise. Jitter
/// 0 reproduces the analytic arc exactly.
SyntheticBundle generate_bundle(const ArcSpec& spec, std::uint64_t fallback_seed = 1);

/// Polyline samples of the noiseless arc.
Streamline analytic_arc(const ArcSpec& spec);

/// Atlas bundles, the perturbed subject with distractors appended, and the
/// truth labels. Pure function of the spec.
Scene generate_scene(const SceneSpec& spec);

/// Resamples every streamline of a synthetic bundle.
Bundle to_bundle(const SyntheticBundle& b, int k = kDefaultResamplePoints);
std::vector<ResampledStreamline> resample_all(const std::vector<Streamline>& lines,
                                              int k = kDefaultResamplePoints);

}  // namespace geolab
