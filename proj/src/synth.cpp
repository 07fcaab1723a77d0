#include "geolab/synth.hpp"

#include "geolab/distributions.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>
#include <set>

namespace geolab {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void validate(const ArcSpec& s) {
  if (s.id.empty()) throw InputError("arc spec needs an id");
  if (!(s.radius_mm > 0.0)) throw InputError("arc '" + s.id + "': radius must be > 0");
  if (!(s.span_deg > 10.0 && s.span_deg < 350.0)) {
    throw InputError("arc '" + s.id + "': span must be in (10, 350) degrees");
  }
  if (s.count < 1) throw InputError("arc '" + s.id + "': count must be >= 1");
  if (s.points < 3) throw InputError("arc '" + s.id + "': points must be >= 3");
  if (!(s.jitter_mm >= 0.0)) throw InputError("arc '" + s.id + "': jitter must be >= 0");
  if (!s.center.allFinite()) throw InputError("arc '" + s.id + "': center must be finite");
}

Eigen::Matrix3d arc_orientation(const ArcSpec& s) {
  return (Eigen::AngleAxisd(s.azimuth_deg * kDeg, Vector3::UnitZ()) *
          Eigen::AngleAxisd(s.tilt_deg * kDeg, Vector3::UnitX()))
      .toRotationMatrix();
}

// Arc of `radius` between the two angles (degrees, local frame). `local` is
// applied in the arc frame before the spec orientation.
std::vector<Point3> arc_points(const ArcSpec& s, double radius, double start_deg, double end_deg,
                               const Eigen::Matrix3d& local, const Vector3& local_offset) {
  const Eigen::Matrix3d r = arc_orientation(s) * local;
  std::vector<Point3> pts(static_cast<std::size_t>(s.points));
  for (int i = 0; i < s.points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(s.points - 1);
    const double theta = (start_deg + t * (end_deg - start_deg)) * kDeg;
    const Point3 p(radius * std::cos(theta), radius * std::sin(theta), 0.0);
    pts[static_cast<std::size_t>(i)] = r * (p + local_offset) + s.center;
  }
  return pts;
}

Vector3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector3 v;
  do {
    v = Vector3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-12);
  return v.normalized();
}

RigidTransform random_rigid(std::mt19937_64& rng, const LocalPerturbation& bound, const Point3& pivot) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RigidTransform t;
  t.pivot = pivot;
  const double angle = bound.max_rotation_deg * u(rng);
  const Vector3 axis = random_unit(rng);
  t.rotation_deg =
      euler_deg_from_rotation(Eigen::AngleAxisd(angle * kDeg, axis).toRotationMatrix());
  t.translation = bound.max_translation_mm * u(rng) * random_unit(rng);
  return t;
}

Streamline transformed(const RigidTransform& t, const Streamline& s) {
  // (p - c) + c is not always p in floating point
  if (t.rotation_deg.isZero(0.0) && t.translation.isZero(0.0)) return s;
  std::vector<Point3> pts;
  pts.reserve(s.size());
  for (const auto& p : s.points()) pts.push_back(t.apply(p));
  return Streamline(std::move(pts));
}

// Gently curving random polyline inside the scene box.
Streamline distractor(std::mt19937_64& rng, const SceneSpec& spec) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Point3 start = spec.extent_lo.array() +
                       (spec.extent_hi - spec.extent_lo).array() *
                           Eigen::Array3d(u(rng), u(rng), u(rng));
  const double length = 20.0 + 40.0 * u(rng);
  const int n = 30;
  Vector3 dir = random_unit(rng);
  const Vector3 bend = random_unit(rng).cross(dir).normalized() * 0.02;
  std::vector<Point3> pts{start};
  for (int i = 1; i < n; ++i) {
    dir = (dir + bend).normalized();
    pts.push_back(pts.back() + dir * (length / (n - 1)));
  }
  // shift back into the box; a box smaller than the polyline gets it centered
  Point3 lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Vector3 shift = Vector3::Zero();
  for (int d = 0; d < 3; ++d) {
    if (hi[d] - lo[d] > spec.extent_hi[d] - spec.extent_lo[d]) {
      shift[d] = 0.5 * (spec.extent_lo[d] + spec.extent_hi[d] - lo[d] - hi[d]);
    } else {
      shift[d] = std::max(spec.extent_lo[d] - lo[d], 0.0) - std::max(hi[d] - spec.extent_hi[d], 0.0);
    }
  }
  for (auto& p : pts) p += shift;
  return Streamline(std::move(pts));
}

}  // namespace

Streamline analytic_arc(const ArcSpec& spec) {
  validate(spec);
  return Streamline(arc_points(spec, spec.radius_mm, 90.0 - spec.span_deg / 2.0,
                               90.0 + spec.span_deg / 2.0, Eigen::Matrix3d::Identity(),
                               Vector3::Zero()));
}

SyntheticBundle generate_bundle(const ArcSpec& spec, std::uint64_t fallback_seed) {
  validate(spec);
  SyntheticBundle out;
  out.id = spec.id;
  out.spec = spec;
  std::mt19937_64 rng(spec.seed.value_or(fallback_seed));
  std::normal_distribution<double> n(0.0, 1.0);
  const double sigma = spec.jitter_mm;
  const double sigma_rad = sigma / spec.radius_mm;  // the same arc-length jitter as an angle
  const double half_span = spec.span_deg / 2.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> rank(static_cast<std::size_t>(spec.count));
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  for (int i = 0; i < spec.count; ++i) {
    if (sigma == 0.0) {
      out.streamlines.push_back(analytic_arc(spec));
      continue;
    }
    // fold depth: one stratum of the unit interval per streamline
    const int r = rank[static_cast<std::size_t>(i)];
    const double q = (r + unit(rng)) / spec.count;
    const double u = normal_quantile(q);
    const double lean = sigma_rad * std::sqrt(-2.0 * std::log1p(-q));  // Rayleigh quantile
    const double tilt = (r % 2 == 0 ? lean : -lean) * (1.0 + 0.02 * n(rng));
    const double skew = (r / 2 % 2 == 0 ? lean : -lean) * (1.0 + 0.02 * n(rng));

    const double radius = std::max(spec.radius_mm + sigma * u, 0.1 * spec.radius_mm);
    const double span_change = (sigma_rad / kDeg) * (u + 0.02 * n(rng));
    const Eigen::Matrix3d local = (Eigen::AngleAxisd(tilt, Vector3::UnitY()) *
                                   Eigen::AngleAxisd(skew, Vector3::UnitZ()))
                                      .toRotationMatrix();
    const Vector3 offset = 0.1 * sigma * Vector3(n(rng), n(rng), n(rng));
    auto pts = arc_points(spec, radius, 90.0 - half_span - span_change,
                          90.0 + half_span + span_change, local, offset);
    for (auto& p : pts) p += 0.02 * sigma * Vector3(n(rng), n(rng), n(rng));
    out.streamlines.emplace_back(std::move(pts));
  }
  return out;
}

Scene generate_scene(const SceneSpec& spec) {
  std::set<std::string> ids;
  for (const auto& b : spec.bundles) {
    if (!ids.insert(b.id).second) throw InputError("duplicate bundle id '" + b.id + "'");
  }
  if (spec.distractor_count < 0) throw InputError("distractor count must be >= 0");
  if (!(spec.extent_hi.array() >= spec.extent_lo.array()).all()) {
    throw InputError("scene extent: hi must be >= lo");
  }

  Scene scene;
  std::mt19937_64 rng(spec.seed);
  Point3 scene_center = Point3::Zero();
  for (std::size_t i = 0; i < spec.bundles.size(); ++i) {
    scene.atlas.push_back(generate_bundle(spec.bundles[i], spec.seed * 1000003ULL + i + 1));
    scene_center += spec.bundles[i].center;
  }
  if (!spec.bundles.empty()) scene_center /= static_cast<double>(spec.bundles.size());

  scene.global_perturbation.pivot = scene_center;
  scene.global_perturbation.rotation_deg = spec.global_rotation_deg;
  scene.global_perturbation.translation = spec.global_translation_mm;

  for (const auto& b : scene.atlas) {
    const RigidTransform local = random_rigid(rng, spec.local, b.spec.center);
    scene.local_perturbations.push_back(local);
    for (const auto& s : b.streamlines) {
      scene.subject.push_back(transformed(scene.global_perturbation, transformed(local, s)));
      scene.truth.push_back(b.id);
    }
  }
  for (int i = 0; i < spec.distractor_count; ++i) {
    scene.subject.push_back(transformed(scene.global_perturbation, distractor(rng, spec)));
    scene.truth.emplace_back(kOutlierLabel);
  }
  return scene;
}

Bundle to_bundle(const SyntheticBundle& b, int k) {
  return Bundle{b.id, resample_all(b.streamlines, k)};
}

std::vector<ResampledStreamline> resample_all(const std::vector<Streamline>& lines, int k) {
  std::vector<ResampledStreamline> out;
  out.reserve(lines.size());
  for (const auto& s : lines) out.push_back(resample(s, k));
  return out;
}

}  // namespace geolab
