#include "geolab/registration.hpp"

#include "geolab/clustering.hpp"
#include "geolab/distances.hpp"
#include "geolab/simplex.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geolab {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

RigidTransform from_params(std::span<const double> x, const Point3& pivot) {
  RigidTransform t;
  t.rotation_deg = Vector3(x[0], x[1], x[2]);
  t.translation = Vector3(x[3], x[4], x[5]);
  t.pivot = pivot;
  return t;
}

}  // namespace

Eigen::Matrix3d rotation_from_euler_deg(const Vector3& a) {
  return (Eigen::AngleAxisd(a.x() * kDeg, Vector3::UnitX()) *
          Eigen::AngleAxisd(a.y() * kDeg, Vector3::UnitY()) *
          Eigen::AngleAxisd(a.z() * kDeg, Vector3::UnitZ()))
      .toRotationMatrix();
}

Vector3 euler_deg_from_rotation(const Eigen::Matrix3d& r) {
  // R = Rx(a) Ry(b) Rz(c): R02 = sin b, R12 = -sin a cos b, R22 = cos a cos b,
  // R01 = -cos b sin c, R00 = cos b cos c.
  const double sb = std::clamp(r(0, 2), -1.0, 1.0);
  const double b = std::asin(sb);
  double a = 0.0;
  double c = 0.0;
  if (std::abs(sb) < 1.0 - 1e-12) {
    a = std::atan2(-r(1, 2), r(2, 2));
    c = std::atan2(-r(0, 1), r(0, 0));
  } else {
    // gimbal lock: only a +/- c is determined; put it all in a
    a = std::atan2(r(2, 1), r(1, 1));
  }
  return Vector3(a, b, c) / kDeg;
}

Eigen::Matrix3d RigidTransform::rotation_matrix() const {
  return rotation_from_euler_deg(rotation_deg);
}

Point3 RigidTransform::apply(const Point3& p) const {
  return rotation_matrix() * (p - pivot) + pivot + translation;
}

ResampledStreamline apply_rigid(const RigidTransform& t, const ResampledStreamline& rs) {
  const Eigen::Matrix3d r = t.rotation_matrix();
  const Vector3 offset = t.pivot + t.translation;
  std::vector<Point3> pts(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) pts[i] = r * (rs[i] - t.pivot) + offset;
  return ResampledStreamline(std::move(pts));
}

std::vector<ResampledStreamline> apply_rigid(const RigidTransform& t,
                                             std::span<const ResampledStreamline> set) {
  const Eigen::Matrix3d r = t.rotation_matrix();
  const Vector3 offset = t.pivot + t.translation;
  std::vector<ResampledStreamline> out;
  out.reserve(set.size());
  for (const auto& rs : set) {
    std::vector<Point3> pts(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) pts[i] = r * (rs[i] - t.pivot) + offset;
    out.emplace_back(std::move(pts));
  }
  return out;
}

RigidTransform compose(const RigidTransform& second, const RigidTransform& first) {
  // second(first(p)) = R2 R1 (p - c1) + R2 (c1 + t1 - c2) + c2 + t2
  const Eigen::Matrix3d r1 = first.rotation_matrix();
  const Eigen::Matrix3d r2 = second.rotation_matrix();
  RigidTransform out;
  out.pivot = first.pivot;
  out.rotation_deg = euler_deg_from_rotation(r2 * r1);
  out.translation =
      r2 * (first.pivot + first.translation - second.pivot) + second.pivot + second.translation -
      first.pivot;
  return out;
}

RigidTransform invert(const RigidTransform& t) {
  // p = R^T (q - (c + t)) + (c + t) - t
  RigidTransform out;
  out.pivot = t.pivot + t.translation;
  out.rotation_deg = euler_deg_from_rotation(t.rotation_matrix().transpose());
  out.translation = -t.translation;
  return out;
}

double rotation_angle_deg(const RigidTransform& t) {
  const double c = (t.rotation_matrix().trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0)) / kDeg;
}

RegistrationResult sbr_rigid(std::span<const ResampledStreamline> moving,
                             std::span<const ResampledStreamline> fixed,
                             const RegistrationOptions& options) {
  if (moving.empty() || fixed.empty()) {
    throw std::invalid_argument("sbr_rigid: moving and fixed sets must be non-empty");
  }
  const Point3 pivot = bundle_barycenter(moving);
  auto cost = [&](std::span<const double> x) {
    const auto moved = apply_rigid(from_params(x, pivot), moving);
    return bundle_min_distance(moved, fixed);
  };

  RegistrationResult result;
  result.transform.pivot = pivot;
  result.initial_cost_mm = bundle_min_distance(moving, fixed);
  result.final_cost_mm = result.initial_cost_mm;
  if (result.initial_cost_mm <= 0.0) {
    result.converged = true;
    return result;
  }

  SimplexOptions coarse;
  coarse.initial_step = {options.coarse_rotation_step_deg, options.coarse_rotation_step_deg,
                         options.coarse_rotation_step_deg, options.coarse_translation_step_mm,
                         options.coarse_translation_step_mm, options.coarse_translation_step_mm};
  coarse.max_evaluations = options.max_evaluations_per_stage;
  coarse.f_tolerance = options.cost_tolerance_mm;
  const SimplexResult stage1 = nelder_mead(cost, std::vector<double>(6, 0.0), coarse);

  SimplexOptions fine = coarse;
  fine.initial_step = {options.fine_rotation_step_deg, options.fine_rotation_step_deg,
                       options.fine_rotation_step_deg, options.fine_translation_step_mm,
                       options.fine_translation_step_mm, options.fine_translation_step_mm};
  const SimplexResult stage2 = nelder_mead(cost, stage1.x, fine);

  result.iterations = stage1.evaluations + stage2.evaluations;
  if (!(stage2.value < result.initial_cost_mm)) {
    result.converged = false;
    return result;
  }
  result.transform = from_params(stage2.x, pivot);
  result.final_cost_mm = stage2.value;
  result.converged = stage2.converged;
  return result;
}

std::string_view containment_name(ContainmentRule rule) {
  return rule == ContainmentRule::all_points ? "all_points" : "any_point";
}

ContainmentRule containment_from_name(std::string_view name) {
  if (name == "all_points") return ContainmentRule::all_points;
  if (name == "any_point") return ContainmentRule::any_point;
  throw InputError("unknown containment rule '" + std::string(name) + "'");
}

SpatialGrid::SpatialGrid(std::span<const ResampledStreamline> streamlines, double cell_size_mm)
    : cell_size_(cell_size_mm) {
  if (!(cell_size_mm > 0.0)) throw std::invalid_argument("SpatialGrid: cell size must be > 0");
  for (std::size_t idx = 0; idx < streamlines.size(); ++idx) {
    const auto& rs = streamlines[idx];
    Point3 lo = rs[0];
    Point3 hi = rs[0];
    for (const auto& p : rs.points()) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    for (auto i = cell_coord(lo.x()); i <= cell_coord(hi.x()); ++i) {
      for (auto j = cell_coord(lo.y()); j <= cell_coord(hi.y()); ++j) {
        for (auto k = cell_coord(lo.z()); k <= cell_coord(hi.z()); ++k) {
          cells_[key(i, j, k)].push_back(idx);
        }
      }
    }
  }
}

std::int64_t SpatialGrid::cell_coord(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_size_));
}

SpatialGrid::CellKey SpatialGrid::key(std::int64_t i, std::int64_t j, std::int64_t k) const {
  // 21 bits per axis, offset to be non-negative; +-1e6 cells is far beyond any scan
  constexpr std::int64_t kOffset = 1 << 20;
  constexpr std::int64_t kMask = (1 << 21) - 1;
  return ((i + kOffset) & kMask) << 42 | ((j + kOffset) & kMask) << 21 | ((k + kOffset) & kMask);
}

std::vector<std::size_t> SpatialGrid::candidates(const Point3& center, double radius_mm) const {
  std::vector<std::size_t> out;
  const Point3 lo = center.array() - radius_mm;
  const Point3 hi = center.array() + radius_mm;
  for (auto i = cell_coord(lo.x()); i <= cell_coord(hi.x()); ++i) {
    for (auto j = cell_coord(lo.y()); j <= cell_coord(hi.y()); ++j) {
      for (auto k = cell_coord(lo.z()); k <= cell_coord(hi.z()); ++k) {
        auto it = cells_.find(key(i, j, k));
        if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IndexedTractogram::IndexedTractogram(std::vector<ResampledStreamline> streamlines,
                                     double cell_size_mm)
    : streamlines_(std::move(streamlines)), grid_(streamlines_, cell_size_mm) {}

bool sphere_contains(const ResampledStreamline& rs, const Point3& center, double radius_mm,
                     ContainmentRule rule) {
  const double r2 = radius_mm * radius_mm;
  if (rule == ContainmentRule::all_points) {
    return std::all_of(rs.points().begin(), rs.points().end(),
                       [&](const Point3& p) { return (p - center).squaredNorm() <= r2; });
  }
  return std::any_of(rs.points().begin(), rs.points().end(),
                     [&](const Point3& p) { return (p - center).squaredNorm() <= r2; });
}

Neighborhood extract_neighborhood(const IndexedTractogram& tractogram, const Point3& center,
                                  double radius_mm, ContainmentRule rule) {
  if (!(radius_mm > 0.0)) throw std::invalid_argument("extract_neighborhood: radius must be > 0");
  Neighborhood hood;
  hood.center = center;
  hood.radius_mm = radius_mm;
  for (std::size_t idx : tractogram.grid().candidates(center, radius_mm)) {
    if (sphere_contains(tractogram.streamlines()[idx], center, radius_mm, rule)) {
      hood.streamline_indices.push_back(idx);
    }
  }
  return hood;
}

LsnrResult lsnr(const std::string& bundle_id, const Point3& center, double radius_mm,
                const IndexedTractogram& atlas, const IndexedTractogram& subject,
                const LsnrOptions& options) {
  // a point-like bundle still gets a usable sphere
  const double radius = options.neighborhood_factor * std::max(radius_mm, 1e-3);

  LsnrResult out;
  out.subject_neighborhood = extract_neighborhood(subject, center, radius, options.containment);
  out.subject_neighborhood.bundle_id = bundle_id;
  out.registration.transform.pivot = center;
  if (out.subject_neighborhood.streamline_indices.empty()) {
    out.bundle_absent = true;
    return out;
  }

  const Neighborhood atlas_hood = extract_neighborhood(atlas, center, radius, options.containment);
  out.atlas_neighborhood_size = atlas_hood.streamline_indices.size();
  if (atlas_hood.streamline_indices.empty()) {
    // nothing to register against; keep the subject as globally aligned
    return out;
  }

  auto gather = [](const IndexedTractogram& t, const std::vector<std::size_t>& idx) {
    std::vector<ResampledStreamline> v;
    v.reserve(idx.size());
    for (std::size_t i : idx) v.push_back(t.streamlines()[i]);
    return v;
  };
  const auto atlas_centroids =
      centroids(quickbundles(gather(atlas, atlas_hood.streamline_indices),
                             options.centroid_threshold_mm));
  const auto subject_centroids =
      centroids(quickbundles(gather(subject, out.subject_neighborhood.streamline_indices),
                             options.centroid_threshold_mm));
  out.registration = sbr_rigid(subject_centroids, atlas_centroids, options.registration);
  return out;
}

}  // namespace geolab
