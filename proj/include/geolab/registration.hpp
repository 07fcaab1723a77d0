#pragma once

// Rigid streamline-based registration (SBR), the spatial grid used to pull
// bundle neighborhoods out of a tractogram, and the per-bundle local
// neighborhood registration built from the two.

#include "geolab/streamline.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace geolab {

/// p -> R (p - pivot) + pivot + translation, with R = Rx * Ry * Rz built from
/// intrinsic x-y-z Euler angles in degrees.
struct RigidTransform {
  Vector3 rotation_deg = Vector3::Zero();
  Vector3 translation = Vector3::Zero();
  Point3 pivot = Point3::Zero();

  static RigidTransform identity() { return {}; }

  Eigen::Matrix3d rotation_matrix() const;
  Point3 apply(const Point3& p) const;

  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;
};

Eigen::Matrix3d rotation_from_euler_deg(const Vector3& angles_deg);
/// Inverse of rotation_from_euler_deg (x-y-z intrinsic); angles in degrees.
Vector3 euler_deg_from_rotation(const Eigen::Matrix3d& r);

ResampledStreamline apply_rigid(const RigidTransform& t, const ResampledStreamline& rs);
std::vector<ResampledStreamline> apply_rigid(const RigidTransform& t,
                                             std::span<const ResampledStreamline> set);
/// `second` applied after `first`.
RigidTransform compose(const RigidTransform& second, const RigidTransform& first);
RigidTransform invert(const RigidTransform& t);
/// Rotation angle (degrees) of the rotation part.
double rotation_angle_deg(const RigidTransform& t);

struct RegistrationOptions {
  double coarse_rotation_step_deg = 10.0;
  double coarse_translation_step_mm = 10.0;
  double fine_rotation_step_deg = 1.0;
  double fine_translation_step_mm = 1.0;
  int max_evaluations_per_stage = 500;
  double cost_tolerance_mm = 1e-3;
};

struct RegistrationResult {
  RigidTransform transform;
  double initial_cost_mm = 0.0;
  double final_cost_mm = 0.0;
  int iterations = 0;  // cost evaluations over both stages
  bool converged = false;

  friend bool operator==(const RegistrationResult&, const RegistrationResult&) = default;
};

/// Rigidly aligns `moving` onto `fixed` by minimizing bundle_min_distance with
/// a coarse-then-fine simplex search. The pivot is the moving-set barycenter.
/// Never throws for optimizer trouble: if nothing beats the identity, the
/// identity is returned with converged=false (unless the identity is already
/// a perfect fit).
RegistrationResult sbr_rigid(std::span<const ResampledStreamline> moving,
                             std::span<const ResampledStreamline> fixed,
                             const RegistrationOptions& options = {});

enum class ContainmentRule { all_points, any_point };

std::string_view containment_name(ContainmentRule rule);
ContainmentRule containment_from_name(std::string_view name);

/// Uniform grid over streamline bounding boxes: each streamline is registered
/// in every cell its box touches. Sphere queries only visit nearby cells.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const ResampledStreamline> streamlines, double cell_size_mm = 20.0);

  /// Indices of streamlines whose boxes may intersect the sphere, ascending.
  std::vector<std::size_t> candidates(const Point3& center, double radius_mm) const;
  double cell_size() const noexcept { return cell_size_; }

 private:
  using CellKey = std::int64_t;
  CellKey key(std::int64_t i, std::int64_t j, std::int64_t k) const;
  std::int64_t cell_coord(double v) const;

  double cell_size_;
  std::unordered_map<CellKey, std::vector<std::size_t>> cells_;
};

/// Streamlines plus their grid, built once and shared read-only across bundles.
class IndexedTractogram {
 public:
  explicit IndexedTractogram(std::vector<ResampledStreamline> streamlines,
                             double cell_size_mm = 20.0);

  const std::vector<ResampledStreamline>& streamlines() const noexcept { return streamlines_; }
  std::size_t size() const noexcept { return streamlines_.size(); }
  const SpatialGrid& grid() const noexcept { return grid_; }

 private:
  std::vector<ResampledStreamline> streamlines_;
  SpatialGrid grid_;
};

struct Neighborhood {
  std::string bundle_id;
  std::vector<std::size_t> streamline_indices;  // ascending
  Point3 center = Point3::Zero();
  double radius_mm = 0.0;
};

bool sphere_contains(const ResampledStreamline& rs, const Point3& center, double radius_mm,
                     ContainmentRule rule);

Neighborhood extract_neighborhood(const IndexedTractogram& tractogram, const Point3& center,
                                  double radius_mm,
                                  ContainmentRule rule = ContainmentRule::all_points);

struct LsnrOptions {
  double neighborhood_factor = 6.0;
  double centroid_threshold_mm = 6.0;
  ContainmentRule containment = ContainmentRule::all_points;
  RegistrationOptions registration;
};

struct LsnrResult {
  RegistrationResult registration;
  Neighborhood subject_neighborhood;
  std::size_t atlas_neighborhood_size = 0;
  bool bundle_absent = false;
};

/// Local neighborhood registration for one bundle with barycenter `center`
/// and radius `radius_mm`: both tractograms are cut to the sphere of
/// neighborhood_factor * radius, reduced to centroids, and the subject
/// centroids are registered onto the atlas centroids.
LsnrResult lsnr(const std::string& bundle_id, const Point3& center, double radius_mm,
                const IndexedTractogram& atlas, const IndexedTractogram& subject,
                const LsnrOptions& options = {});

}  // namespace geolab
