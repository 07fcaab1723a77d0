#pragma once

// Streamline value types and the per-streamline geometric descriptors used
// for bundle statistics and labeling.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geolab {

using Point3 = Eigen::Vector3d;
using Vector3 = Eigen::Vector3d;

inline constexpr int kDefaultResamplePoints = 21;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: bad files, invalid specs, inconsistent arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A geometric quantity that is undefined for the given input.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Raw tractography polyline in millimeters. At least two finite points.
class Streamline {
 public:
  Streamline() = default;
  explicit Streamline(std::vector<Point3> points);

  const std::vector<Point3>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<Point3> points_;
};

/// Fixed-count, arc-length-uniform polyline. The pipeline always uses an odd
/// count so that index (K-1)/2 is an exact medial sample.
class ResampledStreamline {
 public:
  ResampledStreamline() = default;
  explicit ResampledStreamline(std::vector<Point3> points);

  const std::vector<Point3>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  const Point3& front() const { return points_.front(); }
  const Point3& back() const { return points_.back(); }

  ResampledStreamline reversed() const;
  ResampledStreamline translated(const Vector3& offset) const;

  friend bool operator==(const ResampledStreamline&, const ResampledStreamline&) = default;

 private:
  std::vector<Point3> points_;
};

struct Bundle {
  std::string id;
  std::vector<ResampledStreamline> streamlines;
};

enum class Feature : int {
  length = 0,
  dist_to_barycenter,
  mmea,
  plane_angle,
  direction_angle,
  shape_angle,
};

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::length,     Feature::dist_to_barycenter, Feature::mmea,
    Feature::plane_angle, Feature::direction_angle,   Feature::shape_angle};

std::string_view feature_name(Feature f);
Feature feature_from_name(std::string_view name);

/// Per-streamline values of the six descriptors. A degenerate entry means the
/// descriptor is undefined for this streamline (its value is then 0).
struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::array<bool, kFeatureCount> degenerate{};

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  bool is_degenerate(Feature f) const { return degenerate[static_cast<std::size_t>(f)]; }
};

struct PlaneFit {
  Vector3 normal;
  bool degenerate = false;  // collinear points: the normal is arbitrary
};

/// Resamples to `k` points equally spaced in arc length. Consecutive duplicate
/// points are dropped first; a zero-length input throws GeometryError.
ResampledStreamline resample(const Streamline& s, int k = kDefaultResamplePoints);

double arc_length(const Streamline& s);
double arc_length(const ResampledStreamline& rs);

/// Point at index (K-1)/2. Requires odd K.
const Point3& midpoint(const ResampledStreamline& rs);

/// Mean of every resampled point of every streamline.
Point3 bundle_barycenter(std::span<const ResampledStreamline> streamlines);
Point3 bundle_barycenter(const Bundle& b);

/// Largest distance from the barycenter to any resampled point.
double bundle_radius(std::span<const ResampledStreamline> streamlines, const Point3& barycenter);
double bundle_radius(const Bundle& b);

/// Least-squares plane normal, sign-normalized so that the first component
/// with magnitude above 1e-9 is positive.
PlaneFit fit_plane_normal(const ResampledStreamline& rs);

/// Mean of (first - midpoint) and (last - midpoint).
Vector3 direction_vector(const ResampledStreamline& rs);

/// Angle in degrees between (first - midpoint) and (last - midpoint).
/// Throws GeometryError("degenerate shape angle") when either is ~zero.
double shape_angle(const ResampledStreamline& rs);
std::optional<double> try_shape_angle(const ResampledStreamline& rs);

/// Unsigned plane angle in [0, 90] degrees.
double angle_between_planes(const Vector3& n1, const Vector3& n2);

/// Oriented angle in [0, 180] degrees. Throws GeometryError("degenerate
/// direction") on a ~zero vector.
double angle_between_directions(const Vector3& d1, const Vector3& d2);
std::optional<double> try_angle_between_directions(const Vector3& d1, const Vector3& d2);

/// Minimum vector norm (mm) treated as a defined direction.
inline constexpr double kMinVectorNorm = 1e-9;

}  // namespace geolab
