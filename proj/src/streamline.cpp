#include "geolab/streamline.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geolab {

namespace {

double clamped_acos_deg(double c) {
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

}  // namespace

Streamline::Streamline(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw InputError("streamline needs at least 2 points, got " + std::to_string(points_.size()));
  }
  for (const auto& p : points_) {
    if (!p.allFinite()) throw InputError("streamline contains a non-finite coordinate");
  }
}

ResampledStreamline::ResampledStreamline(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw InputError("resampled streamline needs at least 2 points");
  }
}

ResampledStreamline ResampledStreamline::reversed() const {
  std::vector<Point3> pts(points_.rbegin(), points_.rend());
  return ResampledStreamline(std::move(pts));
}

ResampledStreamline ResampledStreamline::translated(const Vector3& offset) const {
  std::vector<Point3> pts = points_;
  for (auto& p : pts) p += offset;
  return ResampledStreamline(std::move(pts));
}

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::length: return "length";
    case Feature::dist_to_barycenter: return "dist_to_barycenter";
    case Feature::mmea: return "mmea";
    case Feature::plane_angle: return "plane_angle";
    case Feature::direction_angle: return "direction_angle";
    case Feature::shape_angle: return "shape_angle";
  }
  return "unknown";
}

Feature feature_from_name(std::string_view name) {
  for (Feature f : kAllFeatures) {
    if (feature_name(f) == name) return f;
  }
  throw InputError("unknown feature '" + std::string(name) + "'");
}

ResampledStreamline resample(const Streamline& s, int k) {
  if (k < 2) throw std::invalid_argument("resample: k must be >= 2");

  std::vector<Point3> pts;
  pts.reserve(s.size());
  for (const auto& p : s.points()) {
    if (pts.empty() || p != pts.back()) pts.push_back(p);
  }
  if (pts.size() < 2) throw GeometryError("zero-length streamline");

  std::vector<double> cumulative(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + (pts[i] - pts[i - 1]).norm();
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw GeometryError("zero-length streamline");

  std::vector<Point3> out(static_cast<std::size_t>(k));
  out.front() = pts.front();
  out.back() = pts.back();
  std::size_t seg = 1;
  for (int i = 1; i < k - 1; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(k - 1);
    while (seg < pts.size() - 1 && cumulative[seg] < target) ++seg;
    const double span = cumulative[seg] - cumulative[seg - 1];
    const double t = span > 0.0 ? (target - cumulative[seg - 1]) / span : 0.0;
    out[static_cast<std::size_t>(i)] = pts[seg - 1] + t * (pts[seg] - pts[seg - 1]);
  }
  return ResampledStreamline(std::move(out));
}

double arc_length(const Streamline& s) {
  double total = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) total += (s[i] - s[i - 1]).norm();
  return total;
}

double arc_length(const ResampledStreamline& rs) {
  double total = 0.0;
  for (std::size_t i = 1; i < rs.size(); ++i) total += (rs[i] - rs[i - 1]).norm();
  return total;
}

const Point3& midpoint(const ResampledStreamline& rs) {
  if (rs.size() % 2 == 0) throw std::invalid_argument("midpoint: point count must be odd");
  return rs[(rs.size() - 1) / 2];
}

Point3 bundle_barycenter(std::span<const ResampledStreamline> streamlines) {
  if (streamlines.empty()) throw std::invalid_argument("bundle_barycenter: empty bundle");
  Point3 sum = Point3::Zero();
  std::size_t n = 0;
  for (const auto& rs : streamlines) {
    for (const auto& p : rs.points()) sum += p;
    n += rs.size();
  }
  return sum / static_cast<double>(n);
}

Point3 bundle_barycenter(const Bundle& b) { return bundle_barycenter(b.streamlines); }

double bundle_radius(std::span<const ResampledStreamline> streamlines, const Point3& barycenter) {
  double r2 = 0.0;
  for (const auto& rs : streamlines) {
    for (const auto& p : rs.points()) r2 = std::max(r2, (p - barycenter).squaredNorm());
  }
  return std::sqrt(r2);
}

double bundle_radius(const Bundle& b) {
  return bundle_radius(b.streamlines, bundle_barycenter(b));
}

PlaneFit fit_plane_normal(const ResampledStreamline& rs) {
  if (rs.size() < 3) throw std::invalid_argument("fit_plane_normal: need at least 3 points");
  Point3 mean = Point3::Zero();
  for (const auto& p : rs.points()) mean += p;
  mean /= static_cast<double>(rs.size());

  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : rs.points()) {
    const Vector3 d = p - mean;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
  const auto& ev = solver.eigenvalues();  // ascending

  PlaneFit fit;
  fit.normal = solver.eigenvectors().col(0).normalized();
  fit.degenerate = ev(1) <= 1e-10 * std::max(ev(2), 1e-300);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(fit.normal(i)) > 1e-9) {
      if (fit.normal(i) < 0.0) fit.normal = -fit.normal;
      break;
    }
  }
  return fit;
}

Vector3 direction_vector(const ResampledStreamline& rs) {
  const Point3& m = midpoint(rs);
  return 0.5 * ((rs.front() - m) + (rs.back() - m));
}

std::optional<double> try_shape_angle(const ResampledStreamline& rs) {
  const Point3& m = midpoint(rs);
  const Vector3 v1 = rs.front() - m;
  const Vector3 v2 = rs.back() - m;
  const double n1 = v1.norm();
  const double n2 = v2.norm();
  if (n1 <= kMinVectorNorm || n2 <= kMinVectorNorm) return std::nullopt;
  return clamped_acos_deg(v1.dot(v2) / (n1 * n2));
}

double shape_angle(const ResampledStreamline& rs) {
  auto angle = try_shape_angle(rs);
  if (!angle) throw GeometryError("degenerate shape angle");
  return *angle;
}

double angle_between_planes(const Vector3& n1, const Vector3& n2) {
  return clamped_acos_deg(std::abs(n1.dot(n2)));
}

std::optional<double> try_angle_between_directions(const Vector3& d1, const Vector3& d2) {
  const double a = d1.norm();
  const double b = d2.norm();
  if (a <= kMinVectorNorm || b <= kMinVectorNorm) return std::nullopt;
  return clamped_acos_deg(d1.dot(d2) / (a * b));
}

double angle_between_directions(const Vector3& d1, const Vector3& d2) {
  auto angle = try_angle_between_directions(d1, d2);
  if (!angle) throw GeometryError("degenerate direction");
  return *angle;
}

}  // namespace geolab
