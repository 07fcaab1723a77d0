#include "geolab/distances.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace geolab {

namespace {

void require_same_count(const ResampledStreamline& a, const ResampledStreamline& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("streamline point counts differ: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
}

// MDF with an offset subtracted from every point of b (used by mmea).
double mdf_offset(const ResampledStreamline& a, const ResampledStreamline& b, const Vector3& shift) {
  const std::size_t k = a.size();
  double direct = 0.0;
  double flipped = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    direct += (a[i] - (b[i] - shift)).norm();
    flipped += (a[i] - (b[k - 1 - i] - shift)).norm();
  }
  return std::min(direct, flipped) / static_cast<double>(k);
}

}  // namespace

double direct_distance(const ResampledStreamline& a, const ResampledStreamline& b) {
  require_same_count(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).norm();
  return sum / static_cast<double>(a.size());
}

double flipped_distance(const ResampledStreamline& a, const ResampledStreamline& b) {
  require_same_count(a, b);
  const std::size_t k = a.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += (a[i] - b[k - 1 - i]).norm();
  return sum / static_cast<double>(k);
}

double mdf(const ResampledStreamline& a, const ResampledStreamline& b) {
  require_same_count(a, b);
  return mdf_offset(a, b, Vector3::Zero());
}

double mmea(const ResampledStreamline& a, const ResampledStreamline& b) {
  require_same_count(a, b);
  // a - mid(a) vs b - mid(b)  ==  a vs b - (mid(b) - mid(a))
  return mdf_offset(a, b, midpoint(b) - midpoint(a));
}

double bundle_min_distance(std::span<const ResampledStreamline> a,
                           std::span<const ResampledStreamline> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("bundle_min_distance: empty set");
  std::vector<double> min_b(b.size(), std::numeric_limits<double>::infinity());
  double sum_a = 0.0;
  for (const auto& sa : a) {
    double min_a = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = mdf(sa, b[j]);
      min_a = std::min(min_a, d);
      min_b[j] = std::min(min_b[j], d);
    }
    sum_a += min_a;
  }
  double sum_b = 0.0;
  for (double d : min_b) sum_b += d;
  return 0.5 * (sum_a / static_cast<double>(a.size()) + sum_b / static_cast<double>(b.size()));
}

}  // namespace geolab
