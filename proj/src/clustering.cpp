#include "geolab/clustering.hpp"

#include "geolab/distances.hpp"

#include <limits>
#include <stdexcept>

namespace geolab {

std::vector<Cluster> quickbundles(std::span<const ResampledStreamline> streamlines,
                                  double threshold_mm) {
  if (!(threshold_mm > 0.0)) throw std::invalid_argument("quickbundles: threshold must be > 0");

  std::vector<Cluster> clusters;
  std::vector<std::vector<Point3>> sums;  // running pointwise sums of aligned members

  for (std::size_t idx = 0; idx < streamlines.size(); ++idx) {
    const ResampledStreamline& s = streamlines[idx];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_cluster = clusters.size();
    bool best_flip = false;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const double direct = direct_distance(s, clusters[c].centroid);
      const double flip = flipped_distance(s, clusters[c].centroid);
      const double d = std::min(direct, flip);
      if (d < best) {
        best = d;
        best_cluster = c;
        best_flip = flip < direct;
      }
    }

    if (best_cluster == clusters.size() || !(best < threshold_mm)) {
      clusters.push_back(Cluster{s, {idx}, {false}});
      sums.emplace_back(s.points());
      continue;
    }

    Cluster& cluster = clusters[best_cluster];
    auto& sum = sums[best_cluster];
    const std::size_t k = s.size();
    for (std::size_t i = 0; i < k; ++i) sum[i] += best_flip ? s[k - 1 - i] : s[i];
    cluster.members.push_back(idx);
    cluster.flipped.push_back(best_flip);
    const double n = static_cast<double>(cluster.members.size());
    std::vector<Point3> mean(k);
    for (std::size_t i = 0; i < k; ++i) mean[i] = sum[i] / n;
    cluster.centroid = ResampledStreamline(std::move(mean));
  }
  return clusters;
}

std::vector<ResampledStreamline> centroids(const std::vector<Cluster>& clusters) {
  std::vector<ResampledStreamline> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.centroid);
  return out;
}

}  // namespace geolab
