#pragma once

#include "geolab/streamline.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace geolab {

struct Cluster {
  ResampledStreamline centroid;         // pointwise mean of flip-aligned members
  std::vector<std::size_t> members;     // input indices, in assignment order
  std::vector<bool> flipped;            // parallel to members

  std::size_t count() const noexcept { return members.size(); }
};

/// One-pass QuickBundles. Streamlines are visited in input order; each joins
/// the nearest centroid when its MDF is below `threshold_mm`, otherwise it
/// seeds a new cluster. Pass +infinity to collapse everything into one cluster.
std::vector<Cluster> quickbundles(std::span<const ResampledStreamline> streamlines,
                                  double threshold_mm);

/// Centroid streamlines of `quickbundles`, in cluster order.
std::vector<ResampledStreamline> centroids(const std::vector<Cluster>& clusters);

}  // namespace geolab
