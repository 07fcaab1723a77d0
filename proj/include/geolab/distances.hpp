#pragma once

#include "geolab/streamline.hpp"

#include <span>

namespace geolab {

/// Mean pointwise distance in the given orientation (no flip).
double direct_distance(const ResampledStreamline& a, const ResampledStreamline& b);

/// Mean pointwise distance against the reversed `b`.
double flipped_distance(const ResampledStreamline& a, const ResampledStreamline& b);

/// Minimum average direct-flip distance. Throws std::invalid_argument on
/// mismatched point counts.
double mdf(const ResampledStreamline& a, const ResampledStreamline& b);

/// MDF after translating each streamline so its medial point is the origin.
/// Shape-only dissimilarity: independent translations cancel out.
double mmea(const ResampledStreamline& a, const ResampledStreamline& b);

/// Symmetric mean-of-minimum MDF between two sets; the streamline-based
/// registration cost.
double bundle_min_distance(std::span<const ResampledStreamline> a,
                           std::span<const ResampledStreamline> b);

}  // namespace geolab
