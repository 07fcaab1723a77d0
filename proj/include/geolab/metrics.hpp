#pragma once

// Evaluation scores for extracted bundles. Undefined values (empty
// denominators) are returned as nullopt / flagged rather than coerced to 0 so
// that aggregates can skip them.

#include "geolab/parcellation.hpp"
#include "geolab/streamline.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace geolab {

inline constexpr double kDefaultAdjacencyThresholdMm = 5.0;
inline constexpr std::size_t kPbeMinStreamlinesLoose = 1;
inline constexpr std::size_t kPbeMinStreamlinesStrict = 10;

struct BundleScore {
  bool defined = false;  // false when the truth set is empty
  double sensitivity = 0.0;
  double precision = 0.0;
  double jaccard = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
  // set only when the tractogram size is known
  std::optional<double> specificity;
  std::optional<double> accuracy;
};

/// Index-set confusion scores. Pass the tractogram size to also get
/// specificity and accuracy.
BundleScore confusion_scores(std::span<const std::size_t> labeled, std::span<const std::size_t> truth,
                             std::optional<std::size_t> tractogram_size = std::nullopt);

/// Number of streamlines in `set` at MDF strictly below the threshold.
std::size_t count_neighbors(const ResampledStreamline& s, std::span<const ResampledStreamline> set,
                            double threshold_mm);

/// 0.5 * (fraction of A with a neighbor in B + fraction of B with a neighbor in A).
std::optional<double> bundle_adjacency(std::span<const ResampledStreamline> a,
                                       std::span<const ResampledStreamline> b,
                                       double threshold_mm = kDefaultAdjacencyThresholdMm);

/// Fraction of extracted streamlines with at least one model neighbor.
std::optional<double> coverage(std::span<const ResampledStreamline> extracted,
                               std::span<const ResampledStreamline> model,
                               double threshold_mm = kDefaultAdjacencyThresholdMm);

/// Mean number of model neighbors per extracted streamline.
std::optional<double> overlap(std::span<const ResampledStreamline> extracted,
                              std::span<const ResampledStreamline> model,
                              double threshold_mm = kDefaultAdjacencyThresholdMm);

/// Percentage of atlas bundles with at least `min_streamlines` accepted.
double pbe(const ParcellationResult& result, std::size_t min_streamlines);
double pbe(std::span<const std::size_t> per_bundle_counts, std::size_t min_streamlines);

struct SpbSummary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population standard deviation
  std::size_t bundles = 0;
};

/// Streamlines per recognized bundle; absent bundles are excluded.
std::optional<SpbSummary> spb(const ParcellationResult& result);
std::optional<SpbSummary> spb(std::span<const std::size_t> per_bundle_counts);

}  // namespace geolab
