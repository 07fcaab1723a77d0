#pragma once

// Atlas analysis: per-bundle geometry, the six feature sample sets, fitted
// distributions and the decile intervals used for labeling.

#include "geolab/distributions.hpp"
#include "geolab/streamline.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geolab {

inline constexpr std::string_view kAtlasFormatVersion = "geolab-atlas/1";

struct FeatureInterval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double v) const { return low <= v && v <= high; }
  friend bool operator==(const FeatureInterval&, const FeatureInterval&) = default;
};

enum class ThresholdSource { fitted, empirical };

std::string_view threshold_source_name(ThresholdSource s);
ThresholdSource threshold_source_from_name(std::string_view name);

struct FeatureThresholds {
  std::array<FeatureInterval, kFeatureCount> intervals{};
  std::array<ThresholdSource, kFeatureCount> sources{};

  const FeatureInterval& operator[](Feature f) const {
    return intervals[static_cast<std::size_t>(f)];
  }
  FeatureInterval& operator[](Feature f) { return intervals[static_cast<std::size_t>(f)]; }
  ThresholdSource source(Feature f) const { return sources[static_cast<std::size_t>(f)]; }

  friend bool operator==(const FeatureThresholds&, const FeatureThresholds&) = default;
};

/// Valid value range of each feature: lengths and distances are unbounded
/// above, plane angles live in [0, 90], direction and shape angles in [0, 180].
FeatureInterval feature_domain(Feature f);

/// Bundle-level reference quantities shared by atlas statistics and labeling.
struct BundleGeometry {
  Point3 barycenter = Point3::Zero();
  double radius_mm = 0.0;
  ResampledStreamline reference;  // single QuickBundles centroid of the whole bundle
  Vector3 reference_normal = Vector3::UnitZ();
  bool reference_plane_degenerate = false;
  Vector3 reference_direction = Vector3::Zero();
};

BundleGeometry describe_bundle(const Bundle& bundle);

using FeatureSamples = std::array<std::vector<double>, kFeatureCount>;

/// One value per streamline and feature; mmea is the leave-one-out nearest
/// neighbor. Degenerate values are left out of their feature's sample set.
FeatureSamples compute_feature_samples(const Bundle& bundle, const BundleGeometry& geometry);
FeatureSamples compute_feature_samples(const Bundle& bundle);

struct AtlasOptions {
  double low_quantile = 0.1;   // first decile
  double high_quantile = 0.9;  // last decile
  ThresholdSource threshold_source = ThresholdSource::fitted;
  int workers = 0;
};

struct BundleModel {
  Bundle bundle;  // coordinates stored at track-file (float32) precision
  Point3 barycenter = Point3::Zero();
  double radius_mm = 0.0;
  ResampledStreamline reference;
  Vector3 reference_normal = Vector3::UnitZ();
  bool reference_plane_degenerate = false;
  Vector3 reference_direction = Vector3::Zero();
  FeatureThresholds thresholds;
  std::array<std::optional<FittedDistribution>, kFeatureCount> fits;

  const std::string& id() const { return bundle.id; }
  BundleGeometry geometry() const;
};

struct AtlasModel {
  std::vector<BundleModel> bundles;
  int resample_k = kDefaultResamplePoints;
  std::string format_version{kAtlasFormatVersion};
};

/// Decile interval for one feature's samples. Fitted quantiles when a family
/// fit is available (and requested), empirical quantiles otherwise; clamped to
/// the feature domain and widened by 1e-3 when degenerate. The mmea interval
/// always starts at 0.
FeatureInterval feature_interval(Feature f, std::span<const double> samples,
                                 const std::optional<FittedDistribution>& fit,
                                 const AtlasOptions& options, ThresholdSource* source_out = nullptr);

/// Rounds every coordinate to float32 so that the model survives a track-file
/// round trip unchanged.
Bundle to_storage_precision(const Bundle& bundle);

BundleModel build_bundle_model(const Bundle& bundle, const AtlasOptions& options = {});
AtlasModel build_atlas(const std::vector<Bundle>& bundles, const AtlasOptions& options = {});

/// All atlas streamlines concatenated in bundle order.
std::vector<ResampledStreamline> atlas_streamlines(const AtlasModel& atlas);

}  // namespace geolab
