#include "geolab/atlas.hpp"

#include "geolab/clustering.hpp"
#include "geolab/distances.hpp"
#include "geolab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace geolab {

namespace {

constexpr double kDegenerateWidening = 1e-3;

std::size_t slot(Feature f) { return static_cast<std::size_t>(f); }

}  // namespace

std::string_view threshold_source_name(ThresholdSource s) {
  return s == ThresholdSource::fitted ? "fitted" : "empirical";
}

ThresholdSource threshold_source_from_name(std::string_view name) {
  if (name == "fitted") return ThresholdSource::fitted;
  if (name == "empirical") return ThresholdSource::empirical;
  throw InputError("unknown threshold source '" + std::string(name) + "'");
}

FeatureInterval feature_domain(Feature f) {
  switch (f) {
    case Feature::plane_angle: return {0.0, 90.0};
    case Feature::direction_angle:
    case Feature::shape_angle: return {0.0, 180.0};
    default: return {0.0, std::numeric_limits<double>::max()};
  }
}

BundleGeometry describe_bundle(const Bundle& bundle) {
  if (bundle.streamlines.empty()) throw InputError("bundle '" + bundle.id + "' is empty");
  BundleGeometry g;
  g.barycenter = bundle_barycenter(bundle.streamlines);
  g.radius_mm = bundle_radius(bundle.streamlines, g.barycenter);
  g.reference =
      quickbundles(bundle.streamlines, std::numeric_limits<double>::infinity()).front().centroid;
  const PlaneFit plane = fit_plane_normal(g.reference);
  g.reference_normal = plane.normal;
  g.reference_plane_degenerate = plane.degenerate;
  g.reference_direction = direction_vector(g.reference);
  return g;
}

FeatureSamples compute_feature_samples(const Bundle& bundle, const BundleGeometry& g) {
  const auto& lines = bundle.streamlines;
  if (lines.size() < 2) {
    throw InputError("bundle '" + bundle.id + "' needs at least 2 streamlines for statistics");
  }
  FeatureSamples out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& s = lines[i];
    out[slot(Feature::length)].push_back(arc_length(s));
    out[slot(Feature::dist_to_barycenter)].push_back((midpoint(s) - g.barycenter).norm());

    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (j != i) nearest = std::min(nearest, mmea(s, lines[j]));
    }
    out[slot(Feature::mmea)].push_back(nearest);

    const PlaneFit plane = fit_plane_normal(s);
    if (!plane.degenerate && !g.reference_plane_degenerate) {
      out[slot(Feature::plane_angle)].push_back(angle_between_planes(plane.normal, g.reference_normal));
    }
    if (auto a = try_angle_between_directions(direction_vector(s), g.reference_direction)) {
      out[slot(Feature::direction_angle)].push_back(*a);
    }
    if (auto a = try_shape_angle(s)) out[slot(Feature::shape_angle)].push_back(*a);
  }
  return out;
}

FeatureSamples compute_feature_samples(const Bundle& bundle) {
  return compute_feature_samples(bundle, describe_bundle(bundle));
}

FeatureInterval feature_interval(Feature f, std::span<const double> samples,
                                 const std::optional<FittedDistribution>& fit,
                                 const AtlasOptions& options, ThresholdSource* source_out) {
  const FeatureInterval domain = feature_domain(f);
  FeatureInterval iv;
  ThresholdSource source = ThresholdSource::empirical;
  if (samples.empty()) {
    // feature undefined for the whole bundle: it cannot discriminate
    iv = domain;
  } else if (fit && options.threshold_source == ThresholdSource::fitted) {
    iv = {fit->quantile(options.low_quantile), fit->quantile(options.high_quantile)};
    source = ThresholdSource::fitted;
  } else {
    iv = {empirical_quantile(samples, options.low_quantile),
          empirical_quantile(samples, options.high_quantile)};
  }

  // A subject streamline is compared against every model streamline, itself
  // included when it comes from the atlas, while atlas mmea samples are
  // leave-one-out. A near-zero dissimilarity is therefore a perfect match and
  // must not be cut by a lower bound.
  if (f == Feature::mmea) iv.low = 0.0;

  iv.low = std::clamp(iv.low, domain.low, domain.high);
  iv.high = std::clamp(iv.high, domain.low, domain.high);
  if (!(iv.low < iv.high)) {
    const double center = 0.5 * (iv.low + iv.high);
    iv.low = std::max(domain.low, center - kDegenerateWidening);
    iv.high = std::min(domain.high, center + kDegenerateWidening);
  }
  if (source_out) *source_out = source;
  return iv;
}

Bundle to_storage_precision(const Bundle& bundle) {
  Bundle out;
  out.id = bundle.id;
  out.streamlines.reserve(bundle.streamlines.size());
  for (const auto& rs : bundle.streamlines) {
    std::vector<Point3> pts(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      pts[i] = rs[i].cast<float>().cast<double>();
    }
    out.streamlines.emplace_back(std::move(pts));
  }
  return out;
}

BundleGeometry BundleModel::geometry() const {
  BundleGeometry g;
  g.barycenter = barycenter;
  g.radius_mm = radius_mm;
  g.reference = reference;
  g.reference_normal = reference_normal;
  g.reference_plane_degenerate = reference_plane_degenerate;
  g.reference_direction = reference_direction;
  return g;
}

BundleModel build_bundle_model(const Bundle& bundle, const AtlasOptions& options) {
  if (bundle.streamlines.size() < 2) {
    throw InputError("atlas bundle too small: '" + bundle.id + "' has " +
                     std::to_string(bundle.streamlines.size()) + " streamline(s)");
  }
  BundleModel m;
  m.bundle = to_storage_precision(bundle);
  const BundleGeometry g = describe_bundle(m.bundle);
  m.barycenter = g.barycenter;
  m.radius_mm = g.radius_mm;
  m.reference = g.reference;
  m.reference_normal = g.reference_normal;
  m.reference_plane_degenerate = g.reference_plane_degenerate;
  m.reference_direction = g.reference_direction;

  const FeatureSamples samples = compute_feature_samples(m.bundle, g);
  for (Feature f : kAllFeatures) {
    const auto& values = samples[slot(f)];
    std::optional<FittedDistribution> best;
    if (options.threshold_source == ThresholdSource::fitted) best = select_best(values).best;
    m.fits[slot(f)] = best;
    ThresholdSource source{};
    m.thresholds[f] = feature_interval(f, values, best, options, &source);
    m.thresholds.sources[slot(f)] = source;
  }
  return m;
}

AtlasModel build_atlas(const std::vector<Bundle>& bundles, const AtlasOptions& options) {
  if (bundles.empty()) throw InputError("atlas needs at least one bundle");
  std::set<std::string> seen;
  for (const auto& b : bundles) {
    if (!seen.insert(b.id).second) throw InputError("duplicate bundle id '" + b.id + "'");
  }
  AtlasModel atlas;
  atlas.resample_k = static_cast<int>(bundles.front().streamlines.empty()
                                          ? kDefaultResamplePoints
                                          : bundles.front().streamlines.front().size());
  atlas.bundles.resize(bundles.size());
  parallel_for(bundles.size(), options.workers,
               [&](std::size_t i) { atlas.bundles[i] = build_bundle_model(bundles[i], options); });
  return atlas;
}

std::vector<ResampledStreamline> atlas_streamlines(const AtlasModel& atlas) {
  std::vector<ResampledStreamline> out;
  for (const auto& m : atlas.bundles) {
    out.insert(out.end(), m.bundle.streamlines.begin(), m.bundle.streamlines.end());
  }
  return out;
}

}  // namespace geolab
