#include "geolab/parcellation.hpp"

#include "geolab/clustering.hpp"
#include "geolab/distances.hpp"
#include "geolab/parallel.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace geolab {

namespace {

std::size_t slot(Feature f) { return static_cast<std::size_t>(f); }

std::vector<ResampledStreamline> registration_centroids(std::span<const ResampledStreamline> lines,
                                                        double threshold_mm, std::size_t min_size) {
  const auto clusters = quickbundles(lines, threshold_mm);
  std::vector<ResampledStreamline> out;
  for (const auto& c : clusters) {
    if (c.count() >= min_size) out.push_back(c.centroid);
  }
  return out.empty() ? centroids(clusters) : out;
}

}  // namespace

std::string_view bundle_status_name(BundleStatus s) {
  return s == BundleStatus::recognized ? "recognized" : "absent";
}

BundleStatus bundle_status_from_name(std::string_view name) {
  if (name == "recognized") return BundleStatus::recognized;
  if (name == "absent") return BundleStatus::absent;
  throw InputError("unknown bundle status '" + std::string(name) + "'");
}

FeatureVector compute_features(const ResampledStreamline& candidate, const BundleModel& model) {
  FeatureVector fv;
  fv[Feature::length] = arc_length(candidate);
  fv[Feature::dist_to_barycenter] = (midpoint(candidate) - model.barycenter).norm();

  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& s : model.bundle.streamlines) nearest = std::min(nearest, mmea(candidate, s));
  fv[Feature::mmea] = nearest;

  const PlaneFit plane = fit_plane_normal(candidate);
  if (plane.degenerate || model.reference_plane_degenerate) {
    fv.degenerate[slot(Feature::plane_angle)] = true;
  } else {
    fv[Feature::plane_angle] = angle_between_planes(plane.normal, model.reference_normal);
  }
  if (auto a = try_angle_between_directions(direction_vector(candidate), model.reference_direction)) {
    fv[Feature::direction_angle] = *a;
  } else {
    fv.degenerate[slot(Feature::direction_angle)] = true;
  }
  if (auto a = try_shape_angle(candidate)) {
    fv[Feature::shape_angle] = *a;
  } else {
    fv.degenerate[slot(Feature::shape_angle)] = true;
  }
  return fv;
}

LabelDecision label_streamline(const FeatureVector& fv, const BundleModel& model,
                               const FeatureMask& mask) {
  LabelDecision d;
  d.bundle_id = model.id();
  d.features = fv;
  d.accepted = true;
  for (Feature f : kAllFeatures) {
    const std::size_t i = slot(f);
    d.passed[i] = !mask[i] || fv.degenerate[i] || model.thresholds[f].contains(fv[f]);
    d.accepted = d.accepted && d.passed[i];
  }
  return d;
}

BundleResult parcellate_bundle(const BundleModel& model, const IndexedTractogram& atlas,
                               const IndexedTractogram& subject,
                               const ParcellationOptions& options) {
  BundleResult out;
  out.bundle_id = model.id();
  const LsnrResult local =
      lsnr(model.id(), model.barycenter, model.radius_mm, atlas, subject, options.local);
  out.registration = local.registration;
  out.neighborhood_size = local.subject_neighborhood.streamline_indices.size();
  out.atlas_neighborhood_size = local.atlas_neighborhood_size;
  if (local.bundle_absent) return out;

  for (std::size_t idx : local.subject_neighborhood.streamline_indices) {
    const ResampledStreamline moved =
        apply_rigid(local.registration.transform, subject.streamlines()[idx]);
    const FeatureVector fv = compute_features(moved, model);
    const LabelDecision d = label_streamline(fv, model, options.features);
    if (d.accepted) {
      out.accepted.push_back(idx);
      out.accepted_mmea.push_back(fv[Feature::mmea]);
    }
  }
  out.status = out.accepted.empty() ? BundleStatus::absent : BundleStatus::recognized;
  return out;
}

ParcellationResult parcellate(const AtlasModel& atlas, std::span<const ResampledStreamline> subject,
                              const ParcellationOptions& options) {
  if (subject.empty()) throw InputError("subject tractogram is empty");
  if (atlas.bundles.empty()) throw InputError("atlas has no bundles");

  ParcellationResult result;
  result.subject_size = subject.size();
  std::vector<ResampledStreamline> atlas_lines = atlas_streamlines(atlas);

  std::vector<ResampledStreamline> aligned(subject.begin(), subject.end());
  if (options.global_registration) {
    const auto moving = registration_centroids(subject, options.global_centroid_threshold_mm,
                                               options.global_min_cluster_size);
    const auto fixed = registration_centroids(atlas_lines, options.global_centroid_threshold_mm,
                                              options.global_min_cluster_size);
    result.global = sbr_rigid(moving, fixed, options.local.registration);
    aligned = apply_rigid(result.global.transform, subject);
  } else {
    result.global.converged = true;
  }

  const IndexedTractogram atlas_index(std::move(atlas_lines), options.grid_cell_mm);
  const IndexedTractogram subject_index(std::move(aligned), options.grid_cell_mm);

  result.bundles.resize(atlas.bundles.size());
  parallel_for(atlas.bundles.size(), options.workers, [&](std::size_t i) {
    result.bundles[i] = parcellate_bundle(atlas.bundles[i], atlas_index, subject_index, options);
  });
  if (options.winner_take_all) apply_winner_take_all(result);
  return result;
}

RigidTransform atlas_space_transform(const ParcellationResult& result, std::size_t b) {
  return compose(result.bundles.at(b).registration.transform, result.global.transform);
}

void apply_winner_take_all(ParcellationResult& result) {
  struct Owner {
    std::size_t bundle;
    double mmea;
  };
  std::unordered_map<std::size_t, Owner> owner;
  for (std::size_t b = 0; b < result.bundles.size(); ++b) {
    const auto& br = result.bundles[b];
    for (std::size_t j = 0; j < br.accepted.size(); ++j) {
      auto [it, inserted] = owner.try_emplace(br.accepted[j], Owner{b, br.accepted_mmea[j]});
      // bundles are visited in index order, so strict < keeps the lowest index on ties
      if (!inserted && br.accepted_mmea[j] < it->second.mmea) it->second = {b, br.accepted_mmea[j]};
    }
  }
  for (std::size_t b = 0; b < result.bundles.size(); ++b) {
    auto& br = result.bundles[b];
    std::vector<std::size_t> kept;
    std::vector<double> kept_mmea;
    for (std::size_t j = 0; j < br.accepted.size(); ++j) {
      if (owner.at(br.accepted[j]).bundle == b) {
        kept.push_back(br.accepted[j]);
        kept_mmea.push_back(br.accepted_mmea[j]);
      }
    }
    br.accepted = std::move(kept);
    br.accepted_mmea = std::move(kept_mmea);
    if (br.accepted.empty()) br.status = BundleStatus::absent;
  }
}

}  // namespace geolab
