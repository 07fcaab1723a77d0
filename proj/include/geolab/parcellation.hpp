#pragma once

// Geometric labeling of a subject tractogram against an analyzed atlas:
// global SBR, per-bundle neighborhood registration, six-feature decile test.

#include "geolab/atlas.hpp"
#include "geolab/registration.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace geolab {

using FeatureMask = std::array<bool, kFeatureCount>;
inline constexpr FeatureMask kAllFeaturesMask = {true, true, true, true, true, true};

struct ParcellationOptions {
  bool global_registration = true;
  double global_centroid_threshold_mm = 10.0;
  // Clusters smaller than this are left out of the global registration on
  // either side; isolated streamlines with no atlas counterpart otherwise pull
  // the alignment. A side with no cluster that large keeps all centroids.
  std::size_t global_min_cluster_size = 5;
  LsnrOptions local;  // neighborhood factor 6, 6 mm centroids, all-points containment
  FeatureMask features = kAllFeaturesMask;
  bool winner_take_all = false;
  int workers = 0;
  double grid_cell_mm = 20.0;
};

struct LabelDecision {
  std::size_t streamline_index = 0;
  std::string bundle_id;
  FeatureVector features;
  std::array<bool, kFeatureCount> passed{};
  bool accepted = false;
};

/// The six features of `candidate` relative to `model`, computed exactly as
/// the atlas samples were, except that mmea is the minimum over every model
/// streamline (no leave-one-out).
FeatureVector compute_features(const ResampledStreamline& candidate, const BundleModel& model);

/// Closed-interval test per feature; degenerate features and features
/// switched off in `mask` pass automatically.
LabelDecision label_streamline(const FeatureVector& fv, const BundleModel& model,
                               const FeatureMask& mask = kAllFeaturesMask);

enum class BundleStatus { recognized, absent };
std::string_view bundle_status_name(BundleStatus s);
BundleStatus bundle_status_from_name(std::string_view name);

struct BundleResult {
  std::string bundle_id;
  BundleStatus status = BundleStatus::absent;
  std::vector<std::size_t> accepted;   // subject indices, ascending
  std::vector<double> accepted_mmea;   // parallel to accepted
  RegistrationResult registration;     // local neighborhood registration
  std::size_t neighborhood_size = 0;
  std::size_t atlas_neighborhood_size = 0;

  friend bool operator==(const BundleResult&, const BundleResult&) = default;
};

struct ParcellationResult {
  std::vector<BundleResult> bundles;  // atlas bundle order
  RegistrationResult global;
  std::size_t subject_size = 0;

  friend bool operator==(const ParcellationResult&, const ParcellationResult&) = default;
};

/// Labels the (globally aligned) subject against one bundle model.
BundleResult parcellate_bundle(const BundleModel& model, const IndexedTractogram& atlas,
                               const IndexedTractogram& subject,
                               const ParcellationOptions& options = {});

/// Full pipeline. Throws InputError on an empty subject.
ParcellationResult parcellate(const AtlasModel& atlas, std::span<const ResampledStreamline> subject,
                              const ParcellationOptions& options = {});

/// Subject-to-atlas transform under which bundle `b` was labeled: the global
/// registration followed by the bundle's local one.
RigidTransform atlas_space_transform(const ParcellationResult& result, std::size_t b);

/// Keeps each multiply-labeled streamline only in the bundle where its mmea
/// feature is smallest (lowest bundle index on ties).
void apply_winner_take_all(ParcellationResult& result);

}  // namespace geolab
