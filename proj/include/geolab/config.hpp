#pragma once

#include "geolab/atlas.hpp"
#include "geolab/metrics.hpp"
#include "geolab/parcellation.hpp"

#include <json.hpp>

#include <cstdint>

namespace geolab {

/// Every tunable of a pipeline run. Field names match the JSON config file.
struct RunConfig {
  int resample_k = kDefaultResamplePoints;
  double neighborhood_factor = 6.0;
  double global_qb_threshold_mm = 10.0;
  std::size_t global_min_cluster_size = 5;
  double local_qb_threshold_mm = 6.0;
  double low_decile = 0.1;
  double high_decile = 0.9;
  double ba_threshold_mm = kDefaultAdjacencyThresholdMm;
  std::size_t pbe_min_loose = kPbeMinStreamlinesLoose;
  std::size_t pbe_min_strict = kPbeMinStreamlinesStrict;
  ContainmentRule containment = ContainmentRule::all_points;
  ThresholdSource threshold_source = ThresholdSource::fitted;
  FeatureMask features = kAllFeaturesMask;
  bool winner_take_all = false;
  bool global_registration = true;
  int workers = 0;
  std::uint64_t seed = 1;
  double grid_cell_mm = 20.0;
  RegistrationOptions registration;

  AtlasOptions atlas_options() const;
  ParcellationOptions parcellation_options() const;
};

/// `workers` only changes scheduling, never results, and is left out when
/// `include_workers` is false so that output files do not depend on it.
nlohmann::json to_json(const RunConfig& config, bool include_workers = true);

/// Missing keys keep their defaults; unknown keys or bad values throw InputError.
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace geolab
