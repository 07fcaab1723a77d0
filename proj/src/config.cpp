#include "geolab/config.hpp"

#include <set>

namespace geolab {

AtlasOptions RunConfig::atlas_options() const {
  AtlasOptions o;
  o.low_quantile = low_decile;
  o.high_quantile = high_decile;
  o.threshold_source = threshold_source;
  o.workers = workers;
  return o;
}

ParcellationOptions RunConfig::parcellation_options() const {
  ParcellationOptions o;
  o.global_registration = global_registration;
  o.global_centroid_threshold_mm = global_qb_threshold_mm;
  o.global_min_cluster_size = global_min_cluster_size;
  o.local.neighborhood_factor = neighborhood_factor;
  o.local.centroid_threshold_mm = local_qb_threshold_mm;
  o.local.containment = containment;
  o.local.registration = registration;
  o.features = features;
  o.winner_take_all = winner_take_all;
  o.workers = workers;
  o.grid_cell_mm = grid_cell_mm;
  return o;
}

nlohmann::json to_json(const RunConfig& c, bool include_workers) {
  nlohmann::json features = nlohmann::json::array();
  for (Feature f : kAllFeatures) {
    if (c.features[static_cast<std::size_t>(f)]) features.push_back(std::string(feature_name(f)));
  }
  nlohmann::json j = {
      {"resample_k", c.resample_k},
      {"neighborhood_factor", c.neighborhood_factor},
      {"global_qb_threshold_mm", c.global_qb_threshold_mm},
      {"global_min_cluster_size", c.global_min_cluster_size},
      {"local_qb_threshold_mm", c.local_qb_threshold_mm},
      {"low_decile", c.low_decile},
      {"high_decile", c.high_decile},
      {"ba_threshold_mm", c.ba_threshold_mm},
      {"pbe_min_loose", c.pbe_min_loose},
      {"pbe_min_strict", c.pbe_min_strict},
      {"containment", std::string(containment_name(c.containment))},
      {"threshold_source", std::string(threshold_source_name(c.threshold_source))},
      {"features", features},
      {"winner_take_all", c.winner_take_all},
      {"global_registration", c.global_registration},
      {"seed", c.seed},
      {"grid_cell_mm", c.grid_cell_mm},
      {"registration",
       {{"coarse_rotation_step_deg", c.registration.coarse_rotation_step_deg},
        {"coarse_translation_step_mm", c.registration.coarse_translation_step_mm},
        {"fine_rotation_step_deg", c.registration.fine_rotation_step_deg},
        {"fine_translation_step_mm", c.registration.fine_translation_step_mm},
        {"max_evaluations_per_stage", c.registration.max_evaluations_per_stage},
        {"cost_tolerance_mm", c.registration.cost_tolerance_mm}}},
  };
  if (include_workers) j["workers"] = c.workers;
  return j;
}

namespace {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InputError(std::string("unknown ") + where + " key '" + key + "'");
  }
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  reject_unknown(j,
                 {"resample_k", "neighborhood_factor", "global_qb_threshold_mm",
                  "global_min_cluster_size", "local_qb_threshold_mm", "low_decile", "high_decile", "ba_threshold_mm",
                  "pbe_min_loose", "pbe_min_strict", "containment", "threshold_source", "features",
                  "winner_take_all", "global_registration", "workers", "seed", "grid_cell_mm",
                  "registration"},
                 "config");
  RunConfig c;
  read_field(j, "resample_k", c.resample_k);
  read_field(j, "neighborhood_factor", c.neighborhood_factor);
  read_field(j, "global_qb_threshold_mm", c.global_qb_threshold_mm);
  read_field(j, "global_min_cluster_size", c.global_min_cluster_size);
  read_field(j, "local_qb_threshold_mm", c.local_qb_threshold_mm);
  read_field(j, "low_decile", c.low_decile);
  read_field(j, "high_decile", c.high_decile);
  read_field(j, "ba_threshold_mm", c.ba_threshold_mm);
  read_field(j, "pbe_min_loose", c.pbe_min_loose);
  read_field(j, "pbe_min_strict", c.pbe_min_strict);
  read_field(j, "winner_take_all", c.winner_take_all);
  read_field(j, "global_registration", c.global_registration);
  read_field(j, "workers", c.workers);
  read_field(j, "seed", c.seed);
  read_field(j, "grid_cell_mm", c.grid_cell_mm);

  std::string name;
  if (j.contains("containment")) {
    read_field(j, "containment", name);
    c.containment = containment_from_name(name);
  }
  if (j.contains("threshold_source")) {
    read_field(j, "threshold_source", name);
    c.threshold_source = threshold_source_from_name(name);
  }
  if (j.contains("features")) {
    std::vector<std::string> names;
    read_field(j, "features", names);
    c.features = {};
    for (const auto& n : names) c.features[static_cast<std::size_t>(feature_from_name(n))] = true;
  }
  if (j.contains("registration")) {
    const auto& r = j.at("registration");
    if (!r.is_object()) throw InputError("config field 'registration' must be an object");
    reject_unknown(r,
                   {"coarse_rotation_step_deg", "coarse_translation_step_mm",
                    "fine_rotation_step_deg", "fine_translation_step_mm",
                    "max_evaluations_per_stage", "cost_tolerance_mm"},
                   "registration");
    read_field(r, "coarse_rotation_step_deg", c.registration.coarse_rotation_step_deg);
    read_field(r, "coarse_translation_step_mm", c.registration.coarse_translation_step_mm);
    read_field(r, "fine_rotation_step_deg", c.registration.fine_rotation_step_deg);
    read_field(r, "fine_translation_step_mm", c.registration.fine_translation_step_mm);
    read_field(r, "max_evaluations_per_stage", c.registration.max_evaluations_per_stage);
    read_field(r, "cost_tolerance_mm", c.registration.cost_tolerance_mm);
  }

  if (c.resample_k < 3 || c.resample_k % 2 == 0) throw InputError("resample_k must be odd and >= 3");
  if (!(c.neighborhood_factor > 0.0)) throw InputError("neighborhood_factor must be > 0");
  if (!(c.global_qb_threshold_mm > 0.0 && c.local_qb_threshold_mm > 0.0)) {
    throw InputError("QuickBundles thresholds must be > 0");
  }
  if (!(0.0 < c.low_decile && c.low_decile < c.high_decile && c.high_decile < 1.0)) {
    throw InputError("deciles must satisfy 0 < low < high < 1");
  }
  if (!(c.ba_threshold_mm > 0.0)) throw InputError("ba_threshold_mm must be > 0");
  if (!(c.grid_cell_mm > 0.0)) throw InputError("grid_cell_mm must be > 0");
  if (c.workers < 0) throw InputError("workers must be >= 0");
  return c;
}

}  // namespace geolab
