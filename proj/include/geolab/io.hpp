#pragma once

// File formats: MRtrix .tck track files, the atlas directory, 4x4 affine
// text files, parcellation result directories and truth-label files.

#include "geolab/atlas.hpp"
#include "geolab/parcellation.hpp"
#include "geolab/streamline.hpp"
#include "geolab/synth.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geolab {

namespace fs = std::filesystem;

inline constexpr std::string_view kResultFormatVersion = "geolab-result/1";
inline constexpr std::string_view kTruthFormatVersion = "geolab-truth/1";

/// Thrown for unreadable or malformed files; the message names the file and,
/// for binary data, the byte offset.
class FormatError : public InputError {
 public:
  using InputError::InputError;
};

// ---- track files ----------------------------------------------------------

/// Serialized .tck bytes: "mrtrix tracks" header with count, datatype
/// Float32LE and "file: . <offset>", then float32 triplets with a NaN triplet
/// after each streamline and a final Inf triplet.
std::string encode_tck(std::span<const Streamline> streamlines);
std::string encode_tck(std::span<const ResampledStreamline> streamlines);

/// Parses .tck bytes. `name` is used in error messages.
std::vector<Streamline> decode_tck(std::string_view bytes, std::string_view name = "<memory>");

std::vector<Streamline> read_tck(const fs::path& path);
void write_tck(const fs::path& path, std::span<const Streamline> streamlines);
void write_tck(const fs::path& path, std::span<const ResampledStreamline> streamlines);

/// Every <id>.tck in `dir`, sorted by id, resampled to `k` points.
std::vector<Bundle> read_bundle_directory(const fs::path& dir, int k = kDefaultResamplePoints);

// ---- atlas directory ------------------------------------------------------

/// manifest.json (format version, resample_k, bundle ids, build config),
/// atlas_stats.json (geometry, fits and thresholds per bundle) and one
/// <id>.tck per bundle holding its resampled streamlines.
void write_atlas(const AtlasModel& atlas, const fs::path& dir,
                 const nlohmann::json& config = nlohmann::json::object());
AtlasModel read_atlas(const fs::path& dir);

nlohmann::json bundle_model_to_json(const BundleModel& m);
/// Fills everything except `bundle`, which lives in the track file.
BundleModel bundle_model_from_json(const nlohmann::json& j);

// ---- affine prealignment --------------------------------------------------

using AffineMatrix = Eigen::Matrix4d;

/// 16 whitespace-separated numbers, row-major; last row must be (0, 0, 0, 1).
AffineMatrix read_affine(const fs::path& path);
AffineMatrix parse_affine(std::string_view text, std::string_view name = "<memory>");
std::vector<Streamline> apply_affine(const AffineMatrix& m, std::span<const Streamline> streamlines);

// ---- results --------------------------------------------------------------

nlohmann::json registration_to_json(const RegistrationResult& r);
RegistrationResult registration_from_json(const nlohmann::json& j);

/// summary.json plus one <id>.tck of accepted subject streamlines per
/// recognized bundle. `extra` entries (e.g. metrics) are merged into the
/// summary.
void write_result(const ParcellationResult& result, std::span<const Streamline> subject,
                  const fs::path& dir, const nlohmann::json& config = nlohmann::json::object(),
                  const nlohmann::json& extra = nlohmann::json::object());

struct StoredResult {
  ParcellationResult result;
  nlohmann::json config;
};
StoredResult read_result(const fs::path& dir);

// ---- truth labels ---------------------------------------------------------

/// {"format_version": ..., "labels": [bundle id or "outlier" per streamline]}
void write_truth(const fs::path& path, const std::vector<std::string>& labels);
std::vector<std::string> read_truth(const fs::path& path);

// ---- synthetic scene specs -----------------------------------------------

/// Missing keys keep their defaults; unknown keys or wrong types throw
/// InputError. Value checks happen in generate_scene.
SceneSpec scene_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SceneSpec& spec);

// ---- helpers --------------------------------------------------------------

nlohmann::json read_json_file(const fs::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const fs::path& path, const nlohmann::json& j);
/// Ids become file names: letters, digits, '_', '-', '.' only.
void validate_bundle_id(const std::string& id);

}  // namespace geolab
