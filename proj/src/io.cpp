#include "geolab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <type_traits>

namespace geolab {

namespace {

constexpr std::string_view kTckMagic = "mrtrix tracks";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void append_float_le(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

float read_float_le(std::string_view bytes, std::size_t at) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return std::bit_cast<float>(bits);
}

template <class Lines>
std::string encode_tck_impl(const Lines& lines) {
  std::string data;
  for (const auto& s : lines) {
    for (const auto& p : s.points()) {
      for (int c = 0; c < 3; ++c) append_float_le(data, static_cast<float>(p(c)));
    }
    for (int c = 0; c < 3; ++c) append_float_le(data, std::numeric_limits<float>::quiet_NaN());
  }
  for (int c = 0; c < 3; ++c) append_float_le(data, std::numeric_limits<float>::infinity());

  const std::string fixed = std::string(kTckMagic) + "\ncount: " + std::to_string(lines.size()) +
                            "\ndatatype: Float32LE\nfile: . ";
  const std::string tail = "\nEND\n";
  // offset is the header length, which depends on the offset's own digit count
  std::size_t offset = fixed.size() + tail.size() + 1;
  while (fixed.size() + std::to_string(offset).size() + tail.size() != offset) {
    offset = fixed.size() + std::to_string(offset).size() + tail.size();
  }
  return fixed + std::to_string(offset) + tail + data;
}

nlohmann::json vec_json(const Vector3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vector3 vec_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw FormatError(std::string("expected a 3-vector for '") + what + "'");
  }
  return Vector3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + ": missing field '" + key + "'");
  return *it;
}

nlohmann::json fit_to_json(const FittedDistribution& d) {
  return {{"family", std::string(family_name(d.family))},
          {"params", d.params},
          {"shift", d.shift},
          {"support", {d.support_lo, d.support_hi}},
          {"sse", d.sse},
          {"log_likelihood", d.log_likelihood}};
}

FittedDistribution fit_from_json(const nlohmann::json& j, const std::string& where) {
  FittedDistribution d;
  d.family = family_from_name(require(j, "family", where).get<std::string>());
  d.params = require(j, "params", where).get<std::array<double, 3>>();
  d.shift = require(j, "shift", where).get<double>();
  const auto support = require(j, "support", where).get<std::array<double, 2>>();
  d.support_lo = support[0];
  d.support_hi = support[1];
  d.sse = require(j, "sse", where).get<double>();
  d.log_likelihood = require(j, "log_likelihood", where).get<double>();
  return d;
}

}  // namespace

std::string encode_tck(std::span<const Streamline> streamlines) { return encode_tck_impl(streamlines); }

std::string encode_tck(std::span<const ResampledStreamline> streamlines) {
  return encode_tck_impl(streamlines);
}

std::vector<Streamline> decode_tck(std::string_view bytes, std::string_view name_view) {
  const std::string name(name_view);
  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= bytes.size()) return false;
    const std::size_t nl = bytes.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? bytes.size() : nl;
    line.assign(bytes.substr(pos, end - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = nl == std::string_view::npos ? bytes.size() : nl + 1;
    return true;
  };

  std::string line;
  if (!next_line(line) || line != kTckMagic) {
    throw FormatError(name + ": bad magic at byte 0 (expected \"mrtrix tracks\")");
  }
  std::map<std::string, std::string> header;
  bool terminated = false;
  while (next_line(line)) {
    if (line == "END") {
      terminated = true;
      break;
    }
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    header[line.substr(0, colon)] = value;
  }
  if (!terminated) throw FormatError(name + ": header not terminated by END");
  const std::size_t header_end = pos;

  auto it = header.find("datatype");
  if (it == header.end() || it->second != "Float32LE") {
    throw FormatError(name + ": unsupported datatype '" +
                      (it == header.end() ? std::string("<missing>") : it->second) +
                      "' (expected Float32LE)");
  }
  it = header.find("file");
  if (it == header.end()) throw FormatError(name + ": missing 'file' field in header");
  std::size_t offset = 0;
  {
    std::istringstream is(it->second);
    std::string dot;
    long long raw = -1;
    if (!(is >> dot >> raw) || dot != "." || raw < 0) {
      throw FormatError(name + ": malformed 'file' field '" + it->second + "'");
    }
    offset = static_cast<std::size_t>(raw);
  }
  if (offset < header_end) {
    throw FormatError(name + ": data offset " + std::to_string(offset) +
                      " points inside the header (header ends at byte " +
                      std::to_string(header_end) + ")");
  }
  if (offset > bytes.size()) {
    throw FormatError(name + ": data offset " + std::to_string(offset) +
                      " is beyond the end of the file (" + std::to_string(bytes.size()) +
                      " bytes)");
  }
  if ((bytes.size() - offset) % 12 != 0) {
    throw FormatError(name + ": truncated binary section: " +
                      std::to_string(bytes.size() - offset) + " bytes after offset " +
                      std::to_string(offset) + " is not a whole number of float triplets");
  }

  std::vector<Streamline> out;
  std::vector<Point3> current;
  bool finished = false;
  std::size_t at = offset;
  for (; at + 12 <= bytes.size(); at += 12) {
    const float x = read_float_le(bytes, at);
    const float y = read_float_le(bytes, at + 4);
    const float z = read_float_le(bytes, at + 8);
    if (std::isnan(x) && std::isnan(y) && std::isnan(z)) {
      if (current.size() < 2) {
        throw FormatError(name + ": streamline " + std::to_string(out.size()) + " ending at byte " +
                          std::to_string(at) + " has " + std::to_string(current.size()) +
                          " point(s); at least 2 required");
      }
      out.emplace_back(std::move(current));
      current.clear();
      continue;
    }
    if (std::isinf(x) && std::isinf(y) && std::isinf(z)) {
      finished = true;
      break;
    }
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw FormatError(name + ": non-finite coordinate at byte " + std::to_string(at));
    }
    current.emplace_back(x, y, z);
  }
  if (!finished) {
    throw FormatError(name + ": missing end-of-data (Inf) triplet; data ends at byte " +
                      std::to_string(bytes.size()));
  }
  if (!current.empty()) {
    // last streamline written without its NaN delimiter
    if (current.size() < 2) {
      throw FormatError(name + ": final streamline before byte " + std::to_string(at) +
                        " has a single point");
    }
    out.emplace_back(std::move(current));
  }

  it = header.find("count");
  if (it != header.end()) {
    std::size_t expected = 0;
    std::istringstream is(it->second);
    if (!(is >> expected)) throw FormatError(name + ": malformed count '" + it->second + "'");
    if (expected != out.size()) {
      throw FormatError(name + ": header count " + std::to_string(expected) + " but " +
                        std::to_string(out.size()) + " streamlines decoded");
    }
  }
  return out;
}

std::vector<Streamline> read_tck(const fs::path& path) {
  return decode_tck(read_file(path), path.string());
}

void write_tck(const fs::path& path, std::span<const Streamline> streamlines) {
  write_file(path, encode_tck(streamlines));
}

void write_tck(const fs::path& path, std::span<const ResampledStreamline> streamlines) {
  write_file(path, encode_tck(streamlines));
}

void validate_bundle_id(const std::string& id) {
  const bool ok = !id.empty() && id != "." && id != ".." &&
                  std::all_of(id.begin(), id.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                           c == '.';
                  });
  if (!ok) throw InputError("invalid bundle id '" + id + "' (allowed: letters, digits, _ - .)");
}

std::vector<Bundle> read_bundle_directory(const fs::path& dir, int k) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tck") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .tck files in '" + dir.string() + "'");
  std::vector<Bundle> bundles;
  for (const auto& f : files) {
    Bundle b;
    b.id = f.stem().string();
    validate_bundle_id(b.id);
    for (const auto& s : read_tck(f)) b.streamlines.push_back(resample(s, k));
    bundles.push_back(std::move(b));
  }
  return bundles;
}

nlohmann::json read_json_file(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

nlohmann::json bundle_model_to_json(const BundleModel& m) {
  nlohmann::json reference = nlohmann::json::array();
  for (const auto& p : m.reference.points()) reference.push_back(vec_json(p));
  nlohmann::json thresholds = nlohmann::json::object();
  nlohmann::json fits = nlohmann::json::object();
  for (Feature f : kAllFeatures) {
    const std::string name(feature_name(f));
    thresholds[name] = {{"low", m.thresholds[f].low},
                        {"high", m.thresholds[f].high},
                        {"source", std::string(threshold_source_name(m.thresholds.source(f)))}};
    const auto& fit = m.fits[static_cast<std::size_t>(f)];
    fits[name] = fit ? fit_to_json(*fit) : nlohmann::json(nullptr);
  }
  return {{"barycenter", vec_json(m.barycenter)},
          {"radius_mm", m.radius_mm},
          {"reference", reference},
          {"reference_normal", vec_json(m.reference_normal)},
          {"reference_plane_degenerate", m.reference_plane_degenerate},
          {"reference_direction", vec_json(m.reference_direction)},
          {"streamline_count", m.bundle.streamlines.size()},
          {"thresholds", thresholds},
          {"fits", fits}};
}

BundleModel bundle_model_from_json(const nlohmann::json& j) {
  const std::string where = "bundle statistics";
  BundleModel m;
  try {
    m.barycenter = vec_from(require(j, "barycenter", where), "barycenter");
    m.radius_mm = require(j, "radius_mm", where).get<double>();
    std::vector<Point3> ref;
    for (const auto& p : require(j, "reference", where)) ref.push_back(vec_from(p, "reference"));
    m.reference = ResampledStreamline(std::move(ref));
    m.reference_normal = vec_from(require(j, "reference_normal", where), "reference_normal");
    m.reference_plane_degenerate = require(j, "reference_plane_degenerate", where).get<bool>();
    m.reference_direction = vec_from(require(j, "reference_direction", where), "reference_direction");
    const auto& thresholds = require(j, "thresholds", where);
    const auto& fits = require(j, "fits", where);
    for (Feature f : kAllFeatures) {
      const std::string name(feature_name(f));
      const auto& t = require(thresholds, name.c_str(), where + " thresholds");
      m.thresholds[f] = {require(t, "low", name).get<double>(), require(t, "high", name).get<double>()};
      m.thresholds.sources[static_cast<std::size_t>(f)] =
          threshold_source_from_name(require(t, "source", name).get<std::string>());
      if (!(m.thresholds[f].low < m.thresholds[f].high)) {
        throw FormatError(where + ": threshold for '" + name + "' has low >= high");
      }
      const auto& fit = require(fits, name.c_str(), where + " fits");
      if (!fit.is_null()) m.fits[static_cast<std::size_t>(f)] = fit_from_json(fit, name);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
  return m;
}

void write_atlas(const AtlasModel& atlas, const fs::path& dir, const nlohmann::json& config) {
  fs::create_directories(dir);
  nlohmann::json ids = nlohmann::json::array();
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& m : atlas.bundles) {
    validate_bundle_id(m.id());
    ids.push_back(m.id());
    stats[m.id()] = bundle_model_to_json(m);
    write_tck(dir / (m.id() + ".tck"), m.bundle.streamlines);
  }
  write_json_file(dir / "manifest.json", {{"format_version", atlas.format_version},
                                          {"resample_k", atlas.resample_k},
                                          {"bundles", ids},
                                          {"config", config}});
  write_json_file(dir / "atlas_stats.json",
                  {{"format_version", atlas.format_version}, {"bundles", stats}});
}

AtlasModel read_atlas(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("atlas directory not found: '" + dir.string() + "'");
  const auto manifest = read_json_file(dir / "manifest.json");
  const auto stats = read_json_file(dir / "atlas_stats.json");
  const std::string where = (dir / "manifest.json").string();

  AtlasModel atlas;
  try {
    const auto version = require(manifest, "format_version", where).get<std::string>();
    if (version != kAtlasFormatVersion) {
      throw FormatError(where + ": format version mismatch: expected '" +
                        std::string(kAtlasFormatVersion) + "', found '" + version + "'");
    }
    const auto stats_version = require(stats, "format_version", "atlas_stats.json").get<std::string>();
    if (stats_version != kAtlasFormatVersion) {
      throw FormatError("atlas_stats.json: format version mismatch: expected '" +
                        std::string(kAtlasFormatVersion) + "', found '" + stats_version + "'");
    }
    atlas.format_version = version;
    atlas.resample_k = require(manifest, "resample_k", where).get<int>();
    const auto& stat_bundles = require(stats, "bundles", "atlas_stats.json");
    for (const auto& id_json : require(manifest, "bundles", where)) {
      const auto id = id_json.get<std::string>();
      validate_bundle_id(id);
      auto it = stat_bundles.find(id);
      if (it == stat_bundles.end()) {
        throw FormatError("atlas_stats.json: missing statistics for bundle '" + id + "'");
      }
      BundleModel m = bundle_model_from_json(*it);
      m.bundle.id = id;
      const fs::path track = dir / (id + ".tck");
      if (!fs::exists(track)) throw FormatError("missing track file '" + track.string() + "'");
      for (const auto& s : read_tck(track)) {
        if (static_cast<int>(s.size()) != atlas.resample_k) {
          throw FormatError(track.string() + ": streamline has " + std::to_string(s.size()) +
                            " points, expected " + std::to_string(atlas.resample_k));
        }
        m.bundle.streamlines.emplace_back(s.points());
      }
      atlas.bundles.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
  return atlas;
}

AffineMatrix parse_affine(std::string_view text, std::string_view name_view) {
  const std::string name(name_view);
  std::istringstream is{std::string(text)};
  AffineMatrix m;
  std::vector<double> values;
  std::string token;
  while (is >> token) {
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      values.push_back(v);
    } catch (const std::exception&) {
      throw FormatError(name + ": not a number: '" + token + "'");
    }
  }
  if (values.size() != 16) {
    throw FormatError(name + ": expected 16 numbers for a 4x4 matrix, found " +
                      std::to_string(values.size()));
  }
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = values[static_cast<std::size_t>(4 * r + c)];
  }
  if (!m.allFinite()) throw FormatError(name + ": non-finite matrix entry");
  const Eigen::RowVector4d expected(0, 0, 0, 1);
  if ((m.row(3) - expected).cwiseAbs().maxCoeff() > 1e-9) {
    throw FormatError(name + ": last row must be 0 0 0 1 for an affine transform");
  }
  return m;
}

AffineMatrix read_affine(const fs::path& path) { return parse_affine(read_file(path), path.string()); }

std::vector<Streamline> apply_affine(const AffineMatrix& m, std::span<const Streamline> streamlines) {
  const Eigen::Matrix3d linear = m.topLeftCorner<3, 3>();
  const Vector3 offset = m.topRightCorner<3, 1>();
  std::vector<Streamline> out;
  out.reserve(streamlines.size());
  for (const auto& s : streamlines) {
    std::vector<Point3> pts;
    pts.reserve(s.size());
    for (const auto& p : s.points()) pts.push_back(linear * p + offset);
    out.emplace_back(std::move(pts));
  }
  return out;
}

nlohmann::json registration_to_json(const RegistrationResult& r) {
  return {{"transform",
           {{"rotation_deg", vec_json(r.transform.rotation_deg)},
            {"translation_mm", vec_json(r.transform.translation)},
            {"pivot", vec_json(r.transform.pivot)}}},
          {"initial_cost_mm", r.initial_cost_mm},
          {"final_cost_mm", r.final_cost_mm},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

RegistrationResult registration_from_json(const nlohmann::json& j) {
  const std::string where = "registration";
  RegistrationResult r;
  const auto& t = require(j, "transform", where);
  r.transform.rotation_deg = vec_from(require(t, "rotation_deg", where), "rotation_deg");
  r.transform.translation = vec_from(require(t, "translation_mm", where), "translation_mm");
  r.transform.pivot = vec_from(require(t, "pivot", where), "pivot");
  r.initial_cost_mm = require(j, "initial_cost_mm", where).get<double>();
  r.final_cost_mm = require(j, "final_cost_mm", where).get<double>();
  r.iterations = require(j, "iterations", where).get<int>();
  r.converged = require(j, "converged", where).get<bool>();
  return r;
}

void write_result(const ParcellationResult& result, std::span<const Streamline> subject,
                  const fs::path& dir, const nlohmann::json& config, const nlohmann::json& extra) {
  if (subject.size() != result.subject_size) {
    throw InputError("write_result: subject has " + std::to_string(subject.size()) +
                     " streamlines but the result was computed on " +
                     std::to_string(result.subject_size));
  }
  fs::create_directories(dir);
  nlohmann::json bundles = nlohmann::json::array();
  for (const auto& b : result.bundles) {
    validate_bundle_id(b.bundle_id);
    bundles.push_back({{"id", b.bundle_id},
                       {"status", std::string(bundle_status_name(b.status))},
                       {"count", b.accepted.size()},
                       {"accepted", b.accepted},
                       {"accepted_mmea", b.accepted_mmea},
                       {"neighborhood_size", b.neighborhood_size},
                       {"atlas_neighborhood_size", b.atlas_neighborhood_size},
                       {"registration", registration_to_json(b.registration)}});
    const fs::path track = dir / (b.bundle_id + ".tck");
    if (b.status == BundleStatus::recognized) {
      std::vector<Streamline> accepted;
      accepted.reserve(b.accepted.size());
      for (std::size_t idx : b.accepted) accepted.push_back(subject[idx]);
      write_tck(track, accepted);
    } else if (fs::exists(track)) {
      fs::remove(track);
    }
  }
  nlohmann::json summary = {{"format_version", std::string(kResultFormatVersion)},
                            {"subject_streamline_count", result.subject_size},
                            {"config", config},
                            {"global_registration", registration_to_json(result.global)},
                            {"bundles", bundles}};
  for (const auto& [key, value] : extra.items()) summary[key] = value;
  write_json_file(dir / "summary.json", summary);
}

StoredResult read_result(const fs::path& dir) {
  const fs::path path = dir / "summary.json";
  if (!fs::exists(path)) throw InputError("result summary not found: '" + path.string() + "'");
  const auto j = read_json_file(path);
  const std::string where = path.string();
  StoredResult out;
  try {
    const auto version = require(j, "format_version", where).get<std::string>();
    if (version != kResultFormatVersion) {
      throw FormatError(where + ": format version mismatch: expected '" +
                        std::string(kResultFormatVersion) + "', found '" + version + "'");
    }
    out.result.subject_size = require(j, "subject_streamline_count", where).get<std::size_t>();
    out.result.global = registration_from_json(require(j, "global_registration", where));
    out.config = require(j, "config", where);
    for (const auto& b : require(j, "bundles", where)) {
      BundleResult br;
      br.bundle_id = require(b, "id", where).get<std::string>();
      br.status = bundle_status_from_name(require(b, "status", where).get<std::string>());
      br.accepted = require(b, "accepted", where).get<std::vector<std::size_t>>();
      br.accepted_mmea = require(b, "accepted_mmea", where).get<std::vector<double>>();
      br.neighborhood_size = require(b, "neighborhood_size", where).get<std::size_t>();
      br.atlas_neighborhood_size = require(b, "atlas_neighborhood_size", where).get<std::size_t>();
      br.registration = registration_from_json(require(b, "registration", where));
      if (br.accepted.size() != br.accepted_mmea.size()) {
        throw FormatError(where + ": bundle '" + br.bundle_id + "' has mismatched accepted arrays");
      }
      for (std::size_t idx : br.accepted) {
        if (idx >= out.result.subject_size) {
          throw FormatError(where + ": bundle '" + br.bundle_id + "' index " +
                            std::to_string(idx) + " out of range");
        }
      }
      out.result.bundles.push_back(std::move(br));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
  return out;
}

void write_truth(const fs::path& path, const std::vector<std::string>& labels) {
  write_json_file(path, {{"format_version", std::string(kTruthFormatVersion)}, {"labels", labels}});
}

std::vector<std::string> read_truth(const fs::path& path) {
  const auto j = read_json_file(path);
  const std::string where = path.string();
  try {
    const auto version = require(j, "format_version", where).get<std::string>();
    if (version != kTruthFormatVersion) {
      throw FormatError(where + ": format version mismatch: expected '" +
                        std::string(kTruthFormatVersion) + "', found '" + version + "'");
    }
    return require(j, "labels", where).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

namespace {

template <class T>
void scene_field(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<T, Vector3>) {
      out = vec_from(*it, key);
    } else {
      out = it->template get<T>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": field '" + key + "': " + e.what());
  }
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> known,
                         const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InputError(where + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

SceneSpec scene_spec_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"bundles", "distractor_count", "extent_lo", "extent_hi",
                       "global_rotation_deg", "global_translation_mm", "local", "seed"},
                      "scene spec");
  SceneSpec spec;
  scene_field(j, "distractor_count", spec.distractor_count, "scene spec");
  scene_field(j, "extent_lo", spec.extent_lo, "scene spec");
  scene_field(j, "extent_hi", spec.extent_hi, "scene spec");
  scene_field(j, "global_rotation_deg", spec.global_rotation_deg, "scene spec");
  scene_field(j, "global_translation_mm", spec.global_translation_mm, "scene spec");
  scene_field(j, "seed", spec.seed, "scene spec");
  if (auto it = j.find("local"); it != j.end()) {
    reject_unknown_keys(*it, {"max_rotation_deg", "max_translation_mm"}, "scene spec local");
    scene_field(*it, "max_rotation_deg", spec.local.max_rotation_deg, "scene spec local");
    scene_field(*it, "max_translation_mm", spec.local.max_translation_mm, "scene spec local");
  }
  auto it = j.find("bundles");
  if (it == j.end() || !it->is_array()) throw InputError("scene spec: 'bundles' must be an array");
  for (const auto& b : *it) {
    const std::string where = "scene spec bundle";
    reject_unknown_keys(b,
                        {"id", "center", "radius_mm", "span_deg", "tilt_deg", "azimuth_deg",
                         "jitter_mm", "count", "points", "seed"},
                        where);
    ArcSpec arc;
    scene_field(b, "id", arc.id, where);
    scene_field(b, "center", arc.center, where);
    scene_field(b, "radius_mm", arc.radius_mm, where);
    scene_field(b, "span_deg", arc.span_deg, where);
    scene_field(b, "tilt_deg", arc.tilt_deg, where);
    scene_field(b, "azimuth_deg", arc.azimuth_deg, where);
    scene_field(b, "jitter_mm", arc.jitter_mm, where);
    scene_field(b, "count", arc.count, where);
    scene_field(b, "points", arc.points, where);
    if (b.contains("seed")) {
      std::uint64_t seed = 0;
      scene_field(b, "seed", seed, where);
      arc.seed = seed;
    }
    validate_bundle_id(arc.id);
    spec.bundles.push_back(std::move(arc));
  }
  return spec;
}

nlohmann::json to_json(const SceneSpec& spec) {
  nlohmann::json bundles = nlohmann::json::array();
  for (const auto& b : spec.bundles) {
    nlohmann::json jb = {{"id", b.id},
                         {"center", vec_json(b.center)},
                         {"radius_mm", b.radius_mm},
                         {"span_deg", b.span_deg},
                         {"tilt_deg", b.tilt_deg},
                         {"azimuth_deg", b.azimuth_deg},
                         {"jitter_mm", b.jitter_mm},
                         {"count", b.count},
                         {"points", b.points}};
    if (b.seed) jb["seed"] = *b.seed;
    bundles.push_back(std::move(jb));
  }
  return {{"bundles", bundles},
          {"distractor_count", spec.distractor_count},
          {"extent_lo", vec_json(spec.extent_lo)},
          {"extent_hi", vec_json(spec.extent_hi)},
          {"global_rotation_deg", vec_json(spec.global_rotation_deg)},
          {"global_translation_mm", vec_json(spec.global_translation_mm)},
          {"local",
           {{"max_rotation_deg", spec.local.max_rotation_deg},
            {"max_translation_mm", spec.local.max_translation_mm}}},
          {"seed", spec.seed}};
}

}  // namespace geolab
