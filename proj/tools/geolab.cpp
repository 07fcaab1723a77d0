// geolab: build-atlas, parcellate, evaluate and synth subcommands.
//
// Exit codes: 0 success, 1 processing error, 2 usage or input error.
// Progress and tables go to stderr; results only to files.

#include "geolab/atlas.hpp"
#include "geolab/config.hpp"
#include "geolab/io.hpp"
#include "geolab/metrics.hpp"
#include "geolab/parcellation.hpp"
#include "geolab/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace {

using geolab::fs::path;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitProcessing = 1;
constexpr int kExitInput = 2;

constexpr std::string_view kReportFormatVersion = "geolab-report/1";

geolab::RunConfig load_config(const std::string& file, std::optional<int> workers) {
  geolab::RunConfig config;
  if (!file.empty()) config = geolab::run_config_from_json(geolab::read_json_file(file));
  if (workers) {
    if (*workers < 0) throw geolab::InputError("--workers must be >= 0");
    config.workers = *workers;
  }
  return config;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const std::optional<double>& v, int precision = 3) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

// ---- build-atlas ----------------------------------------------------------

struct BuildAtlasArgs {
  std::string bundles, out, config;
  std::optional<int> workers;
};

int run_build_atlas(const BuildAtlasArgs& a) {
  const geolab::RunConfig config = load_config(a.config, a.workers);
  const auto bundles = geolab::read_bundle_directory(a.bundles, config.resample_k);
  std::cerr << "building atlas from " << bundles.size() << " bundle(s)\n";
  const geolab::AtlasModel atlas = geolab::build_atlas(bundles, config.atlas_options());
  geolab::write_atlas(atlas, a.out, geolab::to_json(config, false));

  for (const auto& m : atlas.bundles) {
    std::cerr << m.id() << "  n=" << m.bundle.streamlines.size() << "  r_b=" << fmt(m.radius_mm, 2)
              << " mm\n";
    for (geolab::Feature f : geolab::kAllFeatures) {
      const auto& fit = m.fits[static_cast<std::size_t>(f)];
      const auto& iv = m.thresholds[f];
      std::cerr << "  " << geolab::feature_name(f) << ": "
                << (fit ? geolab::family_name(fit->family) : std::string_view("empirical")) << " ["
                << fmt(iv.low) << ", " << fmt(iv.high) << "]\n";
    }
  }
  std::cerr << "atlas written to " << a.out << "\n";
  return kExitOk;
}

// ---- parcellate -----------------------------------------------------------

struct ParcellateArgs {
  std::string atlas, subject, affine, out, config;
  std::optional<int> workers;
};

int run_parcellate(const ParcellateArgs& a) {
  const geolab::RunConfig config = load_config(a.config, a.workers);
  const geolab::AtlasModel atlas = geolab::read_atlas(a.atlas);
  if (atlas.resample_k != config.resample_k) {
    throw geolab::InputError("atlas was built with resample_k=" + std::to_string(atlas.resample_k) +
                             " but the config asks for " + std::to_string(config.resample_k));
  }
  std::vector<geolab::Streamline> subject = geolab::read_tck(a.subject);
  if (!a.affine.empty()) subject = geolab::apply_affine(geolab::read_affine(a.affine), subject);

  std::vector<geolab::ResampledStreamline> resampled;
  resampled.reserve(subject.size());
  for (const auto& s : subject) resampled.push_back(geolab::resample(s, config.resample_k));

  std::cerr << "parcellating " << subject.size() << " streamlines against "
            << atlas.bundles.size() << " bundle(s)\n";
  const auto result = geolab::parcellate(atlas, resampled, config.parcellation_options());
  std::cerr << "global registration: cost " << fmt(result.global.initial_cost_mm) << " -> "
            << fmt(result.global.final_cost_mm) << " mm\n";

  // the result keeps the subject's original coordinates
  const std::vector<geolab::Streamline> original =
      a.affine.empty() ? subject : geolab::read_tck(a.subject);
  geolab::write_result(result, original, a.out, geolab::to_json(config, false));

  std::size_t recognized = 0;
  for (const auto& b : result.bundles) recognized += b.status == geolab::BundleStatus::recognized;
  std::cerr << recognized << "/" << result.bundles.size() << " bundles recognized, result in "
            << a.out << "\n";
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string result, truth, out, atlas, subject, affine;
};

json mean_scores(const std::vector<geolab::BundleScore>& scores) {
  std::vector<double> sens, prec, jac, f1, spec, acc;
  for (const auto& s : scores) {
    if (!s.defined) continue;
    sens.push_back(s.sensitivity);
    prec.push_back(s.precision);
    jac.push_back(s.jaccard);
    f1.push_back(s.f1);
    if (s.specificity) spec.push_back(*s.specificity);
    if (s.accuracy) acc.push_back(*s.accuracy);
  }
  auto mean = [](const std::vector<double>& v) -> json {
    if (v.empty()) return nullptr;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  return {{"bundles", sens.size()}, {"sensitivity", mean(sens)}, {"precision", mean(prec)},
          {"jaccard", mean(jac)},   {"f1", mean(f1)},            {"specificity", mean(spec)},
          {"accuracy", mean(acc)}};
}

int run_evaluate(const EvaluateArgs& a) {
  const geolab::StoredResult stored = geolab::read_result(a.result);
  const auto& result = stored.result;
  const geolab::RunConfig config = geolab::run_config_from_json(stored.config);
  const std::vector<std::string> truth = geolab::read_truth(a.truth);
  if (truth.size() != result.subject_size) {
    throw geolab::InputError("truth has " + std::to_string(truth.size()) +
                             " labels but the result covers " +
                             std::to_string(result.subject_size) + " streamlines");
  }
  if (a.atlas.empty() != a.subject.empty()) {
    throw geolab::InputError("--atlas and --subject must be given together");
  }

  std::map<std::string, std::vector<std::size_t>> truth_sets;
  for (std::size_t i = 0; i < truth.size(); ++i) truth_sets[truth[i]].push_back(i);

  std::optional<geolab::AtlasModel> atlas;
  std::vector<geolab::ResampledStreamline> subject;
  if (!a.atlas.empty()) {
    atlas = geolab::read_atlas(a.atlas);
    std::vector<geolab::Streamline> raw = geolab::read_tck(a.subject);
    if (!a.affine.empty()) raw = geolab::apply_affine(geolab::read_affine(a.affine), raw);
    for (const auto& s : raw) {
      subject.push_back(geolab::resample(s, atlas->resample_k));
    }
    if (subject.size() != result.subject_size) {
      throw geolab::InputError("subject has " + std::to_string(subject.size()) +
                               " streamlines but the result covers " +
                               std::to_string(result.subject_size));
    }
  }

  json bundles = json::array();
  std::vector<geolab::BundleScore> scores;
  std::fprintf(stderr, "%-16s %7s %6s %6s %6s %6s %6s\n", "bundle", "count", "sens", "prec", "jacc",
               "f1", "BA");
  for (std::size_t bi = 0; bi < result.bundles.size(); ++bi) {
    const auto& b = result.bundles[bi];
    const auto it = truth_sets.find(b.bundle_id);
    const std::vector<std::size_t> empty;
    const auto& t = it == truth_sets.end() ? empty : it->second;
    const geolab::BundleScore s = geolab::confusion_scores(b.accepted, t, result.subject_size);
    scores.push_back(s);

    json jb = {{"id", b.bundle_id},
               {"status", std::string(geolab::bundle_status_name(b.status))},
               {"count", b.accepted.size()},
               {"truth_count", t.size()},
               {"defined", s.defined},
               {"tp", s.tp},
               {"fp", s.fp},
               {"fn", s.fn},
               {"sensitivity", s.defined ? json(s.sensitivity) : json(nullptr)},
               {"precision", s.defined ? json(s.precision) : json(nullptr)},
               {"jaccard", s.defined ? json(s.jaccard) : json(nullptr)},
               {"f1", s.defined ? json(s.f1) : json(nullptr)},
               {"specificity", optional_json(s.specificity)},
               {"accuracy", optional_json(s.accuracy)}};
    std::optional<double> ba;
    if (atlas) {
      const geolab::BundleModel* model = nullptr;
      for (const auto& m : atlas->bundles) {
        if (m.id() == b.bundle_id) model = &m;
      }
      if (model) {
        // compared where the labels were decided: in atlas space
        const geolab::RigidTransform to_atlas = geolab::atlas_space_transform(result, bi);
        std::vector<geolab::ResampledStreamline> extracted;
        for (std::size_t idx : b.accepted) {
          extracted.push_back(geolab::apply_rigid(to_atlas, subject[idx]));
        }
        const auto& ref = model->bundle.streamlines;
        ba = geolab::bundle_adjacency(extracted, ref, config.ba_threshold_mm);
        jb["bundle_adjacency"] = optional_json(ba);
        jb["coverage"] = optional_json(geolab::coverage(extracted, ref, config.ba_threshold_mm));
        jb["overlap"] = optional_json(geolab::overlap(extracted, ref, config.ba_threshold_mm));
      }
    }
    bundles.push_back(std::move(jb));
    std::fprintf(stderr, "%-16s %7zu %6s %6s %6s %6s %6s\n", b.bundle_id.c_str(), b.accepted.size(),
                 fmt(s.defined ? std::optional(s.sensitivity) : std::nullopt).c_str(),
                 fmt(s.defined ? std::optional(s.precision) : std::nullopt).c_str(),
                 fmt(s.defined ? std::optional(s.jaccard) : std::nullopt).c_str(),
                 fmt(s.defined ? std::optional(s.f1) : std::nullopt).c_str(), fmt(ba).c_str());
  }

  json spb = nullptr;
  if (const auto summary = geolab::spb(result)) {
    spb = {{"mean", summary->mean},
           {"median", summary->median},
           {"stddev", summary->stddev},
           {"bundles", summary->bundles}};
  }
  json pbe = json::array();
  for (std::size_t cutoff : {config.pbe_min_loose, config.pbe_min_strict}) {
    pbe.push_back({{"min_streamlines", cutoff},
                   {"percent", result.bundles.empty() ? json(nullptr)
                                                       : json(geolab::pbe(result, cutoff))}});
  }
  const json report = {{"format_version", std::string(kReportFormatVersion)},
                       {"config", geolab::to_json(config, false)},
                       {"subject_streamline_count", result.subject_size},
                       {"bundles", bundles},
                       {"aggregate", mean_scores(scores)},
                       {"pbe", pbe},
                       {"spb", spb}};
  geolab::write_json_file(a.out, report);
  for (const auto& p : pbe) {
    std::cerr << "PBE-" << p["min_streamlines"].get<std::size_t>() << ": "
              << (p["percent"].is_null() ? std::string("-") : fmt(p["percent"].get<double>(), 1))
              << "%\n";
  }
  return kExitOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string spec, out;
};

json transform_json(const geolab::RigidTransform& t) {
  auto v = [](const geolab::Vector3& x) { return json::array({x.x(), x.y(), x.z()}); };
  return {{"rotation_deg", v(t.rotation_deg)},
          {"translation_mm", v(t.translation)},
          {"pivot", v(t.pivot)}};
}

int run_synth(const SynthArgs& a) {
  const geolab::SceneSpec spec = geolab::scene_spec_from_json(geolab::read_json_file(a.spec));
  const geolab::Scene scene = geolab::generate_scene(spec);

  const path out(a.out);
  const path bundle_dir = out / "bundles";
  geolab::fs::create_directories(bundle_dir);
  for (const auto& b : scene.atlas) geolab::write_tck(bundle_dir / (b.id + ".tck"), b.streamlines);
  geolab::write_tck(out / "subject.tck", scene.subject);
  geolab::write_truth(out / "truth.json", scene.truth);

  json local = json::array();
  for (std::size_t i = 0; i < scene.atlas.size(); ++i) {
    local.push_back({{"id", scene.atlas[i].id},
                     {"transform", transform_json(scene.local_perturbations[i])}});
  }
  geolab::write_json_file(out / "scene.json",
                          {{"spec", geolab::to_json(spec)},
                           {"global_perturbation", transform_json(scene.global_perturbation)},
                           {"local_perturbations", local}});
  std::cerr << "scene: " << scene.atlas.size() << " bundle(s), " << scene.subject.size()
            << " subject streamlines, written to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry-based parcellation of short association bundles"};
  app.require_subcommand(1);

  BuildAtlasArgs build;
  auto* build_cmd = app.add_subcommand("build-atlas", "Analyze a directory of bundle track files");
  build_cmd->add_option("--bundles", build.bundles, "Directory of <id>.tck files")->required();
  build_cmd->add_option("--out", build.out, "Atlas directory to write")->required();
  build_cmd->add_option("--config", build.config, "JSON run configuration");
  build_cmd->add_option("--workers", build.workers, "Worker threads (0 = all cores)");

  ParcellateArgs parc;
  auto* parc_cmd = app.add_subcommand("parcellate", "Label a subject tractogram");
  parc_cmd->add_option("--atlas", parc.atlas, "Atlas directory")->required();
  parc_cmd->add_option("--subject", parc.subject, "Subject .tck file")->required();
  parc_cmd->add_option("--affine", parc.affine, "4x4 prealignment matrix (text)");
  parc_cmd->add_option("--out", parc.out, "Result directory to write")->required();
  parc_cmd->add_option("--config", parc.config, "JSON run configuration");
  parc_cmd->add_option("--workers", parc.workers, "Worker threads (0 = all cores)");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a result against truth labels");
  eval_cmd->add_option("--result", eval.result, "Result directory")->required();
  eval_cmd->add_option("--truth", eval.truth, "Truth labels (JSON)")->required();
  eval_cmd->add_option("--out", eval.out, "Report file (JSON)")->required();
  eval_cmd->add_option("--atlas", eval.atlas, "Atlas directory, for adjacency metrics");
  eval_cmd->add_option("--subject", eval.subject, "Subject .tck file, for adjacency metrics");
  eval_cmd->add_option("--affine", eval.affine, "Prealignment used when parcellating");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  synth_cmd->add_option("--spec", synth.spec, "Scene spec (JSON)")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*build_cmd) return run_build_atlas(build);
    if (*parc_cmd) return run_parcellate(parc);
    if (*eval_cmd) return run_evaluate(eval);
    if (*synth_cmd) return run_synth(synth);
  } catch (const geolab::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitInput;
}
