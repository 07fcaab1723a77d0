#include "geolab/clustering.hpp"
#include "geolab/config.hpp"
#include "geolab/distances.hpp"
#include "geolab/io.hpp"
#include "geolab/metrics.hpp"
#include "geolab/parcellation.hpp"
#include "geolab/synth.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace geolab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point3> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("expected an (n, 3) array of points");
  auto r = a.unchecked<2>();
  std::vector<Point3> pts;
  pts.reserve(a.shape(0));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) pts.emplace_back(r(i, 0), r(i, 1), r(i, 2));
  return pts;
}

Array to_array(const std::vector<Point3>& pts) {
  Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int d = 0; d < 3; ++d) w(i, d) = pts[i][d];
  }
  return a;
}

std::vector<Streamline> to_streamlines(const std::vector<Array>& arrays) {
  std::vector<Streamline> out;
  out.reserve(arrays.size());
  for (const auto& a : arrays) out.emplace_back(to_points(a));
  return out;
}

ResampledStreamline as_resampled(const Array& a) { return ResampledStreamline(to_points(a)); }

std::vector<ResampledStreamline> as_resampled_all(const std::vector<Array>& arrays) {
  std::vector<ResampledStreamline> out;
  out.reserve(arrays.size());
  for (const auto& a : arrays) out.push_back(as_resampled(a));
  return out;
}

template <class S>
std::vector<Array> to_arrays(const std::vector<S>& lines) {
  std::vector<Array> out;
  out.reserve(lines.size());
  for (const auto& s : lines) out.push_back(to_array(s.points()));
  return out;
}

RunConfig parse_config(const std::string& config_json) {
  if (config_json.empty()) return {};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

py::dict score_dict(const BundleScore& s) {
  py::dict d;
  d["defined"] = s.defined;
  d["sensitivity"] = s.sensitivity;
  d["precision"] = s.precision;
  d["jaccard"] = s.jaccard;
  d["f1"] = s.f1;
  d["tp"] = s.tp;
  d["fp"] = s.fp;
  d["fn"] = s.fn;
  d["specificity"] = s.specificity ? py::cast(*s.specificity) : py::none();
  d["accuracy"] = s.accuracy ? py::cast(*s.accuracy) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometry-based parcellation of short association bundles";

  auto base = py::register_exception<Error>(m, "GeolabError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());

  m.attr("DEFAULT_RESAMPLE_POINTS") = kDefaultResamplePoints;

  // geometry
  m.def("resample", [](const Array& pts, int k) { return to_array(resample(Streamline(to_points(pts)), k).points()); },
        py::arg("points"), py::arg("k") = kDefaultResamplePoints);
  m.def("arc_length", [](const Array& pts) { return arc_length(Streamline(to_points(pts))); });
  m.def("mdf", [](const Array& a, const Array& b) { return mdf(as_resampled(a), as_resampled(b)); });
  m.def("mmea", [](const Array& a, const Array& b) { return mmea(as_resampled(a), as_resampled(b)); });
  m.def("shape_angle", [](const Array& a) { return shape_angle(as_resampled(a)); });
  m.def("plane_normal", [](const Array& a) {
    const PlaneFit f = fit_plane_normal(as_resampled(a));
    return py::make_tuple(to_array({f.normal}).attr("reshape")(3), f.degenerate);
  });
  m.def("quickbundles", [](const std::vector<Array>& lines, double threshold_mm) {
    py::list out;
    for (const auto& c : quickbundles(as_resampled_all(lines), threshold_mm)) {
      py::dict d;
      d["centroid"] = to_array(c.centroid.points());
      d["members"] = c.members;
      out.append(d);
    }
    return out;
  });

  // track files
  m.def("read_tck", [](const std::filesystem::path& p) { return to_arrays(read_tck(p)); });
  m.def("write_tck", [](const std::filesystem::path& p, const std::vector<Array>& lines) {
    write_tck(p, to_streamlines(lines));
  });

  // atlas
  py::class_<AtlasModel>(m, "Atlas")
      .def_property_readonly("bundle_ids",
                             [](const AtlasModel& a) {
                               std::vector<std::string> ids;
                               for (const auto& b : a.bundles) ids.push_back(b.id());
                               return ids;
                             })
      .def_readonly("resample_k", &AtlasModel::resample_k)
      .def("thresholds",
           [](const AtlasModel& a, const std::string& id) {
             for (const auto& b : a.bundles) {
               if (b.id() != id) continue;
               py::dict d;
               for (Feature f : kAllFeatures) {
                 d[py::str(std::string(feature_name(f)))] =
                     py::make_tuple(b.thresholds[f].low, b.thresholds[f].high);
               }
               return d;
             }
             throw py::key_error(id);
           })
      .def("save", [](const AtlasModel& a, const std::filesystem::path& dir) { write_atlas(a, dir); })
      .def("__len__", [](const AtlasModel& a) { return a.bundles.size(); });

  m.def("load_atlas", [](const std::filesystem::path& dir) { return read_atlas(dir); });
  m.def(
      "_build_atlas",
      [](const std::vector<std::pair<std::string, std::vector<Array>>>& bundles,
         const std::string& config_json) {
        const RunConfig c = parse_config(config_json);
        std::vector<Bundle> in;
        for (const auto& [id, lines] : bundles) {
          validate_bundle_id(id);
          in.push_back({id, resample_all(to_streamlines(lines), c.resample_k)});
        }
        py::gil_scoped_release release;
        return build_atlas(in, c.atlas_options());
      },
      py::arg("bundles"), py::arg("config_json") = "");

  m.def(
      "_parcellate",
      [](const AtlasModel& atlas, const std::vector<Array>& subject, const std::string& config_json) {
        const RunConfig c = parse_config(config_json);
        const auto lines = resample_all(to_streamlines(subject), atlas.resample_k);
        ParcellationResult r;
        {
          py::gil_scoped_release release;
          r = parcellate(atlas, lines, c.parcellation_options());
        }
        py::dict labels;
        for (const auto& b : r.bundles) labels[py::str(b.bundle_id)] = b.accepted;
        py::dict out;
        out["labels"] = labels;
        out["global_cost_mm"] = py::make_tuple(r.global.initial_cost_mm, r.global.final_cost_mm);
        return out;
      },
      py::arg("atlas"), py::arg("subject"), py::arg("config_json") = "");

  // metrics
  m.def(
      "confusion_scores",
      [](const std::vector<std::size_t>& labeled, const std::vector<std::size_t>& truth,
         std::optional<std::size_t> n) { return score_dict(confusion_scores(labeled, truth, n)); },
      py::arg("labeled"), py::arg("truth"), py::arg("tractogram_size") = py::none());
  m.def(
      "bundle_adjacency",
      [](const std::vector<Array>& a, const std::vector<Array>& b, double thr) {
        return bundle_adjacency(as_resampled_all(a), as_resampled_all(b), thr);
      },
      py::arg("a"), py::arg("b"), py::arg("threshold_mm") = kDefaultAdjacencyThresholdMm);

  // synthetic scenes
  m.def("_generate_scene", [](const std::string& spec_json) {
    const Scene s = generate_scene(scene_spec_from_json(nlohmann::json::parse(spec_json)));
    py::dict atlas;
    for (const auto& b : s.atlas) atlas[py::str(b.id)] = to_arrays(b.streamlines);
    py::dict out;
    out["atlas"] = atlas;
    out["subject"] = to_arrays(s.subject);
    out["truth"] = s.truth;
    return out;
  });
}
