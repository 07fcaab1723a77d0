#include "geolab/distances.hpp"
#include "geolab/metrics.hpp"
#include "geolab/parcellation.hpp"
#include "geolab/synth.hpp"

#include "../support/random.hpp"
#include "../support/scenes.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace geolab;

namespace {

Bundle arc_bundle(const std::string& id, std::uint64_t seed, int count = 40) {
  ArcSpec a;
  a.id = id;
  a.radius_mm = 7.0;
  a.tilt_deg = 60.0;
  a.azimuth_deg = 10.0;
  a.count = count;
  return to_bundle(generate_bundle(a, seed));
}

struct Fixture {
  Scene scene;
  AtlasModel atlas;
  std::vector<ResampledStreamline> subject;
};

const Fixture& grid_fixture() {
  static const Fixture f = [] {
    Fixture x;
    x.scene = generate_scene(testing::grid_scene(3, {.bundles = 8}));
    std::vector<Bundle> bundles;
    for (const auto& b : x.scene.atlas) bundles.push_back(to_bundle(b));
    x.atlas = build_atlas(bundles);
    x.subject = resample_all(x.scene.subject);
    return x;
  }();
  return f;
}

std::vector<std::size_t> truth_of(const Scene& s, const std::string& id) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.truth.size(); ++i) {
    if (s.truth[i] == id) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_SUITE("parcellation") {

TEST_CASE("features of atlas members and of the reference") {
  Bundle b = arc_bundle("arc", 1);
  b.streamlines.push_back(b.streamlines.front());
  const BundleModel m = build_bundle_model(b);
  const FeatureVector twin = compute_features(m.bundle.streamlines.front(), m);
  CHECK(twin[Feature::mmea] == 0.0);

  const FeatureVector ref = compute_features(m.reference, m);
  CHECK(ref[Feature::plane_angle] < 1e-6);
  CHECK(ref[Feature::direction_angle] < 1e-6);
}

TEST_CASE("features match a brute-force recomputation") {
  const BundleModel m = build_bundle_model(arc_bundle("toy", 2, 5));
  testing::Rng rng(51);
  for (int t = 0; t < 20; ++t) {
    const auto c = testing::random_resampled(rng);
    const FeatureVector fv = compute_features(c, m);
    CHECK(fv[Feature::length] == arc_length(c));
    CHECK(fv[Feature::dist_to_barycenter] == (midpoint(c) - m.barycenter).norm());
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& s : m.bundle.streamlines) nearest = std::min(nearest, mmea(c, s));
    CHECK(fv[Feature::mmea] == nearest);
    const PlaneFit p = fit_plane_normal(c);
    if (!p.degenerate) {
      CHECK(fv[Feature::plane_angle] == angle_between_planes(p.normal, m.reference_normal));
    }
    CHECK(fv[Feature::direction_angle] ==
          angle_between_directions(direction_vector(c), m.reference_direction));
    CHECK(fv[Feature::shape_angle] == shape_angle(c));
  }
}

TEST_CASE("labeling rule") {
  const BundleModel m = build_bundle_model(arc_bundle("arc", 3));
  FeatureVector mid;
  for (Feature f : kAllFeatures) mid[f] = 0.5 * (m.thresholds[f].low + m.thresholds[f].high);
  CHECK(label_streamline(mid, m).accepted);

  FeatureVector above = mid;
  above[Feature::shape_angle] = std::nextafter(m.thresholds[Feature::shape_angle].high, 1e9);
  const LabelDecision d = label_streamline(above, m);
  CHECK_FALSE(d.accepted);
  CHECK(std::count(d.passed.begin(), d.passed.end(), false) == 1);
  CHECK_FALSE(d.passed[static_cast<std::size_t>(Feature::shape_angle)]);

  FeatureVector at_low = mid;
  at_low[Feature::length] = m.thresholds[Feature::length].low;
  CHECK(label_streamline(at_low, m).accepted);

  FeatureVector flat = mid;
  flat[Feature::plane_angle] = 89.0;
  flat.degenerate[static_cast<std::size_t>(Feature::plane_angle)] = true;
  CHECK(label_streamline(flat, m).accepted);

  FeatureMask no_shape = kAllFeaturesMask;
  no_shape[static_cast<std::size_t>(Feature::shape_angle)] = false;
  CHECK(label_streamline(above, m, no_shape).accepted);
}

TEST_CASE("self projection") {
  const Fixture& f = grid_fixture();
  const ParcellationResult r = parcellate(f.atlas, f.subject);
  CHECK(pbe(r, 1) == 100.0);
  for (std::size_t b = 0; b < r.bundles.size(); ++b) {
    const BundleScore s = confusion_scores(r.bundles[b].accepted, truth_of(f.scene, r.bundles[b].bundle_id));
    CHECK(s.sensitivity >= 0.4);
    CHECK(s.precision >= 0.4);
    CHECK(std::is_sorted(r.bundles[b].accepted.begin(), r.bundles[b].accepted.end()));
    CHECK(r.bundles[b].accepted.size() == r.bundles[b].accepted_mmea.size());
  }
}

TEST_CASE("local perturbations leave the labels stable") {
  const Fixture& f = grid_fixture();
  const ParcellationResult base = parcellate(f.atlas, f.subject);
  SceneSpec spec = testing::grid_scene(3, {.bundles = 8});
  spec.local = {5.0, 5.0};
  const Scene moved = generate_scene(spec);
  const ParcellationResult r = parcellate(f.atlas, resample_all(moved.subject));
  for (std::size_t b = 0; b < r.bundles.size(); ++b) {
    const auto& was = base.bundles[b].accepted;
    std::size_t kept = 0;
    for (auto i : was) kept += std::binary_search(r.bundles[b].accepted.begin(), r.bundles[b].accepted.end(), i);
    CHECK(static_cast<double>(kept) >= 0.9 * static_cast<double>(was.size()));
  }
}

TEST_CASE("distractors do not disturb the global alignment") {
  for (std::uint64_t seed : {2u, 11u}) {
    SceneSpec spec = testing::grid_scene(seed, {.bundles = 12, .distractors = 300});
    spec.global_rotation_deg = Vector3(3, -4, 5);
    spec.global_translation_mm = Vector3(4, 2, -3);
    const Scene scene = generate_scene(spec);
    std::vector<Bundle> bundles;
    for (const auto& b : scene.atlas) bundles.push_back(to_bundle(b));
    const ParcellationResult r = parcellate(build_atlas(bundles), resample_all(scene.subject));
    CHECK(rotation_angle_deg(compose(r.global.transform, scene.global_perturbation)) < 1.0);
    CHECK(pbe(r, 1) == 100.0);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const Fixture& f = grid_fixture();
  ParcellationOptions one, many;
  one.workers = 1;
  many.workers = 8;
  CHECK(parcellate(f.atlas, f.subject, one) == parcellate(f.atlas, f.subject, many));
}

TEST_CASE("absent bundles") {
  const AtlasModel atlas = build_atlas({arc_bundle("arc", 4)});
  std::vector<ResampledStreamline> far;
  for (int i = 0; i < 5; ++i) {
    far.push_back(resample(Streamline({Point3(500 + i, 500, 500), Point3(520 + i, 510, 500)})));
  }
  ParcellationOptions o;
  o.global_registration = false;
  const ParcellationResult r = parcellate(atlas, far, o);
  REQUIRE(r.bundles.size() == 1);
  CHECK(r.bundles[0].status == BundleStatus::absent);
  CHECK(r.bundles[0].accepted.empty());
  CHECK(r.bundles[0].neighborhood_size == 0);

  CHECK_THROWS_AS(parcellate(atlas, std::vector<ResampledStreamline>{}), InputError);
}

TEST_CASE("winner-take-all") {
  ParcellationResult r;
  r.bundles.resize(3);
  r.bundles[0] = {"a", BundleStatus::recognized, {1, 2, 3}, {0.5, 2.0, 1.0}, {}, 0, 0};
  r.bundles[1] = {"b", BundleStatus::recognized, {2, 3}, {1.0, 1.0}, {}, 0, 0};
  r.bundles[2] = {"c", BundleStatus::recognized, {3}, {0.1}, {}, 0, 0};
  apply_winner_take_all(r);
  CHECK(r.bundles[0].accepted == std::vector<std::size_t>{1});
  CHECK(r.bundles[1].accepted == std::vector<std::size_t>{2});
  CHECK(r.bundles[2].accepted == std::vector<std::size_t>{3});

  ParcellationResult tie;
  tie.bundles.resize(2);
  tie.bundles[0] = {"a", BundleStatus::recognized, {7}, {1.0}, {}, 0, 0};
  tie.bundles[1] = {"b", BundleStatus::recognized, {7}, {1.0}, {}, 0, 0};
  apply_winner_take_all(tie);
  CHECK(tie.bundles[0].accepted == std::vector<std::size_t>{7});
  CHECK(tie.bundles[1].status == BundleStatus::absent);
}

}
