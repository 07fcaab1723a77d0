#include "geolab/atlas.hpp"
#include "geolab/distances.hpp"
#include "geolab/synth.hpp"

#include "../support/random.hpp"

#include <doctest.h>

#include <limits>

using namespace geolab;

namespace {

Bundle arc_bundle(const std::string& id, std::uint64_t seed, const Point3& center = Point3::Zero(),
                  int count = 50) {
  ArcSpec a;
  a.id = id;
  a.center = center;
  a.radius_mm = 6.0;
  a.tilt_deg = 25.0;
  a.azimuth_deg = 40.0;
  a.count = count;
  return to_bundle(generate_bundle(a, seed));
}

}  // namespace

TEST_SUITE("atlas") {

TEST_CASE("feature samples of identical streamlines") {
  testing::Rng rng(41);
  const auto s = resample(Streamline({Point3(0, 0, 0), Point3(4, 3, 0), Point3(8, 0, 1)}));
  const Bundle twins{"twins", {s, s}};
  const FeatureSamples f = compute_feature_samples(twins);
  CHECK(f[static_cast<std::size_t>(Feature::mmea)] == std::vector<double>{0.0, 0.0});
  for (double v : f[static_cast<std::size_t>(Feature::plane_angle)]) CHECK(v < 1e-6);
  for (double v : f[static_cast<std::size_t>(Feature::direction_angle)]) CHECK(v < 1e-6);
}

TEST_CASE("feature samples match a brute-force recomputation") {
  testing::Rng rng(42);
  Bundle b{"toy", {}};
  for (int i = 0; i < 3; ++i) b.streamlines.push_back(testing::random_resampled(rng));
  const BundleGeometry g = describe_bundle(b);
  const FeatureSamples f = compute_feature_samples(b, g);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = b.streamlines[i];
    CHECK(f[0][i] == arc_length(s));
    CHECK(f[1][i] == (midpoint(s) - g.barycenter).norm());
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 3; ++j) {
      if (j != i) nearest = std::min(nearest, mmea(s, b.streamlines[j]));
    }
    CHECK(f[2][i] == nearest);
    CHECK(f[4][i] == angle_between_directions(direction_vector(s), g.reference_direction));
    CHECK(f[5][i] == shape_angle(s));
  }
}

TEST_CASE("translated copies have zero mmea samples") {
  testing::Rng rng(43);
  const auto s = testing::random_resampled(rng);
  Bundle b{"shifted", {}};
  for (int i = 0; i < 6; ++i) b.streamlines.push_back(s.translated(3.0 * testing::random_unit(rng)));
  const FeatureSamples f = compute_feature_samples(b);
  for (double v : f[static_cast<std::size_t>(Feature::mmea)]) CHECK(v < 1e-9);
}

TEST_CASE("bundle model thresholds") {
  const BundleModel m = build_bundle_model(arc_bundle("arc", 1));
  const FeatureSamples samples = compute_feature_samples(m.bundle, m.geometry());
  for (Feature f : kAllFeatures) {
    CAPTURE(feature_name(f));
    const auto& iv = m.thresholds[f];
    CHECK(iv.low < iv.high);
    CHECK(iv.low >= feature_domain(f).low);
    CHECK(iv.high <= feature_domain(f).high);
    const auto& v = samples[static_cast<std::size_t>(f)];
    std::size_t in = 0;
    for (double x : v) in += iv.contains(x);
    const double retention = static_cast<double>(in) / static_cast<double>(v.size());
    CHECK(retention >= 0.75);
    CHECK(retention <= 0.95);
  }
  CHECK(m.thresholds[Feature::mmea].low == 0.0);
}

TEST_CASE("identical streamlines fall back to widened empirical intervals") {
  const auto s = resample(Streamline({Point3(0, 0, 0), Point3(4, 3, 0), Point3(8, 0, 1)}));
  const BundleModel m = build_bundle_model(Bundle{"same", std::vector<ResampledStreamline>(10, s)});
  for (Feature f : kAllFeatures) {
    CHECK(m.thresholds.source(f) == ThresholdSource::empirical);
    CHECK(m.thresholds[f].low < m.thresholds[f].high);
    CHECK(m.thresholds[f].high - m.thresholds[f].low <= 2e-3 + 1e-12);
  }
}

TEST_CASE("empirical threshold option") {
  AtlasOptions o;
  o.threshold_source = ThresholdSource::empirical;
  const Bundle b = arc_bundle("arc", 2);
  const BundleModel m = build_bundle_model(b, o);
  const FeatureSamples samples = compute_feature_samples(m.bundle, m.geometry());
  const auto& len = samples[0];
  CHECK(m.thresholds[Feature::length].low == empirical_quantile(len, 0.1));
  CHECK(m.thresholds[Feature::length].high == empirical_quantile(len, 0.9));
  CHECK_FALSE(m.fits[0].has_value());
}

TEST_CASE("atlas construction") {
  const std::vector<Bundle> three = {arc_bundle("a", 1), arc_bundle("b", 2, Point3(50, 0, 0)),
                                     arc_bundle("c", 3, Point3(0, 50, 0))};
  const AtlasModel atlas = build_atlas(three);
  CHECK(atlas.bundles.size() == 3);
  CHECK(atlas.resample_k == 21);
  CHECK(atlas_streamlines(atlas).size() == 150);

  AtlasOptions serial;
  serial.workers = 1;
  const AtlasModel again = build_atlas(three, serial);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again.bundles[i].thresholds == atlas.bundles[i].thresholds);
    CHECK(again.bundles[i].fits == atlas.bundles[i].fits);
  }

  CHECK_THROWS_AS(build_atlas({}), InputError);
  CHECK_THROWS_AS(build_atlas({arc_bundle("a", 1), arc_bundle("a", 2)}), InputError);
  CHECK_THROWS_WITH_AS(build_bundle_model(arc_bundle("tiny", 1, Point3::Zero(), 1)),
                       doctest::Contains("atlas bundle too small"), InputError);
}

}
