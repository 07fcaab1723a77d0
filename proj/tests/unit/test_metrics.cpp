#include "geolab/distances.hpp"
#include "geolab/metrics.hpp"

#include "../support/random.hpp"

#include <doctest.h>

using namespace geolab;
using doctest::Approx;

namespace {

std::vector<std::size_t> range(std::size_t a, std::size_t b) {
  std::vector<std::size_t> out;
  for (std::size_t i = a; i <= b; ++i) out.push_back(i);
  return out;
}

std::size_t brute_count(const ResampledStreamline& s, const std::vector<ResampledStreamline>& set,
                        double thr) {
  std::size_t n = 0;
  for (const auto& t : set) n += mdf(s, t) < thr;
  return n;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion scores") {
  const BundleScore same = confusion_scores(range(1, 10), range(1, 10));
  CHECK(same.defined);
  CHECK(same.sensitivity == 1.0);
  CHECK(same.precision == 1.0);
  CHECK(same.jaccard == 1.0);
  CHECK(same.f1 == 1.0);

  const BundleScore half = confusion_scores(range(6, 15), range(1, 10));
  CHECK(half.sensitivity == 0.5);
  CHECK(half.precision == 0.5);
  CHECK(half.jaccard == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(half.f1 == 0.5);
  CHECK(half.tp == 5);
  CHECK(half.fp == 5);
  CHECK(half.fn == 5);

  const BundleScore none = confusion_scores(range(20, 25), range(1, 10));
  CHECK(none.sensitivity == 0.0);
  CHECK(none.precision == 0.0);
  CHECK(none.jaccard == 0.0);
  CHECK(none.f1 == 0.0);

  CHECK_FALSE(confusion_scores(range(1, 3), {}).defined);

  const BundleScore whole = confusion_scores(range(6, 15), range(1, 10), 100);
  REQUIRE(whole.specificity);
  CHECK(*whole.specificity == Approx(85.0 / 90.0));
  CHECK(*whole.accuracy == Approx(90.0 / 100.0));
}

TEST_CASE("bundle adjacency, coverage and overlap") {
  testing::Rng rng(61);
  const auto proto = testing::random_resampled(rng);
  const auto a = testing::noisy_copies(rng, proto, 8, 1.0);
  CHECK(*bundle_adjacency(a, a) == 1.0);

  std::vector<ResampledStreamline> far;
  for (const auto& s : a) far.push_back(s.translated(Vector3(100, 0, 0)));
  CHECK(*bundle_adjacency(a, far) == 0.0);
  CHECK(*coverage(far, a) == 0.0);
  CHECK(*overlap(far, a) == 0.0);

  const std::vector<ResampledStreamline> subset(a.begin(), a.begin() + 3);
  CHECK(*coverage(subset, a) == 1.0);

  std::vector<ResampledStreamline> mixed(a.begin(), a.begin() + 4);
  mixed.insert(mixed.end(), far.begin(), far.begin() + 4);
  CHECK(*coverage(mixed, a) == 0.5);

  const std::vector<ResampledStreamline> same(6, proto);
  CHECK(*overlap(same, same) == 6.0);

  const std::vector<ResampledStreamline> empty;
  CHECK_FALSE(bundle_adjacency(empty, a));
  CHECK_FALSE(coverage(empty, a));
  CHECK_FALSE(overlap(empty, a));

  for (int t = 0; t < 50; ++t) {
    const auto x = testing::noisy_copies(rng, proto, 1 + static_cast<int>(rng() % 10), 4.0);
    const auto y = testing::noisy_copies(rng, proto, 1 + static_cast<int>(rng() % 10), 4.0);
    double xh = 0, yh = 0, count = 0;
    for (const auto& s : x) {
      const auto n = brute_count(s, y, 5.0);
      xh += n > 0;
      count += static_cast<double>(n);
    }
    for (const auto& s : y) yh += brute_count(s, x, 5.0) > 0;
    CHECK(*bundle_adjacency(x, y) == Approx(0.5 * (xh / x.size() + yh / y.size())));
    CHECK(*coverage(x, y) == Approx(xh / x.size()));
    CHECK(*overlap(x, y) == Approx(count / x.size()));
  }
}

TEST_CASE("percentage of bundles extracted") {
  CHECK(pbe(std::vector<std::size_t>{10, 12, 30}, 10) == 100.0);
  CHECK(pbe(std::vector<std::size_t>{0, 3, 0, 8}, 1) == 50.0);
  CHECK(pbe(std::vector<std::size_t>{9, 10}, kPbeMinStreamlinesStrict) == 50.0);
}

TEST_CASE("streamlines per bundle") {
  const auto a = spb(std::vector<std::size_t>{10, 10, 10});
  REQUIRE(a);
  CHECK(a->mean == 10.0);
  CHECK(a->median == 10.0);
  CHECK(a->stddev == 0.0);
  const auto b = spb(std::vector<std::size_t>{1, 0, 2, 3});
  REQUIRE(b);
  CHECK(b->mean == 2.0);
  CHECK(b->median == 2.0);
  CHECK(b->bundles == 3);
  CHECK_FALSE(spb(std::vector<std::size_t>{0, 0}));
}

}
