#include "geolab/metrics.hpp"

#include "geolab/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geolab {

namespace {

std::vector<std::size_t> sorted_unique(std::span<const std::size_t> v) {
  std::vector<std::size_t> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::vector<std::size_t> counts_of(const ParcellationResult& result) {
  std::vector<std::size_t> counts;
  counts.reserve(result.bundles.size());
  for (const auto& b : result.bundles) counts.push_back(b.accepted.size());
  return counts;
}

}  // namespace

BundleScore confusion_scores(std::span<const std::size_t> labeled, std::span<const std::size_t> truth,
                             std::optional<std::size_t> tractogram_size) {
  const auto l = sorted_unique(labeled);
  const auto t = sorted_unique(truth);
  std::vector<std::size_t> common;
  std::set_intersection(l.begin(), l.end(), t.begin(), t.end(), std::back_inserter(common));

  BundleScore s;
  s.defined = !t.empty();
  s.tp = common.size();
  s.fp = l.size() - s.tp;
  s.fn = t.size() - s.tp;
  s.sensitivity = ratio(s.tp, t.size());
  s.precision = ratio(s.tp, l.size());
  s.jaccard = ratio(s.tp, s.tp + s.fp + s.fn);
  const double denom = s.precision + s.sensitivity;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.sensitivity / denom : 0.0;
  if (tractogram_size) {
    const std::size_t n = *tractogram_size;
    const std::size_t tn = n - std::min(n, s.tp + s.fp + s.fn);
    s.specificity = ratio(tn, tn + s.fp);
    s.accuracy = ratio(s.tp + tn, n);
  }
  return s;
}

std::size_t count_neighbors(const ResampledStreamline& s, std::span<const ResampledStreamline> set,
                            double threshold_mm) {
  std::size_t n = 0;
  for (const auto& other : set) {
    if (mdf(s, other) < threshold_mm) ++n;
  }
  return n;
}

std::optional<double> bundle_adjacency(std::span<const ResampledStreamline> a,
                                       std::span<const ResampledStreamline> b,
                                       double threshold_mm) {
  if (a.empty() || b.empty()) return std::nullopt;
  auto fraction = [&](std::span<const ResampledStreamline> from,
                      std::span<const ResampledStreamline> to) {
    std::size_t hits = 0;
    for (const auto& s : from) {
      const bool any = std::any_of(to.begin(), to.end(),
                                   [&](const ResampledStreamline& o) { return mdf(s, o) < threshold_mm; });
      if (any) ++hits;
    }
    return ratio(hits, from.size());
  };
  return 0.5 * (fraction(a, b) + fraction(b, a));
}

std::optional<double> coverage(std::span<const ResampledStreamline> extracted,
                               std::span<const ResampledStreamline> model, double threshold_mm) {
  if (extracted.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (const auto& s : extracted) {
    if (count_neighbors(s, model, threshold_mm) > 0) ++hits;
  }
  return ratio(hits, extracted.size());
}

std::optional<double> overlap(std::span<const ResampledStreamline> extracted,
                              std::span<const ResampledStreamline> model, double threshold_mm) {
  if (extracted.empty()) return std::nullopt;
  std::size_t total = 0;
  for (const auto& s : extracted) total += count_neighbors(s, model, threshold_mm);
  return static_cast<double>(total) / static_cast<double>(extracted.size());
}

double pbe(std::span<const std::size_t> per_bundle_counts, std::size_t min_streamlines) {
  if (per_bundle_counts.empty()) return 0.0;
  const auto valid = std::count_if(per_bundle_counts.begin(), per_bundle_counts.end(),
                                   [&](std::size_t c) { return c >= min_streamlines; });
  return 100.0 * static_cast<double>(valid) / static_cast<double>(per_bundle_counts.size());
}

double pbe(const ParcellationResult& result, std::size_t min_streamlines) {
  return pbe(counts_of(result), min_streamlines);
}

std::optional<SpbSummary> spb(std::span<const std::size_t> per_bundle_counts) {
  std::vector<double> v;
  for (std::size_t c : per_bundle_counts) {
    if (c > 0) v.push_back(static_cast<double>(c));
  }
  if (v.empty()) return std::nullopt;
  SpbSummary s;
  s.bundles = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(n));
  return s;
}

std::optional<SpbSummary> spb(const ParcellationResult& result) {
  std::vector<std::size_t> counts;
  for (const auto& b : result.bundles) {
    if (b.status == BundleStatus::recognized) counts.push_back(b.accepted.size());
  }
  return spb(counts);
}

}  // namespace geolab
