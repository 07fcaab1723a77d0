#pragma once

// Parametric fits of per-bundle feature samples and SSE-based family
// selection.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace geolab {

enum class Family : int { normal = 0, log_normal, gamma, beta, burr };

inline constexpr std::array<Family, 5> kAllFamilies = {Family::normal, Family::log_normal,
                                                       Family::gamma, Family::beta, Family::burr};

std::string_view family_name(Family f);
Family family_from_name(std::string_view name);  // throws InputError

/// Scale floor applied to every fitted spread parameter.
inline constexpr double kScaleFloor = 1e-6;
/// Offset added to samples before fitting a positive-support family when the
/// sample minimum is exactly zero.
inline constexpr double kZeroShift = 1e-6;
inline constexpr std::size_t kMinFitSamples = 8;

struct FittedDistribution {
  Family family = Family::normal;
  // normal / log-normal: {mu, sigma, -}; gamma: {shape, scale, -};
  // beta: {alpha, beta, -}; burr XII: {c, k, lambda}
  std::array<double, 3> params{};
  double shift = 0.0;                         // positive-support families: fit on x + shift
  double support_lo = 0.0, support_hi = 1.0;  // beta only: x = lo + (hi - lo) * u
  double sse = 0.0;
  double log_likelihood = 0.0;

  double pdf(double x) const;
  double cdf(double x) const;
  /// Inverse CDF. Closed form for normal, log-normal and burr; bisection on
  /// the CDF (1e-8 absolute tolerance in the fitted variable) otherwise.
  double quantile(double p) const;

  friend bool operator==(const FittedDistribution&, const FittedDistribution&) = default;
};

/// Maximum-likelihood fit of one family. Returns nullopt when the family does
/// not apply to the samples or the fit produced invalid parameters. Throws
/// std::invalid_argument with fewer than kMinFitSamples samples.
std::optional<FittedDistribution> fit_family(std::span<const double> samples, Family family);

/// Equal-width histogram used for SSE scoring: max(10, ceil(sqrt(n))) bins
/// over [min, max]. Returns nullopt for a zero-width sample range.
struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> density;  // count / (n * width)
};
std::optional<Histogram> make_histogram(std::span<const double> samples);

/// Sum over bins of (empirical density - pdf(bin center))^2.
double histogram_sse(const Histogram& h, const FittedDistribution& d);

struct FitSelection {
  std::optional<FittedDistribution> best;  // nullopt: fall back to empirical quantiles
  std::array<std::optional<FittedDistribution>, 5> candidates;  // indexed by Family
};

/// Fits all five families and keeps the smallest SSE; ties go to the earlier
/// family in kAllFamilies order. Constant samples or fewer than
/// kMinFitSamples yield no best fit.
FitSelection select_best(std::span<const double> samples);

/// Linear-interpolation sample quantile (the usual "type 7" definition).
double empirical_quantile(std::span<const double> samples, double p);

/// Standard normal inverse CDF.
double normal_quantile(double p);

}  // namespace geolab
