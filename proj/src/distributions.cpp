#include "geolab/distributions.hpp"

#include "geolab/simplex.hpp"
#include "geolab/streamline.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace geolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxFitEvaluations = 300;
constexpr double kFitTolerance = 1e-10;  // on the mean negative log-likelihood

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

bool all_positive(std::span<const double> params, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(params[i]) || params[i] <= 0.0) return false;
  }
  return true;
}

std::size_t param_count(Family f) { return f == Family::burr ? 3 : 2; }

// Bisection for a monotone CDF on [lo, hi] to an absolute tolerance.
template <class Cdf>
double bisect_cdf(const Cdf& cdf, double p, double lo, double hi, double tol) {
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::optional<FittedDistribution> fit_normal(std::span<const double> x) {
  FittedDistribution d;
  d.family = Family::normal;
  const double mu = mean_of(x);
  d.params = {mu, std::max(std::sqrt(variance_of(x, mu)), kScaleFloor), 0.0};
  return d;
}

std::optional<FittedDistribution> fit_log_normal(std::span<const double> y, double shift) {
  std::vector<double> logs(y.size());
  std::transform(y.begin(), y.end(), logs.begin(), [](double v) { return std::log(v); });
  FittedDistribution d;
  d.family = Family::log_normal;
  d.shift = shift;
  const double mu = mean_of(logs);
  d.params = {mu, std::max(std::sqrt(variance_of(logs, mu)), kScaleFloor), 0.0};
  return d;
}

std::optional<FittedDistribution> fit_gamma(std::span<const double> y, double shift) {
  const double m = mean_of(y);
  double mean_log = 0.0;
  for (double v : y) mean_log += std::log(v);
  mean_log /= static_cast<double>(y.size());
  const double var = std::max(variance_of(y, m), kScaleFloor * kScaleFloor);

  // scale is profiled out: for fixed shape k the MLE scale is mean / k
  auto nll = [&](std::span<const double> u) {
    const double k = std::exp(u[0]);
    return -((k - 1.0) * mean_log - k - k * std::log(m / k) - std::lgamma(k));
  };
  SimplexOptions opts;
  opts.initial_step = {0.5};
  opts.max_evaluations = kMaxFitEvaluations;
  opts.f_tolerance = kFitTolerance;
  const auto res = nelder_mead(nll, {std::log(m * m / var)}, opts);

  FittedDistribution d;
  d.family = Family::gamma;
  d.shift = shift;
  const double k = std::exp(res.x[0]);
  d.params = {k, std::max(m / k, kScaleFloor), 0.0};
  return d;
}

std::optional<FittedDistribution> fit_beta(std::span<const double> x) {
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  FittedDistribution d;
  d.family = Family::beta;
  d.support_lo = *mn - 1e-6;
  d.support_hi = *mx + 1e-6;
  const double range = d.support_hi - d.support_lo;

  double mean_log_u = 0.0;
  double mean_log_1mu = 0.0;
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    u[i] = (x[i] - d.support_lo) / range;
    mean_log_u += std::log(u[i]);
    mean_log_1mu += std::log1p(-u[i]);
  }
  mean_log_u /= static_cast<double>(x.size());
  mean_log_1mu /= static_cast<double>(x.size());

  const double mu = mean_of(u);
  const double var = variance_of(u, mu);
  double a0 = 1.0;
  double b0 = 1.0;
  if (var > 0.0) {
    const double common = mu * (1.0 - mu) / var - 1.0;
    if (common > 0.0) {
      a0 = mu * common;
      b0 = (1.0 - mu) * common;
    }
  }

  auto nll = [&](std::span<const double> v) {
    const double a = std::exp(v[0]);
    const double b = std::exp(v[1]);
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return -((a - 1.0) * mean_log_u + (b - 1.0) * mean_log_1mu - log_beta);
  };
  SimplexOptions opts;
  opts.initial_step = {0.3, 0.3};
  opts.max_evaluations = kMaxFitEvaluations;
  opts.f_tolerance = kFitTolerance;
  const auto res = nelder_mead(nll, {std::log(a0), std::log(b0)}, opts);
  d.params = {std::exp(res.x[0]), std::exp(res.x[1]), 0.0};
  return d;
}

std::optional<FittedDistribution> fit_burr(std::span<const double> y, double shift) {
  std::vector<double> logs(y.size());
  std::transform(y.begin(), y.end(), logs.begin(), [](double v) { return std::log(v); });
  const double mean_log = mean_of(logs);
  const double sd_log = std::sqrt(variance_of(logs, mean_log));
  if (!(sd_log > 0.0)) return std::nullopt;

  // k = 1 is the log-logistic case: median = lambda, sd(log x) = pi / (c sqrt 3)
  std::vector<double> sorted(logs);
  std::sort(sorted.begin(), sorted.end());
  const double log_lambda0 = empirical_quantile(sorted, 0.5);
  const double c0 = std::numbers::pi / (std::sqrt(3.0) * sd_log);

  auto nll = [&](std::span<const double> v) {
    const double c = std::exp(v[0]);
    const double k = std::exp(v[1]);
    const double log_lambda = v[2];
    double sum_log = 0.0;
    double sum_soft = 0.0;
    for (double lx : logs) {
      const double z = lx - log_lambda;
      sum_log += z;
      sum_soft += softplus(c * z);
    }
    const double n = static_cast<double>(logs.size());
    return -(std::log(c) + std::log(k) - log_lambda + (c - 1.0) * sum_log / n -
             (k + 1.0) * sum_soft / n);
  };
  SimplexOptions opts;
  opts.initial_step = {0.3, 0.3, 0.3};
  opts.max_evaluations = kMaxFitEvaluations;
  opts.f_tolerance = kFitTolerance;
  const auto res = nelder_mead(nll, {std::log(c0), 0.0, log_lambda0}, opts);

  FittedDistribution d;
  d.family = Family::burr;
  d.shift = shift;
  d.params = {std::exp(res.x[0]), std::exp(res.x[1]), std::exp(res.x[2])};
  return d;
}

double log_likelihood(const FittedDistribution& d, std::span<const double> x) {
  double ll = 0.0;
  for (double v : x) ll += std::log(d.pdf(v));
  return ll;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::normal: return "normal";
    case Family::log_normal: return "log_normal";
    case Family::gamma: return "gamma";
    case Family::beta: return "beta";
    case Family::burr: return "burr";
  }
  return "unknown";
}

Family family_from_name(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw InputError("unknown distribution family '" + std::string(name) + "'");
}

double normal_quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double FittedDistribution::pdf(double x) const {
  const auto& p = params;
  switch (family) {
    case Family::normal: {
      const double z = (x - p[0]) / p[1];
      return std::exp(-0.5 * z * z) / (p[1] * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::log_normal: {
      const double y = x + shift;
      if (y <= 0.0) return 0.0;
      const double z = (std::log(y) - p[0]) / p[1];
      return std::exp(-0.5 * z * z) / (y * p[1] * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::gamma: {
      const double y = x + shift;
      if (y <= 0.0) return 0.0;
      return std::exp((p[0] - 1.0) * std::log(y) - y / p[1] - p[0] * std::log(p[1]) -
                      std::lgamma(p[0]));
    }
    case Family::beta: {
      const double range = support_hi - support_lo;
      const double u = (x - support_lo) / range;
      if (u <= 0.0 || u >= 1.0) return 0.0;
      const double log_beta = std::lgamma(p[0]) + std::lgamma(p[1]) - std::lgamma(p[0] + p[1]);
      return std::exp((p[0] - 1.0) * std::log(u) + (p[1] - 1.0) * std::log1p(-u) - log_beta) /
             range;
    }
    case Family::burr: {
      const double y = x + shift;
      if (y <= 0.0) return 0.0;
      const double c = p[0], k = p[1], lambda = p[2];
      const double z = std::log(y / lambda);
      return std::exp(std::log(c * k / lambda) + (c - 1.0) * z - (k + 1.0) * softplus(c * z));
    }
  }
  return 0.0;
}

double FittedDistribution::cdf(double x) const {
  const auto& p = params;
  switch (family) {
    case Family::normal: return normal_cdf((x - p[0]) / p[1]);
    case Family::log_normal: {
      const double y = x + shift;
      return y <= 0.0 ? 0.0 : normal_cdf((std::log(y) - p[0]) / p[1]);
    }
    case Family::gamma: {
      const double y = x + shift;
      return y <= 0.0 ? 0.0 : boost::math::gamma_p(p[0], y / p[1]);
    }
    case Family::beta: {
      const double u = (x - support_lo) / (support_hi - support_lo);
      if (u <= 0.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return boost::math::ibeta(p[0], p[1], u);
    }
    case Family::burr: {
      const double y = x + shift;
      if (y <= 0.0) return 0.0;
      return -std::expm1(-p[1] * softplus(p[0] * std::log(y / p[2])));
    }
  }
  return 0.0;
}

double FittedDistribution::quantile(double prob) const {
  if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("quantile: p must be in (0, 1)");
  const auto& p = params;
  switch (family) {
    case Family::normal: return p[0] + p[1] * normal_quantile(prob);
    case Family::log_normal: return std::exp(p[0] + p[1] * normal_quantile(prob)) - shift;
    case Family::burr: {
      // lambda * ((1 - p)^(-1/k) - 1)^(1/c), in logs: the fit may sit near
      // its Weibull (k, lambda large) or Pareto (c large, k small) limits
      const double t = -std::log1p(-prob) / p[1];
      const double log_term = t > 30.0 ? t + std::log1p(-std::exp(-t)) : std::log(std::expm1(t));
      return p[2] * std::exp(log_term / p[0]) - shift;
    }
    case Family::gamma: {
      auto cdf_y = [&](double y) { return boost::math::gamma_p(p[0], y / p[1]); };
      double hi = p[0] * p[1] + p[1];
      while (cdf_y(hi) < prob) hi *= 2.0;
      return bisect_cdf(cdf_y, prob, 0.0, hi, 1e-8) - shift;
    }
    case Family::beta: {
      auto cdf_u = [&](double u) { return boost::math::ibeta(p[0], p[1], u); };
      const double u = bisect_cdf(cdf_u, prob, 0.0, 1.0, 1e-8);
      return support_lo + (support_hi - support_lo) * u;
    }
  }
  return 0.0;
}

std::optional<Histogram> make_histogram(std::span<const double> samples) {
  if (samples.empty()) return std::nullopt;
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (!(*mx > *mn)) return std::nullopt;
  const std::size_t n = samples.size();
  const auto bins = std::max<std::size_t>(
      10, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
  Histogram h;
  h.lo = *mn;
  h.width = (*mx - *mn) / static_cast<double>(bins);
  h.density.assign(bins, 0.0);
  for (double v : samples) {
    auto b = static_cast<std::size_t>((v - h.lo) / h.width);
    h.density[std::min(b, bins - 1)] += 1.0;
  }
  for (double& d : h.density) d /= static_cast<double>(n) * h.width;
  return h;
}

double histogram_sse(const Histogram& h, const FittedDistribution& d) {
  double sse = 0.0;
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    const double center = h.lo + (static_cast<double>(b) + 0.5) * h.width;
    const double diff = h.density[b] - d.pdf(center);
    sse += diff * diff;
  }
  return sse;
}

std::optional<FittedDistribution> fit_family(std::span<const double> samples, Family family) {
  if (samples.size() < kMinFitSamples) {
    throw std::invalid_argument("fit_family: need at least " + std::to_string(kMinFitSamples) +
                                " samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const bool constant = !(*mx > *mn);

  std::optional<FittedDistribution> fit;
  if (family == Family::normal) {
    fit = fit_normal(samples);
  } else if (family == Family::beta) {
    if (constant) return std::nullopt;
    fit = fit_beta(samples);
  } else {
    if (*mn < 0.0) return std::nullopt;
    const double shift = *mn == 0.0 ? kZeroShift : 0.0;
    std::vector<double> y(samples.begin(), samples.end());
    for (double& v : y) v += shift;
    if (family == Family::log_normal) {
      fit = fit_log_normal(y, shift);
    } else if (constant) {
      return std::nullopt;
    } else if (family == Family::gamma) {
      fit = fit_gamma(y, shift);
    } else {
      fit = fit_burr(y, shift);
    }
  }
  if (!fit) return std::nullopt;
  // the location parameter of normal / log-normal may be any finite value
  const bool has_location = family == Family::normal || family == Family::log_normal;
  const std::span<const double> params(fit->params.data(), param_count(family));
  if (!std::isfinite(params[0]) || !all_positive(params.subspan(has_location ? 1 : 0),
                                                 params.size() - (has_location ? 1 : 0))) {
    return std::nullopt;
  }

  fit->log_likelihood = log_likelihood(*fit, samples);
  if (!std::isfinite(fit->log_likelihood)) return std::nullopt;
  const auto hist = make_histogram(samples);
  fit->sse = hist ? histogram_sse(*hist, *fit) : kInf;
  if (std::isnan(fit->sse)) return std::nullopt;
  return fit;
}

FitSelection select_best(std::span<const double> samples) {
  FitSelection sel;
  if (samples.size() < kMinFitSamples || !make_histogram(samples)) return sel;
  for (Family f : kAllFamilies) {
    auto fit = fit_family(samples, f);
    if (fit && std::isfinite(fit->sse)) sel.candidates[static_cast<std::size_t>(f)] = fit;
  }
  for (const auto& c : sel.candidates) {
    if (c && (!sel.best || c->sse < sel.best->sse)) sel.best = c;
  }
  return sel;
}

double empirical_quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("empirical_quantile: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace geolab
