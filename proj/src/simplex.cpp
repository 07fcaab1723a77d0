#include "geolab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace geolab {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> x0, const SimplexOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0 || options.initial_step.size() != n) {
    throw std::invalid_argument("nelder_mead: step size count must match parameter count");
  }

  SimplexResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> vertices(n + 1, x0);
  std::vector<double> values(n + 1);
  values[0] = eval(x0);
  for (std::size_t i = 0; i < n; ++i) {
    vertices[i + 1][i] += options.initial_step[i];
    values[i + 1] = eval(vertices[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point_along = [&](double coeff, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coeff * (centroid[j] - worst[j]);
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    // stable: ties keep vertex order, which keeps runs deterministic
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    if (values[worst] - values[best] <= options.f_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= n; ++v) {
      if (v == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += vertices[v][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    point_along(kReflect, trial, vertices[worst]);
    const double f_reflect = eval(trial);

    if (f_reflect < values[best]) {
      point_along(kExpand, trial2, vertices[worst]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        vertices[worst] = trial2;
        values[worst] = f_expand;
      } else {
        vertices[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      vertices[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }

    // contraction: outside if the reflection helped at all, inside otherwise
    const bool outside = f_reflect < values[worst];
    point_along(outside ? kContract : -kContract, trial2, vertices[worst]);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      vertices[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }

    for (std::size_t v = 0; v <= n; ++v) {
      if (v == best) continue;
      for (std::size_t j = 0; j < n; ++j) {
        vertices[v][j] = vertices[best][j] + kShrink * (vertices[v][j] - vertices[best][j]);
      }
      values[v] = eval(vertices[v]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best_idx = static_cast<std::size_t>(best_it - values.begin());
  // min_element picks the first minimum; vertex 0 starts as x0, so a run that
  // never improves returns x0 itself
  result.x = vertices[best_idx];
  result.value = *best_it;
  return result;
}

}  // namespace geolab
