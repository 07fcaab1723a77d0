#pragma once

#include <functional>
#include <span>
#include <vector>

namespace geolab {

struct SimplexOptions {
  std::vector<double> initial_step;  // one entry per parameter
  int max_evaluations = 500;
  // Stop once the spread of objective values across the simplex drops below
  // this value.
  double f_tolerance = 1e-3;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Deterministic Nelder-Mead minimization. The initial simplex is x0 plus one
/// axis-aligned vertex per parameter at the given step. x0 is always the first
/// evaluated point, so the returned value never exceeds f(x0).
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> x0, const SimplexOptions& options);

}  // namespace geolab
