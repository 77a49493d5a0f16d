#pragma once

// Powell's direction-set minimizer with a bracketing + golden-section line
// search. Derivative free; single threaded and deterministic.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace popda {

using ObjectiveFn = std::function<double(std::span<const double>)>;

struct PowellOptions {
  double tol = 1e-6;       // relative decrease over a full cycle
  int max_iter = 500;      // cycles through the direction set
  double initial_step = 1.0;
};

struct PowellResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
  long evaluations = 0;
  /// Objective value at the end of each cycle, starting with f(x0).
  std::vector<double> cycle_values;
};

/// Minimizes `f` from `x0`. Running out of cycles is reported through
/// `converged == false`, never by throwing. Throws std::invalid_argument if
/// f(x0) is not finite.
PowellResult powell_minimize(const ObjectiveFn& f, std::vector<double> x0,
                             const PowellOptions& opts = {});

}  // namespace popda
