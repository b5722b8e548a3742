#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tailmax::detail {

struct NelderMeadOptions {
  std::vector<double> step;  // initial simplex step per coordinate
  std::size_t max_iterations = 2000;
  double size_tolerance = 1e-10;
  // Number of times the search is restarted from its own best point.
  std::size_t restarts = 2;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Downhill simplex minimization (GSL nmsimplex2). The returned value never
/// exceeds f(start).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& options);

}  // namespace tailmax::detail
