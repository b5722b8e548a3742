#include "tailmax/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cell_grid.hpp"
#include "nelder_mead.hpp"
#include "tailmax/errors.hpp"

namespace tailmax {

namespace {

using detail::CellGrid;

// Inward offset at the open lower end of a cell, (a - 1/2)/k < theta.
constexpr double kCellEdge = 1e-9;

struct CellRange {
  std::size_t level;
  double lo;
  double hi;
};

// Admissible tail levels of one theta coordinate with the theta interval each
// occupies after clamping to [floor, 1 - floor].
std::vector<CellRange> cell_ranges(std::size_t n, std::size_t k, double floor) {
  std::vector<CellRange> out;
  const double kd = static_cast<double>(k);
  for (std::size_t a = 0; a <= k; ++a) {
    double lo = std::max(floor, (static_cast<double>(a) - 0.5) / kd + kCellEdge);
    double hi = std::min(1.0 - floor, (static_cast<double>(a) + 0.5) / kd - kCellEdge);
    if (lo > hi) continue;
    // Guard the floating-point edges so every point of [lo, hi] maps to level a.
    while (tail_level(n, k, lo) != a && lo < hi) lo = std::nextafter(lo, hi);
    while (tail_level(n, k, hi) != a && hi > lo) hi = std::nextafter(hi, lo);
    if (tail_level(n, k, lo) != a || tail_level(n, k, hi) != a) continue;
    out.push_back({a, lo, hi});
  }
  return out;
}

// Best theta inside a cell and its objective.
double cell_optimum(const CellGrid& grid, std::span<const CellRange* const> cells,
                    std::span<double> constants, std::span<double> theta) {
  const std::size_t d = cells.size();
  std::size_t levels[24];
  for (std::size_t j = 0; j < d; ++j) levels[j] = cells[j]->level;
  grid.cell_constants(std::span<const std::size_t>(levels, d), constants);
  double obj = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    theta[j] = std::clamp(constants[j], cells[j]->lo, cells[j]->hi);
    const double g = constants[j] - theta[j];
    obj += g * g;
  }
  return obj;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::size_t ipow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

struct SearchState {
  std::vector<double> theta;
  std::vector<std::size_t> cell;
  double objective = kInf;
};

SearchState enumerate_cells(const CellGrid& grid, const std::vector<CellRange>& ranges,
                            std::size_t& evaluations) {
  const std::size_t d = grid.dimension();
  std::vector<std::size_t> odometer(d, 0);
  std::vector<const CellRange*> cells(d);
  std::vector<double> constants(d), theta(d);
  SearchState best;
  while (true) {
    for (std::size_t j = 0; j < d; ++j) cells[j] = &ranges[odometer[j]];
    const double obj = cell_optimum(grid, cells, constants, theta);
    ++evaluations;
    // Cells are visited in lexicographic order and theta is monotone in the
    // cell index, so keeping the first strict improvement breaks ties toward
    // the lexicographically smallest theta.
    if (obj < best.objective) {
      best.objective = obj;
      best.theta = theta;
      best.cell.resize(d);
      for (std::size_t j = 0; j < d; ++j) best.cell[j] = cells[j]->level;
    }
    std::size_t pos = d;
    while (pos > 0) {
      --pos;
      if (++odometer[pos] < ranges.size()) break;
      odometer[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

SearchState simplex_then_descent(const CellGrid& grid, const std::vector<CellRange>& ranges,
                                 std::size_t n, const FitConfig& config,
                                 std::size_t& evaluations) {
  const std::size_t d = grid.dimension();
  const std::size_t k = grid.tail_count();
  const double lo = config.theta_floor;
  const double hi = 1.0 - config.theta_floor;

  auto range_of = [&](std::size_t level) -> const CellRange* {
    auto it = std::lower_bound(ranges.begin(), ranges.end(), level,
                               [](const CellRange& r, std::size_t l) { return r.level < l; });
    return it != ranges.end() && it->level == level ? &*it : nullptr;
  };
  auto level_of = [&](double t) {
    const CellRange* r = range_of(tail_level(n, k, std::clamp(t, lo, hi)));
    return r != nullptr ? r : (t < 0.5 ? &ranges.front() : &ranges.back());
  };

  std::vector<double> constants(d), scratch(d);
  std::vector<const CellRange*> cells(d);
  auto objective_at = [&](std::span<const double> t) {
    double obj = 0.0;
    for (std::size_t j = 0; j < d; ++j) cells[j] = level_of(t[j]);
    std::size_t levels[24];
    for (std::size_t j = 0; j < d; ++j) levels[j] = cells[j]->level;
    grid.cell_constants(std::span<const std::size_t>(levels, d), constants);
    for (std::size_t j = 0; j < d; ++j) {
      const double tj = std::clamp(t[j], cells[j]->lo, cells[j]->hi);
      const double g = constants[j] - tj;
      obj += g * g;
    }
    ++evaluations;
    return obj;
  };

  // Coarse grid seeds, best first.
  const std::size_t m = std::max<std::size_t>(config.grid_points, 1);
  const std::size_t total = ipow(m, d, 20'000);
  std::vector<std::pair<double, std::vector<double>>> seeds;
  if (total <= 20'000) {
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t s = 0; s < total; ++s) {
      std::vector<double> t(d);
      std::size_t rem = s;
      for (std::size_t j = d; j-- > 0;) {
        idx[j] = rem % m;
        rem /= m;
        t[j] = (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(m);
      }
      seeds.emplace_back(objective_at(t), std::move(t));
    }
  } else {
    seeds.emplace_back(0.0, std::vector<double>(d, 0.5));
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  seeds.resize(std::min(seeds.size(), std::max<std::size_t>(config.multistarts, 1)));

  SearchState best;
  for (const auto& seed : seeds) {
    detail::NelderMeadOptions opt;
    opt.step.assign(d, 0.1);
    opt.max_iterations = config.simplex_iterations;
    opt.size_tolerance = 1e-6;
    opt.restarts = 1;
    const auto nm = detail::nelder_mead(objective_at, seed.second, opt);

    // Cell descent: move one coordinate's tail level at a time.
    std::vector<const CellRange*> current(d);
    for (std::size_t j = 0; j < d; ++j) current[j] = level_of(nm.x[j]);
    double current_obj = cell_optimum(grid, current, constants, scratch);
    ++evaluations;
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t j = 0; j < d; ++j) {
        const CellRange* keep = current[j];
        for (const auto& r : ranges) {
          if (&r == keep) continue;
          current[j] = &r;
          const double obj = cell_optimum(grid, current, constants, scratch);
          ++evaluations;
          if (obj < current_obj) {
            current_obj = obj;
            keep = &r;
            improved = true;
          }
        }
        current[j] = keep;
      }
    }
    cell_optimum(grid, current, constants, scratch);
    if (current_obj < best.objective ||
        (current_obj == best.objective && lex_less(scratch, best.theta))) {
      best.objective = current_obj;
      best.theta = scratch;
      best.cell.resize(d);
      for (std::size_t j = 0; j < d; ++j) best.cell[j] = current[j]->level;
    }
  }
  return best;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

template <class F>
auto staged(const char* stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("fit stage '") + stage + "': " + e.what());
  }
}

}  // namespace

void FitConfig::validate(std::size_t n) const {
  if (k < 1 || k >= n) {
    fail(ErrorCode::InvalidArgument,
         "k=" + std::to_string(k) + " must satisfy 1 <= k < n=" + std::to_string(n));
  }
  if (!(s0 > 0.0 && s0 < 1.0)) fail(ErrorCode::InvalidArgument, "s0 must lie in (0,1)");
  if (!(theta_floor > 0.0 && theta_floor < 0.5)) {
    fail(ErrorCode::InvalidArgument, "theta_floor must lie in (0, 1/2)");
  }
}

std::vector<double> estimating_residuals(const ThetaVector& theta, const TailSample& sample,
                                         std::size_t k) {
  const std::size_t d = sample.dimension();
  if (theta.size() != d) fail(ErrorCode::InvalidArgument, "theta dimension differs from sample");
  const EmpiricalTailCopula rx(
      std::vector<RankVector>(sample.all_covariate_ranks().begin(),
                              sample.all_covariate_ranks().end()),
      k);

  std::vector<RankVector> with_y(sample.all_covariate_ranks().begin(),
                                 sample.all_covariate_ranks().end());
  with_y.push_back(sample.response_ranks());

  std::vector<double> g(d);
  std::vector<double> args(d + 1, kInf);
  args[d] = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    args[j] = 1.0;
    const double pair = empirical_R(args, k, with_y);
    args[j] = kInf;
    g[j] = pair - rtilde(j, theta, rx);
  }
  return g;
}

ThetaSolution solve_theta(const TailSample& sample, const FitConfig& config) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dimension();
  config.validate(n);
  if (d < 1 || d > 24) fail(ErrorCode::InvalidArgument, "solve_theta supports 1 <= d <= 24");

  const auto ranges = cell_ranges(n, config.k, config.theta_floor);
  if (ranges.empty()) fail(ErrorCode::NoProgress, "no admissible theta cell");
  const std::size_t cells = ipow(ranges.size(), d, config.cell_budget);
  const bool exhaustive = cells <= config.cell_budget;
  const bool dense = ipow(config.k + 2, d, 8'000'000) <= 8'000'000;
  const CellGrid grid(sample, config.k, dense);

  std::size_t evaluations = 0;
  SearchState best = exhaustive ? enumerate_cells(grid, ranges, evaluations)
                                : simplex_then_descent(grid, ranges, n, config, evaluations);
  if (!(best.objective <= static_cast<double>(d))) {
    fail(ErrorCode::NoProgress, "every evaluated ||g||^2 exceeds d (best " +
                                    std::to_string(best.objective) + ")");
  }

  ThetaVector theta(best.theta);
  const auto g = estimating_residuals(theta, sample, config.k);
  return ThetaSolution{std::move(theta), norm2(g),
                       SolverDiagnostics{exhaustive ? "cell-enumeration" : "simplex+cell-descent",
                                         best.cell, evaluations}};
}

BetaFit fit(const TailSample& sample, const FitConfig& config) {
  const std::size_t d = sample.dimension();
  staged("config", [&] {
    config.validate(sample.size());
    return 0;
  });

  const double gamma = staged("gamma", [&] {
    std::vector<std::span<const double>> series;
    for (std::size_t j = 0; j < d; ++j) series.push_back(sample.sorted_covariate(j));
    series.push_back(sample.sorted_response());
    double sum = 0.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      try {
        sum += hill_sorted(series[s], config.k);
      } catch (const Error& e) {
        const std::string name = s < d ? "X" + std::to_string(s + 1) : std::string("Y");
        throw Error(e.code(), std::string(e.what()) + " (series " + name + ")");
      }
    }
    return sum / static_cast<double>(series.size());
  });

  const auto alpha = staged("alpha", [&] {
    std::vector<double> out;
    for (std::size_t j = 0; j < d; ++j) {
      out.push_back(
          alpha_hat_sorted(sample.sorted_response(), sample.sorted_covariate(j), config.k, config.s0));
    }
    return out;
  });

  auto solution = staged("theta", [&] { return solve_theta(sample, config); });

  std::vector<double> beta(d);
  for (std::size_t j = 0; j < d; ++j) beta[j] = alpha[j] * std::pow(solution.theta[j], gamma);

  return BetaFit{std::move(beta),         std::move(solution.theta), alpha, gamma,
                 solution.residual_norm, std::move(solution.diagnostics)};
}

}  // namespace tailmax
