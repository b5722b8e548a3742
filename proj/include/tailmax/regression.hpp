#pragma once

// Max-linear tail regression: the tail-dependence M-estimator of beta and the
// conditional least squares competitor.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailmax/evt_core.hpp"
#include "tailmax/taildep.hpp"

namespace tailmax {

struct FitConfig {
  std::size_t k = 40;
  double s0 = 0.5;
  // theta is searched on [theta_floor, 1 - theta_floor]^d.
  double theta_floor = 1e-4;
  // Exhaustive cell enumeration is used while (k+1)^d stays within this budget;
  // larger problems fall back to multistart simplex plus cell descent.
  std::size_t cell_budget = 4'000'000;
  std::size_t grid_points = 3;  // coarse grid per axis for simplex seeds
  std::size_t multistarts = 6;
  std::size_t simplex_iterations = 400;

  void validate(std::size_t n) const;
};

struct SolverDiagnostics {
  std::string method;             // "cell-enumeration" or "simplex+cell-descent"
  std::vector<std::size_t> cell;  // tail level of each theta_j at the optimum
  std::size_t evaluations = 0;
};

struct ThetaSolution {
  ThetaVector theta;
  double residual_norm = 0.0;
  SolverDiagnostics diagnostics;
};

struct BetaFit {
  std::vector<double> beta_hat;
  ThetaVector theta_hat;
  std::vector<double> alpha_hat;
  double gamma_hat = 0.0;
  double residual_norm = 0.0;  // ||g(theta_hat)||_2
  SolverDiagnostics diagnostics;
};

/// g_j(theta) = R-hat_j(1,1) - rtilde(j, theta, R-hat^X), where R-hat_j(1,1)
/// pairs covariate j with the response and R-hat^X is the empirical tail
/// copula of the covariates.
std::vector<double> estimating_residuals(const ThetaVector& theta, const TailSample& sample,
                                         std::size_t k);

/// Minimizer of ||g(theta)||^2 over the clamped cube. Within a cell of
/// constant tail levels each g_j is affine with slope -1 in theta_j, so the
/// cell minimum is a projection; the global minimum is the best cell.
/// Ties resolve to the lexicographically smallest theta.
ThetaSolution solve_theta(const TailSample& sample, const FitConfig& config);

/// Full estimator: pooled Hill gamma, alpha_hat per covariate, theta_hat, and
/// beta_j = alpha_j * theta_j^gamma. Errors name the failing stage.
BetaFit fit(const TailSample& sample, const FitConfig& config);

struct ClsConfig {
  std::size_t random_starts = 6;
  std::size_t max_iterations = 3000;
  std::uint64_t seed = 0x5eed;
  // Optional warm start for the slopes (typically the tail estimator's beta).
  std::optional<std::vector<double>> warm_start;
};

struct ClsFit {
  double beta0 = 0.0;
  std::vector<double> beta;
  double objective = 0.0;
  std::size_t subset_size = 0;
};

/// Rows where some covariate weakly exceeds its (n-k)-th order statistic.
std::vector<std::size_t> cls_subset(const TailSample& sample, std::size_t k);

/// Sum of squared residuals of Y - beta0 - max_j beta_j X_j over `rows`.
double cls_objective(const TailSample& sample, std::span<const std::size_t> rows, double beta0,
                     std::span<const double> beta);

/// Conditional least squares over the tail subset with beta >= 0, multistart
/// downhill simplex. Throws EmptySubset when no row qualifies.
ClsFit cls_fit(const TailSample& sample, std::size_t k, const ClsConfig& config = {});

}  // namespace tailmax
