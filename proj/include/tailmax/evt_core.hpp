#pragma once

// Rank and order-statistic building blocks for tail inference: ordinal ranks,
// the Hill estimator, the quantile-ratio estimator of the tail scale, and the
// rank-based empirical tail dependence function.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace tailmax {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-based ordinal ranks; entry i is the rank of value i.
using RankVector = std::vector<std::size_t>;

/// Ordinal ranks with ties broken by original index (earlier index ranks lower).
RankVector ranks(std::span<const double> values);

/// i-th smallest value, 1-based. order_statistic(s, n) is the maximum.
double order_statistic(std::span<const double> values, std::size_t i);

/// Hill estimate of the extreme value index from the top k order statistics.
/// Throws NonPositiveThreshold when X_(n-k) <= 0.
double hill(std::span<const double> values, std::size_t k);

/// Same as hill() but on an ascending-sorted copy of the data.
double hill_sorted(std::span<const double> sorted, std::size_t k);

/// Mean of the Hill estimates of every series. The offending series index is
/// named in the error if any Hill precondition fails.
double pooled_gamma(std::span<const std::span<const double>> series, std::size_t k);

/// Tail scale ratio estimate: the average over s in [s0, 1] of
/// Y_(n-floor(ks)) / X_(n-floor(ks)), integrated exactly as a step function.
double alpha_hat(std::span<const double> y, std::span<const double> x, std::size_t k,
                 double s0 = 0.5);

double alpha_hat_sorted(std::span<const double> sorted_y, std::span<const double> sorted_x,
                        std::size_t k, double s0 = 0.5);

/// Empirical tail dependence function R-hat. `args[c]` is the coordinate for
/// `rank_columns[c]`; +inf imposes no condition. Finite coordinates must lie in
/// (0, n/k].
double empirical_R(std::span<const double> args, std::size_t k,
                   std::span<const RankVector> rank_columns);

/// Number of ranks r in {1..n} with r > n - k*v + 1/2, i.e. the count of top
/// positions selected by a finite coordinate v. Shares its comparison with
/// empirical_R so cell-based solvers agree with it exactly.
std::size_t tail_level(std::size_t n, std::size_t k, double v);

/// Observed panel of covariates X_1..X_d and response Y with cached ranks and
/// sorted copies. Immutable after construction.
class TailSample {
 public:
  TailSample(std::vector<std::vector<double>> covariates, std::vector<double> response);

  std::size_t size() const noexcept { return response_.size(); }
  std::size_t dimension() const noexcept { return covariates_.size(); }

  std::span<const double> covariate(std::size_t j) const { return covariates_.at(j); }
  std::span<const double> response() const noexcept { return response_; }

  const RankVector& covariate_ranks(std::size_t j) const { return covariate_ranks_.at(j); }
  const RankVector& response_ranks() const noexcept { return response_ranks_; }
  std::span<const RankVector> all_covariate_ranks() const noexcept { return covariate_ranks_; }

  std::span<const double> sorted_covariate(std::size_t j) const { return sorted_covariates_.at(j); }
  std::span<const double> sorted_response() const noexcept { return sorted_response_; }

 private:
  std::vector<std::vector<double>> covariates_;
  std::vector<double> response_;
  std::vector<RankVector> covariate_ranks_;
  RankVector response_ranks_;
  std::vector<std::vector<double>> sorted_covariates_;
  std::vector<double> sorted_response_;
};

}  // namespace tailmax
