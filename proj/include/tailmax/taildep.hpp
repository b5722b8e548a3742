#pragma once

// Tail dependence functions. A TailCopula maps args in (0, inf]^d (not all
// infinite) to the limiting joint exceedance mass R^X; concrete evaluators
// cover the comonotone and independent extremes, the rank-based empirical
// estimator and a Monte-Carlo oracle for the multivariate t.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tailmax/evt_core.hpp"
#include "tailmax/mvt.hpp"

namespace tailmax {

class TailCopula {
 public:
  explicit TailCopula(std::size_t dimension);
  virtual ~TailCopula() = default;

  std::size_t dimension() const noexcept { return dimension_; }

  /// Validates `args` and evaluates. A single finite coordinate a returns a
  /// exactly (marginal standardization); otherwise defers to joint().
  double operator()(std::span<const double> args) const;

 protected:
  /// Called with at least two finite coordinates.
  virtual double joint(std::span<const double> args) const = 0;

 private:
  std::size_t dimension_;
};

class ComonotoneTailCopula final : public TailCopula {
 public:
  using TailCopula::TailCopula;

 protected:
  double joint(std::span<const double> args) const override;
};

class IndependenceTailCopula final : public TailCopula {
 public:
  using TailCopula::TailCopula;

 protected:
  double joint(std::span<const double> args) const override;
};

/// R-hat restricted to a set of rank columns.
class EmpiricalTailCopula final : public TailCopula {
 public:
  EmpiricalTailCopula(std::vector<RankVector> rank_columns, std::size_t k);

  std::size_t tail_count() const noexcept { return k_; }

 protected:
  double joint(std::span<const double> args) const override;

 private:
  std::vector<RankVector> ranks_;
  std::size_t k_;
};

struct MonteCarloTOptions {
  double nu = 4.0;
  SquareMatrix scale;
  double tail_level = 1e-4;        // p
  std::size_t draws = 10'000'000;  // N
  std::uint64_t seed = 1;
  // Evaluations need at least one finite coordinate <= max_arg.
  double max_arg = 4.0;
};

/// Monte-Carlo estimate of the multivariate-t tail copula at tail level p.
/// Draws are simulated once at construction; only rows exceeding the
/// (1 - p * max_arg) marginal quantile in some coordinate are retained, stored
/// as standardized exceedance levels (1 - F_j(X_j)) / p.
class MonteCarloTCopula final : public TailCopula {
 public:
  explicit MonteCarloTCopula(MonteCarloTOptions options);

  std::size_t retained_rows() const noexcept { return levels_.size() / dimension(); }
  const MonteCarloTOptions& options() const noexcept { return options_; }

  /// Raw estimate without the exact marginal shortcut of operator().
  double raw(std::span<const double> args) const;

  /// Standard error sqrt(R / (N p)) for an estimate R.
  double standard_error(double estimate) const;

 protected:
  double joint(std::span<const double> args) const override;

 private:
  MonteCarloTOptions options_;
  std::vector<double> levels_;
};

double comonotone_R(std::span<const double> args);
double independence_R(std::span<const double> args);

/// One-shot Monte-Carlo estimate of (1/p) Pr{X_j > U_j(1/(p args_j)) for all
/// finite j}, thresholds from exact t quantiles. Deterministic per seed.
double mc_t_copula_R(std::span<const double> args, double nu, const SquareMatrix& scale,
                     double p, std::size_t draws, std::uint64_t seed);

/// Transformed coefficients theta in (0,1)^d.
class ThetaVector {
 public:
  explicit ThetaVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

struct ModelParams {
  std::vector<double> beta;
  std::vector<double> alpha;
  double gamma = 1.0;

  /// theta_j = (beta_j / alpha_j)^(1/gamma); throws DomainError outside (0,1).
  ThetaVector theta() const;
};

/// Limit of the joint (X1, X2, Y) exceedance function for d = 2, any
/// coordinate may be +inf but not all three.
double theoretical_R(double x1, double x2, double y, const ModelParams& params,
                     const TailCopula& rx);

/// Same with theta supplied directly.
double theoretical_R(double x1, double x2, double y, const ThetaVector& theta,
                     const TailCopula& rx);

/// Limit of (1/p) Pr{X_j > U_j(1/p), Y > U_Y(1/p)} as a function of theta:
/// the exceedance mass of {x_j > 1} intersected with the union of
/// {x_i > theta_i}, by inclusion-exclusion over nonempty subsets S:
///   sum_S (-1)^{|S|+1} rx(v_S),  v_S,i = theta_i (i in S), 1 (i = j not in S), inf.
/// `j` is 0-based.
double rtilde(std::size_t j, const ThetaVector& theta, const TailCopula& rx);

}  // namespace tailmax
