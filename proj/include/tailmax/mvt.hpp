#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace tailmax {

using Rng = std::mt19937_64;

// Square matrix stored row by row.
using SquareMatrix = std::vector<std::vector<double>>;

/// Multivariate Student-t draws Z / sqrt(W / nu), Z ~ N(0, S), W ~ chi2(nu).
/// Throws CholeskyFailure when S is not symmetric positive definite.
class MvtSampler {
 public:
  MvtSampler(double nu, const SquareMatrix& scale);

  std::size_t dimension() const noexcept { return dim_; }
  double nu() const noexcept { return nu_; }

  /// Writes one draw into `out` (size == dimension()).
  void draw(Rng& rng, std::span<double> out) const;

 private:
  double nu_;
  std::size_t dim_;
  std::vector<double> lower_;  // row-major Cholesky factor
};

/// Equicorrelation matrix with unit diagonal and `rho` off the diagonal.
SquareMatrix equicorrelation(std::size_t dim, double rho);

}  // namespace tailmax
