#include "tailmax/mvt.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <string>

#include "tailmax/errors.hpp"

namespace tailmax {

MvtSampler::MvtSampler(double nu, const SquareMatrix& scale) : nu_(nu), dim_(scale.size()) {
  if (!(nu > 0.0)) fail(ErrorCode::InvalidArgument, "multivariate t: nu must be positive");
  if (dim_ == 0) fail(ErrorCode::CholeskyFailure, "scale matrix is empty");
  Eigen::MatrixXd s(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (scale[i].size() != dim_) fail(ErrorCode::CholeskyFailure, "scale matrix is not square");
    for (std::size_t j = 0; j < dim_; ++j) s(i, j) = scale[i][j];
  }
  if (!s.isApprox(s.transpose(), 1e-12)) {
    fail(ErrorCode::CholeskyFailure, "scale matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::CholeskyFailure, "scale matrix is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  lower_.resize(dim_ * dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) lower_[i * dim_ + j] = l(i, j);
}

void MvtSampler::draw(Rng& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi2(nu_);
  double z[16];
  std::vector<double> zbuf;
  double* zp = z;
  if (dim_ > 16) {
    zbuf.resize(dim_);
    zp = zbuf.data();
  }
  for (std::size_t i = 0; i < dim_; ++i) zp[i] = normal(rng);
  const double scale = 1.0 / std::sqrt(chi2(rng) / nu_);
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += lower_[i * dim_ + j] * zp[j];
    out[i] = acc * scale;
  }
}

SquareMatrix equicorrelation(std::size_t dim, double rho) {
  SquareMatrix m(dim, std::vector<double>(dim, rho));
  for (std::size_t i = 0; i < dim; ++i) m[i][i] = 1.0;
  return m;
}

}  // namespace tailmax
