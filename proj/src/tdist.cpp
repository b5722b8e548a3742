#include "tailmax/tdist.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tailmax/errors.hpp"

namespace tailmax {

double student_t_quantile(double nu, double probability) {
  if (!(nu > 0.0)) fail(ErrorCode::InvalidArgument, "t quantile: nu must be positive");
  if (!(probability > 0.0 && probability < 1.0)) {
    fail(ErrorCode::InvalidArgument, "t quantile: probability must lie in (0,1)");
  }
  boost::math::students_t_distribution<double> dist(nu);
  return boost::math::quantile(dist, probability);
}

double student_t_survival(double nu, double x) {
  boost::math::students_t_distribution<double> dist(nu);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_quantile(double probability) {
  if (!(probability > 0.0 && probability < 1.0)) {
    fail(ErrorCode::InvalidArgument, "normal quantile: probability must lie in (0,1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), probability);
}

}  // namespace tailmax
