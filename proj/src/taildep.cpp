#include "tailmax/taildep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "tailmax/errors.hpp"
#include "tailmax/tdist.hpp"

namespace tailmax {

namespace {

bool is_pos_inf(double v) { return std::isinf(v) && v > 0; }

// min(theta * y, x) on the extended half-line.
double scaled_min(double theta, double y, double x) {
  const double ty = is_pos_inf(y) ? kInf : theta * y;
  return std::min(ty, x);
}

std::vector<double> marginal_scales(const SquareMatrix& scale) {
  std::vector<double> out;
  for (std::size_t j = 0; j < scale.size(); ++j) out.push_back(std::sqrt(scale[j][j]));
  return out;
}

}  // namespace

TailCopula::TailCopula(std::size_t dimension) : dimension_(dimension) {
  if (dimension < 1) fail(ErrorCode::InvalidArgument, "tail copula dimension must be >= 1");
}

double TailCopula::operator()(std::span<const double> args) const {
  if (args.size() != dimension_) {
    fail(ErrorCode::InvalidArgument, "tail copula expects " + std::to_string(dimension_) +
                                         " arguments, got " + std::to_string(args.size()));
  }
  std::size_t finite = 0;
  double single = 0.0;
  for (double v : args) {
    if (std::isnan(v) || !(v > 0.0)) {
      fail(ErrorCode::ArgumentOutOfDomain, "tail copula arguments must lie in (0, inf]");
    }
    if (!is_pos_inf(v)) {
      ++finite;
      single = v;
    }
  }
  if (finite == 0) fail(ErrorCode::DomainError, "tail copula needs a finite argument");
  if (finite == 1) return single;
  return joint(args);
}

double ComonotoneTailCopula::joint(std::span<const double> args) const {
  return *std::min_element(args.begin(), args.end());
}

double IndependenceTailCopula::joint(std::span<const double>) const { return 0.0; }

EmpiricalTailCopula::EmpiricalTailCopula(std::vector<RankVector> rank_columns, std::size_t k)
    : TailCopula(rank_columns.size()), ranks_(std::move(rank_columns)), k_(k) {}

double EmpiricalTailCopula::joint(std::span<const double> args) const {
  return empirical_R(args, k_, ranks_);
}

MonteCarloTCopula::MonteCarloTCopula(MonteCarloTOptions options)
    : TailCopula(options.scale.size()), options_(std::move(options)) {
  const auto& o = options_;
  if (!(o.tail_level > 0.0 && o.tail_level < 1.0) || o.draws == 0 || !(o.max_arg > 0.0) ||
      o.tail_level * o.max_arg >= 1.0) {
    fail(ErrorCode::InvalidArgument, "Monte-Carlo t copula: invalid p, N or max_arg");
  }
  const MvtSampler sampler(o.nu, o.scale);
  const std::size_t d = dimension();
  const auto sd = marginal_scales(o.scale);
  const double q = student_t_quantile(o.nu, 1.0 - o.tail_level * o.max_arg);

  Rng rng(o.seed);
  std::vector<double> x(d);
  for (std::size_t r = 0; r < o.draws; ++r) {
    sampler.draw(rng, x);
    bool keep = false;
    for (std::size_t j = 0; j < d; ++j) keep = keep || (x[j] / sd[j] > q);
    if (!keep) continue;
    for (std::size_t j = 0; j < d; ++j) {
      levels_.push_back(student_t_survival(o.nu, x[j] / sd[j]) / o.tail_level);
    }
  }
}

double MonteCarloTCopula::raw(std::span<const double> args) const {
  const std::size_t d = dimension();
  if (args.size() != d) fail(ErrorCode::InvalidArgument, "Monte-Carlo t copula: wrong arity");
  double smallest = kInf;
  for (double v : args) smallest = std::min(smallest, v);
  if (is_pos_inf(smallest)) fail(ErrorCode::DomainError, "all arguments infinite");
  if (smallest > options_.max_arg) {
    fail(ErrorCode::ArgumentOutOfDomain, "Monte-Carlo t copula: every finite argument exceeds max_arg");
  }
  std::size_t count = 0;
  for (std::size_t r = 0; r + d <= levels_.size(); r += d) {
    bool hit = true;
    for (std::size_t j = 0; j < d && hit; ++j) hit = levels_[r + j] < args[j];
    if (hit) ++count;
  }
  return static_cast<double>(count) /
         (static_cast<double>(options_.draws) * options_.tail_level);
}

double MonteCarloTCopula::standard_error(double estimate) const {
  return std::sqrt(std::max(estimate, 0.0) /
                   (static_cast<double>(options_.draws) * options_.tail_level));
}

double MonteCarloTCopula::joint(std::span<const double> args) const { return raw(args); }

double comonotone_R(std::span<const double> args) {
  return ComonotoneTailCopula(args.size())(args);
}

double independence_R(std::span<const double> args) {
  return IndependenceTailCopula(args.size())(args);
}

double mc_t_copula_R(std::span<const double> args, double nu, const SquareMatrix& scale,
                     double p, std::size_t draws, std::uint64_t seed) {
  const std::size_t d = scale.size();
  if (args.size() != d) fail(ErrorCode::InvalidArgument, "mc_t_copula_R: wrong arity");
  if (!(p > 0.0 && p < 1.0) || draws == 0) {
    fail(ErrorCode::InvalidArgument, "mc_t_copula_R: invalid p or N");
  }
  const auto sd = marginal_scales(scale);
  std::vector<double> threshold(d, -kInf);
  bool any_finite = false;
  for (std::size_t j = 0; j < d; ++j) {
    if (is_pos_inf(args[j])) continue;
    if (!(args[j] > 0.0) || p * args[j] >= 1.0) {
      fail(ErrorCode::ArgumentOutOfDomain, "mc_t_copula_R: argument outside (0, 1/p)");
    }
    threshold[j] = sd[j] * student_t_quantile(nu, 1.0 - p * args[j]);
    any_finite = true;
  }
  if (!any_finite) fail(ErrorCode::DomainError, "mc_t_copula_R: all arguments infinite");

  const MvtSampler sampler(nu, scale);
  Rng rng(seed);
  std::vector<double> x(d);
  std::size_t count = 0;
  for (std::size_t r = 0; r < draws; ++r) {
    sampler.draw(rng, x);
    bool hit = true;
    for (std::size_t j = 0; j < d && hit; ++j) hit = x[j] > threshold[j];
    if (hit) ++count;
  }
  return static_cast<double>(count) / (static_cast<double>(draws) * p);
}

ThetaVector::ThetaVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorCode::InvalidArgument, "theta must be nonempty");
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(values_[j] > 0.0 && values_[j] < 1.0)) {
      fail(ErrorCode::DomainError,
           "theta[" + std::to_string(j) + "] = " + std::to_string(values_[j]) + " outside (0,1)");
    }
  }
}

ThetaVector ModelParams::theta() const {
  if (beta.size() != alpha.size() || beta.empty() || !(gamma > 0.0)) {
    fail(ErrorCode::InvalidArgument, "model params: beta/alpha size mismatch or gamma <= 0");
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (!(beta[j] > 0.0 && alpha[j] > 0.0)) {
      fail(ErrorCode::InvalidArgument, "model params: beta and alpha must be positive");
    }
    out.push_back(std::pow(beta[j] / alpha[j], 1.0 / gamma));
  }
  return ThetaVector(std::move(out));
}

double theoretical_R(double x1, double x2, double y, const ThetaVector& theta,
                     const TailCopula& rx) {
  if (theta.size() != 2 || rx.dimension() != 2) {
    fail(ErrorCode::InvalidArgument, "theoretical_R is defined for d = 2");
  }
  if (is_pos_inf(x1) && is_pos_inf(x2) && is_pos_inf(y)) {
    fail(ErrorCode::DomainError, "theoretical_R: all coordinates infinite");
  }
  const double m1 = scaled_min(theta[0], y, x1);
  const double m2 = scaled_min(theta[1], y, x2);
  const double a[2] = {m1, x2};
  const double b[2] = {x1, m2};
  const double c[2] = {m1, m2};
  return rx(a) + rx(b) - rx(c);
}

double theoretical_R(double x1, double x2, double y, const ModelParams& params,
                     const TailCopula& rx) {
  return theoretical_R(x1, x2, y, params.theta(), rx);
}

double rtilde(std::size_t j, const ThetaVector& theta, const TailCopula& rx) {
  const std::size_t d = theta.size();
  if (rx.dimension() != d) {
    fail(ErrorCode::InvalidArgument, "rtilde: dimension mismatch");
  }
  if (j >= d) fail(ErrorCode::IndexOutOfRange, "rtilde: coordinate index out of range");
  if (d > 24) fail(ErrorCode::InvalidArgument, "rtilde: subset enumeration limited to d <= 24");

  std::vector<double> v(d);
  double sum = 0.0;
  // Bit i of `mask` selects coordinate i into S; masks ascend so the d = 2
  // case sums theta_1, rx(1, theta_2), -rx(theta_1, theta_2) in closed-form order.
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        v[i] = theta[i];
      } else {
        v[i] = (i == j) ? 1.0 : kInf;
      }
    }
    const int size = std::popcount(mask);
    const double term = rx(v);
    sum += (size % 2 == 1) ? term : -term;
  }
  return sum;
}

}  // namespace tailmax
