#include <algorithm>
#include <cmath>
#include <random>

#include "nelder_mead.hpp"
#include "tailmax/errors.hpp"
#include "tailmax/regression.hpp"

namespace tailmax {

std::vector<std::size_t> cls_subset(const TailSample& sample, std::size_t k) {
  const std::size_t n = sample.size();
  if (k < 1 || k >= n) fail(ErrorCode::InvalidArgument, "cls: k must satisfy 1 <= k < n");
  const std::size_t d = sample.dimension();
  std::vector<double> threshold(d);
  for (std::size_t j = 0; j < d; ++j) threshold[j] = sample.sorted_covariate(j)[n - k - 1];

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (sample.covariate(j)[i] >= threshold[j]) {
        rows.push_back(i);
        break;
      }
    }
  }
  return rows;
}

double cls_objective(const TailSample& sample, std::span<const std::size_t> rows, double beta0,
                     std::span<const double> beta) {
  const std::size_t d = sample.dimension();
  const auto y = sample.response();
  double ssr = 0.0;
  for (std::size_t i : rows) {
    double m = -kInf;
    for (std::size_t j = 0; j < d; ++j) m = std::max(m, beta[j] * sample.covariate(j)[i]);
    const double r = y[i] - beta0 - m;
    ssr += r * r;
  }
  return ssr;
}

ClsFit cls_fit(const TailSample& sample, std::size_t k, const ClsConfig& config) {
  const std::size_t d = sample.dimension();
  const auto rows = cls_subset(sample, k);
  if (rows.empty()) fail(ErrorCode::EmptySubset, "no row exceeds a covariate threshold");

  const auto y = sample.response();
  double sy = 0.0, syy = 0.0, smy = 0.0, smm = 0.0;
  for (std::size_t i : rows) {
    double m = -kInf;
    for (std::size_t j = 0; j < d; ++j) m = std::max(m, sample.covariate(j)[i]);
    sy += y[i];
    syy += y[i] * y[i];
    smy += m * y[i];
    smm += m * m;
  }
  const double count = static_cast<double>(rows.size());
  const double sd_y = std::sqrt(std::max(syy / count - (sy / count) * (sy / count), 0.0));
  // Common slope of Y on max_j X_j through the origin.
  const double common = smm > 0.0 ? std::max(smy / smm, 0.0) : 0.0;

  // Parameters are (beta0, u_1..u_d) with beta_j = |u_j|.
  std::vector<double> beta_buf(d);
  auto objective = [&](std::span<const double> p) {
    for (std::size_t j = 0; j < d; ++j) beta_buf[j] = std::abs(p[j + 1]);
    return cls_objective(sample, rows, p[0], beta_buf);
  };

  std::vector<std::vector<double>> starts;
  if (config.warm_start && config.warm_start->size() == d) {
    std::vector<double> s{0.0};
    for (double b : *config.warm_start) s.push_back(std::isfinite(b) ? std::abs(b) : common);
    starts.push_back(std::move(s));
  }
  {
    std::vector<double> s{0.0};
    s.insert(s.end(), d, common);
    starts.push_back(std::move(s));
  }
  Rng rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double slope_span = 2.0 * std::max(common, 0.1);
  const double intercept_span = std::max(sd_y, 1e-3);
  for (std::size_t r = 0; r < config.random_starts; ++r) {
    std::vector<double> s{(2.0 * unit(rng) - 1.0) * intercept_span};
    for (std::size_t j = 0; j < d; ++j) s.push_back(unit(rng) * slope_span);
    starts.push_back(std::move(s));
  }

  detail::NelderMeadOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.size_tolerance = 1e-9;
  opt.restarts = 3;
  opt.step.assign(d + 1, 0.0);
  opt.step[0] = std::max(0.1 * intercept_span, 1e-2);
  for (std::size_t j = 0; j < d; ++j) opt.step[j + 1] = std::max(0.1 * common, 5e-2);

  detail::NelderMeadResult best;
  best.value = kInf;
  for (const auto& s : starts) {
    auto res = detail::nelder_mead(objective, s, opt);
    if (res.value < best.value) best = std::move(res);
  }

  ClsFit out;
  out.beta0 = best.x[0];
  for (std::size_t j = 0; j < d; ++j) out.beta.push_back(std::abs(best.x[j + 1]));
  out.objective = cls_objective(sample, rows, out.beta0, out.beta);
  out.subset_size = rows.size();
  return out;
}

}  // namespace tailmax
