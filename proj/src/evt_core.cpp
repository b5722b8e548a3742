#include "tailmax/evt_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tailmax/errors.hpp"

namespace tailmax {

namespace {

void check_series(std::span<const double> values, const char* what) {
  if (values.size() < 2) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " needs at least 2 values");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::InvalidArgument,
           std::string(what) + " has a non-finite value at index " + std::to_string(i));
    }
  }
}

void check_tail_count(std::size_t k, std::size_t n) {
  if (k < 1 || k >= n) {
    fail(ErrorCode::InvalidArgument,
         "tail count k=" + std::to_string(k) + " must satisfy 1 <= k < n=" + std::to_string(n));
  }
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

RankVector ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  RankVector out(n);
  for (std::size_t pos = 0; pos < n; ++pos) out[order[pos]] = pos + 1;
  return out;
}

double order_statistic(std::span<const double> values, std::size_t i) {
  if (i < 1 || i > values.size()) {
    fail(ErrorCode::IndexOutOfRange, "order statistic index " + std::to_string(i) +
                                         " outside [1, " + std::to_string(values.size()) + "]");
  }
  std::vector<double> copy(values.begin(), values.end());
  auto nth = copy.begin() + static_cast<std::ptrdiff_t>(i - 1);
  std::nth_element(copy.begin(), nth, copy.end());
  return *nth;
}

double hill_sorted(std::span<const double> sorted, std::size_t k) {
  const std::size_t n = sorted.size();
  check_tail_count(k, n);
  const double threshold = sorted[n - k - 1];
  if (!(threshold > 0.0)) {
    fail(ErrorCode::NonPositiveThreshold,
         "X_(n-k) = " + std::to_string(threshold) + " <= 0 at k=" + std::to_string(k));
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) sum += std::log(sorted[n - i] / threshold);
  return sum / static_cast<double>(k);
}

double hill(std::span<const double> values, std::size_t k) {
  check_series(values, "hill input");
  return hill_sorted(sorted_copy(values), k);
}

double pooled_gamma(std::span<const std::span<const double>> series, std::size_t k) {
  if (series.empty()) fail(ErrorCode::InvalidArgument, "pooled_gamma needs at least one series");
  double sum = 0.0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    try {
      sum += hill(series[s], k);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (series " + std::to_string(s + 1) + ")");
    }
  }
  return sum / static_cast<double>(series.size());
}

double alpha_hat_sorted(std::span<const double> sorted_y, std::span<const double> sorted_x,
                        std::size_t k, double s0) {
  const std::size_t n = sorted_y.size();
  if (sorted_x.size() != n) fail(ErrorCode::InvalidArgument, "alpha_hat: length mismatch");
  check_tail_count(k, n);
  if (!(s0 > 0.0 && s0 < 1.0)) {
    fail(ErrorCode::InvalidArgument, "alpha_hat: s0 must lie in (0,1)");
  }
  const double kd = static_cast<double>(k);
  const auto first = static_cast<std::size_t>(std::floor(kd * s0));
  double integral = 0.0;
  for (std::size_t i = first; i < k; ++i) {
    const double lo = std::max(static_cast<double>(i) / kd, s0);
    const double hi = std::min(static_cast<double>(i + 1) / kd, 1.0);
    const double width = hi - lo;
    if (width <= 0.0) continue;
    // Y_(n-i) / X_(n-i) in 1-based order-statistic notation.
    const double x = sorted_x[n - i - 1];
    if (x == 0.0) {
      fail(ErrorCode::DivisionByZero, "alpha_hat: X_(n-" + std::to_string(i) + ") is zero");
    }
    integral += width * (sorted_y[n - i - 1] / x);
  }
  return integral / (1.0 - s0);
}

double alpha_hat(std::span<const double> y, std::span<const double> x, std::size_t k, double s0) {
  check_series(y, "alpha_hat response");
  check_series(x, "alpha_hat covariate");
  return alpha_hat_sorted(sorted_copy(y), sorted_copy(x), k, s0);
}

std::size_t tail_level(std::size_t n, std::size_t k, double v) {
  const double threshold = static_cast<double>(n) - static_cast<double>(k) * v + 0.5;
  if (threshold < 1.0) return n;
  const double fl = std::floor(threshold);
  if (fl >= static_cast<double>(n)) return 0;
  return n - static_cast<std::size_t>(fl);
}

double empirical_R(std::span<const double> args, std::size_t k,
                   std::span<const RankVector> rank_columns) {
  if (args.size() != rank_columns.size() || args.empty()) {
    fail(ErrorCode::InvalidArgument, "empirical_R: argument count must match column count");
  }
  const std::size_t n = rank_columns.front().size();
  check_tail_count(k, n);
  const double upper = static_cast<double>(n) / static_cast<double>(k);

  // Rows pass coordinate c when rank > n - level_c.
  std::vector<std::size_t> active;
  std::vector<std::size_t> cutoff;
  for (std::size_t c = 0; c < args.size(); ++c) {
    if (rank_columns[c].size() != n) {
      fail(ErrorCode::InvalidArgument, "empirical_R: rank columns differ in length");
    }
    const double v = args[c];
    if (std::isinf(v) && v > 0) continue;
    if (!(v > 0.0) || v > upper) {
      fail(ErrorCode::ArgumentOutOfDomain, "empirical_R: coordinate " + std::to_string(c) + " = " +
                                               std::to_string(v) + " outside (0, n/k]");
    }
    active.push_back(c);
    cutoff.push_back(n - tail_level(n, k, v));
  }
  if (active.empty()) {
    fail(ErrorCode::ArgumentOutOfDomain, "empirical_R: at least one coordinate must be finite");
  }

  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool hit = true;
    for (std::size_t a = 0; a < active.size() && hit; ++a) {
      hit = rank_columns[active[a]][i] > cutoff[a];
    }
    if (hit) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(k);
}

TailSample::TailSample(std::vector<std::vector<double>> covariates, std::vector<double> response)
    : covariates_(std::move(covariates)), response_(std::move(response)) {
  if (covariates_.empty()) fail(ErrorCode::InvalidArgument, "TailSample needs a covariate");
  check_series(response_, "response");
  for (std::size_t j = 0; j < covariates_.size(); ++j) {
    if (covariates_[j].size() != response_.size()) {
      fail(ErrorCode::InvalidArgument,
           "covariate " + std::to_string(j) + " length differs from response length");
    }
    check_series(covariates_[j], "covariate");
    covariate_ranks_.push_back(ranks(covariates_[j]));
    sorted_covariates_.push_back(sorted_copy(covariates_[j]));
  }
  response_ranks_ = ranks(response_);
  sorted_response_ = sorted_copy(response_);
}

}  // namespace tailmax
