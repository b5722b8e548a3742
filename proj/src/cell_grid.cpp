#include "cell_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "tailmax/errors.hpp"

namespace tailmax::detail {

CellGrid::CellGrid(const TailSample& sample, std::size_t k, bool dense)
    : dim_(sample.dimension()), k_(k) {
  const std::size_t n = sample.size();
  if (k < 1 || k >= n) fail(ErrorCode::InvalidArgument, "cell grid: k must satisfy 1 <= k < n");
  if (dim_ > 24) fail(ErrorCode::InvalidArgument, "cell grid: dimension too large");

  // Position from the top: the maximum has position 1. Positions beyond k
  // collapse to k + 1.
  std::vector<std::uint32_t> pos(n * dim_);
  for (std::size_t c = 0; c < dim_; ++c) {
    const auto& r = sample.covariate_ranks(c);
    for (std::size_t i = 0; i < n; ++i) {
      pos[i * dim_ + c] = static_cast<std::uint32_t>(clip(n - r[i] + 1));
    }
  }

  const auto& ry = sample.response_ranks();
  response_pair_.assign(dim_, 0.0);
  for (std::size_t c = 0; c < dim_; ++c) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pos[i * dim_ + c] <= k && n - ry[i] + 1 <= k) ++hits;
    }
    response_pair_[c] = static_cast<double>(hits) / static_cast<double>(k);
  }

  if (dense) {
    const std::size_t side = k + 2;
    stride_.assign(dim_, 1);
    for (std::size_t c = 1; c < dim_; ++c) stride_[c] = stride_[c - 1] * side;
    const std::size_t total = stride_.back() * side;
    table_.assign(total, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t idx = 0;
      for (std::size_t c = 0; c < dim_; ++c) idx += pos[i * dim_ + c] * stride_[c];
      ++table_[idx];
    }
    // Prefix sums along every axis turn the histogram into counts of
    // {position_c <= level_c for all c}.
    for (std::size_t c = 0; c < dim_; ++c) {
      const std::size_t s = stride_[c];
      for (std::size_t idx = 0; idx < total; ++idx) {
        if ((idx / s) % side != 0) table_[idx] += table_[idx - s];
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto* p = &pos[i * dim_];
      if (*std::min_element(p, p + dim_) <= k) positions_.insert(positions_.end(), p, p + dim_);
    }
  }
}

std::size_t CellGrid::count(std::span<const std::size_t> levels) const {
  if (!table_.empty()) {
    std::size_t idx = 0;
    for (std::size_t c = 0; c < dim_; ++c) idx += clip(levels[c]) * stride_[c];
    return table_[idx];
  }
  std::size_t hits = 0;
  for (std::size_t r = 0; r < positions_.size(); r += dim_) {
    bool hit = true;
    for (std::size_t c = 0; c < dim_ && hit; ++c) hit = positions_[r + c] <= clip(levels[c]);
    if (hit) ++hits;
  }
  return hits;
}

void CellGrid::cell_constants(std::span<const std::size_t> levels, std::span<double> out) const {
  const double inv_k = 1.0 / static_cast<double>(k_);
  std::size_t buf[24];
  const std::span<std::size_t> v(buf, dim_);
  const std::uint32_t full = (1u << dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    double rest = 0.0;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      if (mask == (1u << j)) continue;  // the theta_j term itself
      for (std::size_t i = 0; i < dim_; ++i) {
        if (mask & (1u << i)) {
          v[i] = levels[i];
        } else {
          v[i] = (i == j) ? k_ : kAll;
        }
      }
      const double term = static_cast<double>(count(v)) * inv_k;
      rest += (std::popcount(mask) % 2 == 1) ? term : -term;
    }
    out[j] = response_pair_[j] - rest;
  }
}

}  // namespace tailmax::detail
