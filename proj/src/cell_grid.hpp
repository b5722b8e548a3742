#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tailmax/evt_core.hpp"

namespace tailmax::detail {

// Joint tail counts of the covariates indexed by tail level. A level l in
// 0..k selects the rows among the top l of that column; kAll imposes no
// condition. count(levels) * (1/k) equals empirical_R at any args whose
// tail_level() matches `levels`.
class CellGrid {
 public:
  static constexpr std::size_t kAll = std::numeric_limits<std::size_t>::max();

  CellGrid(const TailSample& sample, std::size_t k, bool dense);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t tail_count() const noexcept { return k_; }
  bool dense() const noexcept { return !table_.empty(); }

  /// At least one level must be finite (<= k).
  std::size_t count(std::span<const std::size_t> levels) const;

  /// R-hat(1 at covariate j, 1 at Y, inf elsewhere).
  double response_pair(std::size_t j) const { return response_pair_[j]; }

  /// For every j, c_j such that g_j(theta) = c_j - theta_j inside the cell.
  void cell_constants(std::span<const std::size_t> levels, std::span<double> out) const;

 private:
  std::size_t clip(std::size_t level) const { return level > k_ ? k_ + 1 : level; }

  std::size_t dim_;
  std::size_t k_;
  std::vector<double> response_pair_;
  std::vector<std::size_t> stride_;
  std::vector<std::uint32_t> table_;      // dense cumulative counts
  std::vector<std::uint32_t> positions_;  // sparse: clipped top positions per kept row
};

}  // namespace tailmax::detail
