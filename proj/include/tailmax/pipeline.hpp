#pragma once

// Application workflow for panels of prices or levels: index construction,
// declustering, the common-tail-index diagnostic, marginal transformation,
// per-entity fitting and the dominance proportion p_C.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailmax/csv.hpp"
#include "tailmax/regression.hpp"

namespace tailmax {

enum class PanelMode { Returns, Levels };

PanelMode parse_panel_mode(std::string_view name);

struct PanelData {
  std::vector<std::string> dates;
  std::vector<std::string> entities;
  std::vector<std::vector<double>> values;  // values[i][j]: date i, entity j

  std::size_t rows() const noexcept { return dates.size(); }
  std::size_t columns() const noexcept { return entities.size(); }
  std::vector<double> column(std::size_t j) const;
  std::size_t column_index(const std::string& name) const;  // UnknownColumn
};

/// Parses a date-first CSV. Returns mode requires strictly positive prices,
/// levels mode nonnegative amounts.
PanelData load_panel_csv(const std::string& path, PanelMode mode);
PanelData parse_panel(const CsvTable& csv, PanelMode mode, const std::string& origin);

/// -log(P_i / P_{i-1}) per column; one row shorter.
PanelData neg_log_returns(const PanelData& prices);

struct SystemIndices {
  std::vector<double> x1;             // market column or cross-sectional mean
  std::vector<double> x2;             // cross-sectional maximum over entities
  std::vector<std::size_t> entities;  // columns treated as entities
};

/// With a market column, x1 is that column and the remaining columns are the
/// entities; otherwise x1 is the cross-sectional mean over all columns.
SystemIndices build_indices(const PanelData& panel,
                            const std::optional<std::string>& market_column = std::nullopt);

/// Keeps indices 0, stride, 2*stride, ...
std::vector<double> decluster(std::span<const double> s, std::size_t stride);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Normal-approximation interval gamma_hat +- z * gamma_hat / sqrt(k) for a
/// given point estimate.
Interval gamma_ci_from_estimate(double gamma_hat, std::size_t k, double confidence);

/// Hill estimate of `s` at k and its confidence interval.
Interval gamma_ci(std::span<const double> s, std::size_t k, double confidence);

/// Y~ = |Y|^(gamma1/gamma_y) sign(Y), rescaled so sd matches Y (n-1 denominator).
std::vector<double> marginal_transform(std::span<const double> y, double gamma1, double gamma_y);

/// Rows exceeding either marginal (n - k_star)-th order statistic, strictly.
std::vector<std::size_t> tail_event_set(std::span<const double> x1, std::span<const double> x2,
                                        std::size_t k_star);

/// Share of rows in C with beta1 x1 > beta2 x2.
double dominance_proportion(std::span<const double> x1, std::span<const double> x2,
                            double beta1, double beta2, std::span<const std::size_t> c);

struct HillPlotRow {
  std::size_t k = 0;
  double gamma_hat = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

/// Hill estimates for k = 1..k_max. Stops at the first k violating the Hill
/// precondition; `complete` reports whether all rows were produced.
struct HillPlot {
  std::vector<HillPlotRow> rows;
  bool complete = true;
  std::string error;
};
HillPlot hill_plot(std::span<const double> s, std::size_t k_max, double confidence);

struct AnalysisConfig {
  PanelMode mode = PanelMode::Returns;
  std::optional<std::string> market_column;
  std::size_t k = 40;
  std::size_t k_star = 20;
  std::size_t decluster_stride = 2;
  // Tail count for the declustered CI; defaults to k.
  std::optional<std::size_t> ci_k;
  double s0 = 0.5;
  double ci_confidence = 0.95;
  std::size_t hill_plot_k_max = 0;  // 0 selects min(4k, n-2)
  std::size_t threads = 1;

  static AnalysisConfig defaults(PanelMode mode);
  void validate() const;
};

struct EntityResult {
  std::string entity;
  double gamma_y = 0.0;
  bool in_gamma_ci = false;
  bool transformed = false;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double p_c = 0.0;
  std::string error;  // empty on success
};

struct AnalysisReport {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  Interval ci;
  std::vector<EntityResult> entities;
  HillPlot hill_plot;  // of X1
};

/// Runs the workflow on a raw panel (prices in returns mode). Per-entity
/// failures are recorded in the entity row; global failures throw.
AnalysisReport analyze(const PanelData& panel, const AnalysisConfig& config);

std::string report_csv(const AnalysisReport& report);
std::string hill_plot_csv(const HillPlot& plot);
std::string scatter_csv(const AnalysisReport& report);

}  // namespace tailmax
