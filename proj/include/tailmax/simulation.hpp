#pragma once

// Data-generating designs for the MSE studies and the replication harness.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailmax/mvt.hpp"
#include "tailmax/regression.hpp"

namespace tailmax {

// Column-major data: one vector per variable.
using Columns = std::vector<std::vector<double>>;

enum class Model { M1, M2, M3, D3 };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);

struct DgpSpec {
  Model model = Model::M1;
  double nu = 4.0;
  std::size_t n = 1000;
  std::vector<double> beta_true;
  SquareMatrix scale_matrix;
  double ar_coefficient = 0.5;
  double threshold_quantile = 0.98;
  std::size_t burn_in = 1000;

  /// Design defaults: beta (0.6, 0.4) for d = 2 models, (0.4, 0.3, 0.5) for
  /// D3; scale matrix [[1, .5], [.5, 1]] for the correlated pair.
  static DgpSpec make(Model model, double nu, std::size_t n);

  std::size_t dimension() const noexcept { return beta_true.size(); }
  void validate() const;
};

/// n i.i.d. rows of Z / sqrt(W / nu), returned as d columns.
Columns sample_mvt(std::size_t n, double nu, const SquareMatrix& scale, Rng& rng);

/// Coupled AR(1) series X_i = phi X_{i-1} + e_i with multivariate t
/// innovations, started at zero; the first burn_in steps are discarded.
Columns sample_ar1_t(std::size_t n, double phi, double nu, const SquareMatrix& scale,
                     std::size_t burn_in, Rng& rng);

/// Covariates for the design (D3 appends an independent t_nu column).
Columns generate_covariates(const DgpSpec& spec, Rng& rng);

/// t_{nu, q}, the design's exceedance threshold.
double design_threshold(const DgpSpec& spec);

/// Segmented response with a supplied noise vector: max_j beta_j X_j + eps
/// above the threshold, the design's filler branch below it.
std::vector<double> segmented_response(const DgpSpec& spec, const Columns& x,
                                       std::span<const double> noise);

/// Draws the design's noise and applies segmented_response.
std::vector<double> gen_response(const DgpSpec& spec, const Columns& x, Rng& rng);

enum class Estimator { Proposed, Cls };
std::string_view to_string(Estimator e);

struct MseRow {
  std::size_t k = 0;
  std::size_t coef = 0;  // 1-based coefficient index
  Estimator estimator = Estimator::Proposed;
  double mse = 0.0;
  std::size_t reps = 0;      // replications that contributed
  std::size_t excluded = 0;  // replications whose estimator failed
};

struct MseTable {
  DgpSpec spec;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  std::vector<MseRow> rows;  // sorted by (coef, estimator, k)

  const MseRow& at(std::size_t k, std::size_t coef, Estimator e) const;
};

struct StudyOptions {
  std::size_t threads = 1;
  FitConfig fit;  // k is overwritten per grid point
  ClsConfig cls;
};

/// Child seed of replication `rep`; replication r is reproducible alone.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t rep);

/// Replication study. Output is independent of options.threads.
MseTable run_study(const DgpSpec& spec, std::size_t reps, std::span<const std::size_t> k_grid,
                   std::uint64_t master_seed, const StudyOptions& options = {});

/// CSV with header k,coef,estimator,mse,reps.
void emit_mse_csv(const MseTable& table, const std::string& path);
std::string mse_csv_string(const MseTable& table);

/// Rows of an emitted MSE CSV.
std::vector<MseRow> parse_mse_csv(const std::string& path);

}  // namespace tailmax
