#include "tailmax/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "tailmax/csv.hpp"
#include "tailmax/errors.hpp"
#include "tailmax/tdist.hpp"

namespace tailmax {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct ReplicationResult {
  // [k index][coef] estimates; nullopt marks a failed estimator.
  std::vector<std::optional<std::vector<double>>> proposed;
  std::vector<std::optional<std::vector<double>>> cls;
};

ReplicationResult run_replication(const DgpSpec& spec, std::span<const std::size_t> k_grid,
                                  std::uint64_t seed, const StudyOptions& options) {
  Rng rng(seed);
  auto x = generate_covariates(spec, rng);
  auto y = gen_response(spec, x, rng);
  const TailSample sample(std::move(x), std::move(y));

  ReplicationResult out;
  for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
    FitConfig fc = options.fit;
    fc.k = k_grid[ki];
    std::optional<std::vector<double>> proposed;
    try {
      proposed = fit(sample, fc).beta_hat;
    } catch (const Error&) {
    }
    ClsConfig cc = options.cls;
    cc.seed = splitmix64(seed ^ (0xC15ull + k_grid[ki]));
    if (proposed) cc.warm_start = *proposed;
    std::optional<std::vector<double>> cls;
    try {
      cls = cls_fit(sample, fc.k, cc).beta;
    } catch (const Error&) {
    }
    out.proposed.push_back(std::move(proposed));
    out.cls.push_back(std::move(cls));
  }
  return out;
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::M1: return "M1";
    case Model::M2: return "M2";
    case Model::M3: return "M3";
    case Model::D3: return "D3";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  if (name == "M1") return Model::M1;
  if (name == "M2") return Model::M2;
  if (name == "M3") return Model::M3;
  if (name == "D3") return Model::D3;
  fail(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

std::string_view to_string(Estimator e) { return e == Estimator::Proposed ? "proposed" : "cls"; }

DgpSpec DgpSpec::make(Model model, double nu, std::size_t n) {
  DgpSpec spec;
  spec.model = model;
  spec.nu = nu;
  spec.n = n;
  spec.scale_matrix = {{1.0, 0.5}, {0.5, 1.0}};
  spec.beta_true = model == Model::D3 ? std::vector<double>{0.4, 0.3, 0.5}
                                      : std::vector<double>{0.6, 0.4};
  return spec;
}

void DgpSpec::validate() const {
  if (!(nu > 0.0)) fail(ErrorCode::InvalidArgument, "nu must be positive");
  if (n < 2) fail(ErrorCode::InvalidArgument, "n must be at least 2");
  const std::size_t want = model == Model::D3 ? 3 : 2;
  if (beta_true.size() != want) {
    fail(ErrorCode::InvalidArgument, "beta_true must have " + std::to_string(want) + " entries");
  }
  for (double b : beta_true) {
    if (!(b > 0.0)) fail(ErrorCode::InvalidArgument, "beta_true entries must be positive");
  }
  if (!(threshold_quantile > 0.0 && threshold_quantile < 1.0)) {
    fail(ErrorCode::InvalidArgument, "threshold_quantile must lie in (0,1)");
  }
  if (model == Model::M3 && !(std::abs(ar_coefficient) < 1.0)) {
    fail(ErrorCode::InvalidArgument, "AR coefficient must satisfy |phi| < 1");
  }
  if (scale_matrix.size() != 2) fail(ErrorCode::InvalidArgument, "scale matrix must be 2x2");
  MvtSampler check(nu, scale_matrix);  // throws CholeskyFailure
  (void)check;
}

Columns sample_mvt(std::size_t n, double nu, const SquareMatrix& scale, Rng& rng) {
  const MvtSampler sampler(nu, scale);
  const std::size_t d = sampler.dimension();
  Columns out(d, std::vector<double>(n));
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    sampler.draw(rng, row);
    for (std::size_t j = 0; j < d; ++j) out[j][i] = row[j];
  }
  return out;
}

Columns sample_ar1_t(std::size_t n, double phi, double nu, const SquareMatrix& scale,
                     std::size_t burn_in, Rng& rng) {
  if (!(std::abs(phi) < 1.0)) fail(ErrorCode::InvalidArgument, "AR(1) needs |phi| < 1");
  const auto innovations = sample_mvt(burn_in + n, nu, scale, rng);
  const std::size_t d = innovations.size();
  Columns out(d, std::vector<double>(n));
  for (std::size_t j = 0; j < d; ++j) {
    double state = 0.0;
    for (std::size_t t = 0; t < burn_in + n; ++t) {
      state = phi * state + innovations[j][t];
      if (t >= burn_in) out[j][t - burn_in] = state;
    }
  }
  return out;
}

Columns generate_covariates(const DgpSpec& spec, Rng& rng) {
  switch (spec.model) {
    case Model::M1:
    case Model::M2:
      return sample_mvt(spec.n, spec.nu, spec.scale_matrix, rng);
    case Model::M3:
      return sample_ar1_t(spec.n, spec.ar_coefficient, spec.nu, spec.scale_matrix, spec.burn_in,
                          rng);
    case Model::D3: {
      auto x = sample_mvt(spec.n, spec.nu, spec.scale_matrix, rng);
      auto x3 = sample_mvt(spec.n, spec.nu, {{1.0}}, rng);
      x.push_back(std::move(x3.front()));
      return x;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown model");
}

double design_threshold(const DgpSpec& spec) {
  return student_t_quantile(spec.nu, spec.threshold_quantile);
}

std::vector<double> segmented_response(const DgpSpec& spec, const Columns& x,
                                       std::span<const double> noise) {
  const std::size_t d = spec.dimension();
  if (x.size() != d) fail(ErrorCode::InvalidArgument, "covariate count differs from beta_true");
  const std::size_t n = x.front().size();
  if (noise.size() != n) fail(ErrorCode::InvalidArgument, "noise length differs from n");
  const double t = design_threshold(spec);
  const auto& b = spec.beta_true;

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double top = -kInf;
    double fitted = -kInf;
    for (std::size_t j = 0; j < d; ++j) {
      top = std::max(top, x[j][i]);
      fitted = std::max(fitted, b[j] * x[j][i]);
    }
    if (top <= t) {
      fitted = spec.model == Model::D3 ? (b[0] + b[1]) * x[2][i] : b[1] * x[0][i];
    }
    y[i] = fitted + noise[i];
  }
  return y;
}

std::vector<double> gen_response(const DgpSpec& spec, const Columns& x, Rng& rng) {
  const std::size_t n = x.front().size();
  std::student_t_distribution<double> base(spec.nu + 1.0);
  std::vector<double> noise(n);
  for (std::size_t i = 0; i < n; ++i) noise[i] = base(rng);
  if (spec.model == Model::M2) {
    for (std::size_t i = 0; i < n; ++i) {
      noise[i] = std::sqrt(std::abs(x[0][i])) / 3.0 + std::sqrt(std::abs(x[1][i])) * noise[i];
    }
  }
  return segmented_response(spec, x, noise);
}

const MseRow& MseTable::at(std::size_t k, std::size_t coef, Estimator e) const {
  for (const auto& row : rows) {
    if (row.k == k && row.coef == coef && row.estimator == e) return row;
  }
  fail(ErrorCode::InvalidArgument, "no MSE row for k=" + std::to_string(k) +
                                       " coef=" + std::to_string(coef));
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t rep) {
  return splitmix64(splitmix64(master_seed) + static_cast<std::uint64_t>(rep));
}

MseTable run_study(const DgpSpec& spec, std::size_t reps, std::span<const std::size_t> k_grid,
                   std::uint64_t master_seed, const StudyOptions& options) {
  spec.validate();
  if (reps < 1) fail(ErrorCode::InvalidArgument, "reps must be at least 1");
  if (k_grid.empty()) fail(ErrorCode::InvalidArgument, "k grid is empty");
  for (std::size_t k : k_grid) {
    if (k < 1 || k >= spec.n) {
      fail(ErrorCode::InvalidArgument, "k=" + std::to_string(k) + " outside [1, n-1]");
    }
  }

  std::vector<ReplicationResult> results(reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      results[r] = run_replication(spec, k_grid, replication_seed(master_seed, r), options);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, reps);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  MseTable table;
  table.spec = spec;
  table.replications = reps;
  table.master_seed = master_seed;
  const std::size_t d = spec.dimension();
  for (std::size_t coef = 0; coef < d; ++coef) {
    for (Estimator e : {Estimator::Cls, Estimator::Proposed}) {
      for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
        MseRow row{k_grid[ki], coef + 1, e, 0.0, 0, 0};
        double sum = 0.0;
        for (const auto& res : results) {
          const auto& est = e == Estimator::Proposed ? res.proposed[ki] : res.cls[ki];
          if (!est) {
            ++row.excluded;
            continue;
          }
          const double err = (*est)[coef] - spec.beta_true[coef];
          sum += err * err;
          ++row.reps;
        }
        row.mse = row.reps > 0 ? sum / static_cast<double>(row.reps) : kInf;
        table.rows.push_back(row);
      }
    }
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const MseRow& a, const MseRow& b) {
    if (a.coef != b.coef) return a.coef < b.coef;
    if (a.estimator != b.estimator) return to_string(a.estimator) < to_string(b.estimator);
    return a.k < b.k;
  });
  return table;
}

std::string mse_csv_string(const MseTable& table) {
  std::string out = "k,coef,estimator,mse,reps\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.k) + "," + std::to_string(row.coef) + "," +
           std::string(to_string(row.estimator)) + "," + format_exact(row.mse) + "," +
           std::to_string(row.reps) + "\n";
  }
  return out;
}

void emit_mse_csv(const MseTable& table, const std::string& path) {
  write_text_file(path, mse_csv_string(table));
}

std::vector<MseRow> parse_mse_csv(const std::string& path) {
  const auto csv = read_csv(path);
  const auto ck = csv.column("k"), cc = csv.column("coef"), ce = csv.column("estimator"),
             cm = csv.column("mse"), cr = csv.column("reps");
  std::vector<MseRow> rows;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& cells = csv.rows[r];
    const std::string where = path + " row " + std::to_string(r + 2);
    MseRow row;
    row.k = static_cast<std::size_t>(parse_double(cells[ck], where));
    row.coef = static_cast<std::size_t>(parse_double(cells[cc], where));
    if (cells[ce] == "proposed") {
      row.estimator = Estimator::Proposed;
    } else if (cells[ce] == "cls") {
      row.estimator = Estimator::Cls;
    } else {
      fail(ErrorCode::ParseError, where + ": unknown estimator '" + cells[ce] + "'");
    }
    row.mse = cells[cm] == "inf" ? kInf : parse_double(cells[cm], where);
    row.reps = static_cast<std::size_t>(parse_double(cells[cr], where));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tailmax
