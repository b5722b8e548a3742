#include "tailmax/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <memory>
#include <ostream>

#include "tailmax/csv.hpp"
#include "tailmax/errors.hpp"
#include "tailmax/pipeline.hpp"
#include "tailmax/regression.hpp"
#include "tailmax/simulation.hpp"
#include "tailmax/taildep.hpp"

namespace tailmax {

namespace {

// Thrown for flag validation failures; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t default_threads() {
  if (const char* env = std::getenv("TAILMAX_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::vector<std::size_t> parse_k_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--k-grid must have the form a:b:step");
  std::size_t v[3];
  for (int i = 0; i < 3; ++i) {
    try {
      std::size_t used = 0;
      const long long x = std::stoll(parts[i], &used);
      if (used != parts[i].size() || x < 1) throw std::invalid_argument("bad");
      v[i] = static_cast<std::size_t>(x);
    } catch (const std::exception&) {
      throw UsageError("--k-grid entries must be positive integers: '" + text + "'");
    }
  }
  if (v[0] > v[1]) throw UsageError("--k-grid start exceeds end");
  std::vector<std::size_t> grid;
  for (std::size_t k = v[0]; k <= v[1]; k += v[2]) grid.push_back(k);
  return grid;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& cell : split(text)) {
    try {
      out.push_back(parse_double(cell, flag));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

std::vector<double> numeric_column(const CsvTable& csv, std::size_t col, const std::string& origin) {
  std::vector<double> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    out.push_back(parse_double(csv.rows[r][col], origin + " row " + std::to_string(r + 2) +
                                                     " column '" + csv.header[col] + "'"));
  }
  return out;
}

std::size_t find_column(const CsvTable& csv, const std::string& name, const std::string& flag) {
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (csv.header[c] == name) return c;
  }
  throw UsageError(flag + ": column '" + name + "' not found in input");
}

struct FitArgs {
  std::string input, response, covariates, out;
  std::size_t k = 0;
  double s0 = 0.5;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  CsvTable csv;
  std::vector<std::vector<double>> xs;
  std::vector<double> y;
  try {
    csv = read_csv(a.input);
    const auto ycol = find_column(csv, a.response, "--response");
    for (const auto& name : split(a.covariates)) {
      xs.push_back(numeric_column(csv, find_column(csv, name, "--covariates"), a.input));
    }
    if (xs.empty()) throw UsageError("--covariates: at least one column required");
    y = numeric_column(csv, ycol, a.input);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const std::size_t n = y.size();
  if (a.k < 1 || a.k >= n) {
    throw UsageError(fmt::format("--k must satisfy 1 <= k < n (k={}, n={})", a.k, n));
  }
  if (!(a.s0 > 0.0 && a.s0 < 1.0)) throw UsageError("--s0 must lie in (0,1)");

  BetaFit f = [&] {
    try {
      const TailSample sample(std::move(xs), std::move(y));
      FitConfig cfg;
      cfg.k = a.k;
      cfg.s0 = a.s0;
      return fit(sample, cfg);
    } catch (const Error& e) {
      err << "estimation failed: " << e.what() << "\n";
      throw;
    }
  }();

  const std::size_t d = f.beta_hat.size();
  std::string header, row;
  auto add = [&](const std::string& name, double v) {
    header += (header.empty() ? "" : ",") + name;
    row += (row.empty() ? "" : ",") + format_exact(v);
  };
  for (std::size_t j = 0; j < d; ++j) add(fmt::format("beta{}", j + 1), f.beta_hat[j]);
  for (std::size_t j = 0; j < d; ++j) add(fmt::format("theta{}", j + 1), f.theta_hat[j]);
  add("gamma_hat", f.gamma_hat);
  for (std::size_t j = 0; j < d; ++j) add(fmt::format("alpha{}", j + 1), f.alpha_hat[j]);
  add("residual_norm", f.residual_norm);
  write_text_file(a.out, header + "\n" + row + "\n");
  out << "wrote " << a.out << "\n";
  return exit_code::kSuccess;
}

struct SimulateArgs {
  std::string model, k_grid, out;
  double nu = 4.0;
  std::size_t n = 1000, reps = 0, burn_in = 1000, threads = 1;
};

int cmd_simulate(const SimulateArgs& a, std::uint64_t seed, std::ostream& out) {
  DgpSpec spec;
  std::vector<std::size_t> grid;
  try {
    spec = DgpSpec::make(parse_model(a.model), a.nu, a.n);
    spec.burn_in = a.burn_in;
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (a.reps < 1) throw UsageError("--reps must be at least 1");
  grid = parse_k_grid(a.k_grid);
  for (std::size_t k : grid) {
    if (k >= a.n) throw UsageError(fmt::format("--k-grid value {} must be below --n {}", k, a.n));
  }
  StudyOptions options;
  options.threads = a.threads;
  const auto table = run_study(spec, a.reps, grid, seed, options);
  emit_mse_csv(table, a.out);
  out << "wrote " << a.out << " (" << table.rows.size() << " rows)\n";
  for (const auto& row : table.rows) {
    if (row.excluded > 0) {
      out << fmt::format("excluded k={} coef={} estimator={}: {} of {} replications failed\n",
                         row.k, row.coef, to_string(row.estimator), row.excluded, a.reps);
    }
  }
  return exit_code::kSuccess;
}

struct AnalyzeArgs {
  std::string input, mode, market, out_prefix;
  std::size_t k = 0, kstar = 0, stride = 0, ci_k = 0, threads = 1;
  double confidence = 0.95;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  AnalysisConfig cfg;
  PanelData panel;
  try {
    const PanelMode mode = parse_panel_mode(a.mode);
    cfg = AnalysisConfig::defaults(mode);
    if (!a.market.empty()) cfg.market_column = a.market;
    cfg.k = a.k;
    cfg.k_star = a.kstar;
    if (a.stride > 0) cfg.decluster_stride = a.stride;
    if (a.ci_k > 0) cfg.ci_k = a.ci_k;
    cfg.ci_confidence = a.confidence;
    cfg.threads = a.threads;
    if (cfg.k_star >= cfg.k) {
      throw UsageError(fmt::format("--kstar must be smaller than --k (kstar={}, k={})", a.kstar, a.k));
    }
    cfg.validate();
    panel = load_panel_csv(a.input, mode);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  AnalysisReport report;
  try {
    report = analyze(panel, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::UnknownColumn ||
        e.code() == ErrorCode::EmptyPanel || e.code() == ErrorCode::NonPositivePrice) {
      throw UsageError(e.what());
    }
    throw;
  }
  const std::string report_path = a.out_prefix + "_report.csv";
  const std::string hill_path = a.out_prefix + "_hill.csv";
  const std::string scatter_path = a.out_prefix + "_scatter.csv";
  write_text_file(report_path, report_csv(report));
  write_text_file(hill_path, hill_plot_csv(report.hill_plot));
  write_text_file(scatter_path, scatter_csv(report));
  out << fmt::format("gamma1={:.6g} gamma2={:.6g} ci=({:.6g}, {:.6g})\n", report.gamma1,
                     report.gamma2, report.ci.lower, report.ci.upper);
  out << "wrote " << report_path << ", " << hill_path << ", " << scatter_path << "\n";
  return exit_code::kSuccess;
}

struct HillArgs {
  std::string input, column, out;
  std::size_t k_max = 0;
  double confidence = 0.95;
};

int cmd_hill(const HillArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> s;
  try {
    const auto csv = read_csv(a.input);
    s = numeric_column(csv, find_column(csv, a.column, "--column"), a.input);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (a.k_max < 1 || a.k_max >= s.size()) {
    throw UsageError(fmt::format("--k-max must satisfy 1 <= k-max < n (n={})", s.size()));
  }
  if (!(a.confidence > 0.0 && a.confidence < 1.0)) throw UsageError("--confidence must lie in (0,1)");
  const auto plot = hill_plot(s, a.k_max, a.confidence);
  write_text_file(a.out, hill_plot_csv(plot));
  if (!plot.complete) {
    err << "warning: Hill estimate stopped after k=" << plot.rows.size() << ": " << plot.error
        << "\n";
    return exit_code::kEstimationFailure;
  }
  out << "wrote " << a.out << "\n";
  return exit_code::kSuccess;
}

struct OracleArgs {
  std::string copula, theta;
  double nu = 4.0, rho = 0.5, p = 1e-4;
  std::size_t draws = 1'000'000;
  std::size_t j = 1;
};

int cmd_oracle(const OracleArgs& a, std::uint64_t seed, std::ostream& out) {
  const auto values = parse_list(a.theta, "--theta");
  std::unique_ptr<ThetaVector> theta;
  try {
    theta = std::make_unique<ThetaVector>(values);
  } catch (const Error& e) {
    throw UsageError(std::string("--theta: ") + e.what());
  }
  const std::size_t d = theta->size();
  if (d < 2) throw UsageError("--theta needs at least two components");
  if (a.j < 1 || a.j > d) throw UsageError(fmt::format("--j must lie in [1, {}]", d));

  std::unique_ptr<TailCopula> rx;
  if (a.copula == "comonotone") {
    rx = std::make_unique<ComonotoneTailCopula>(d);
  } else if (a.copula == "independence") {
    rx = std::make_unique<IndependenceTailCopula>(d);
  } else if (a.copula == "t") {
    MonteCarloTOptions o;
    o.nu = a.nu;
    o.scale = equicorrelation(d, a.rho);
    o.tail_level = a.p;
    o.draws = a.draws;
    o.seed = seed;
    o.max_arg = 1.0;
    try {
      rx = std::make_unique<MonteCarloTCopula>(o);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  } else {
    throw UsageError("--copula must be comonotone, independence or t");
  }

  const std::size_t j = a.j - 1;
  out << fmt::format("rtilde {:.12g}\n", rtilde(j, *theta, *rx));
  if (d == 2) {
    const std::size_t other = 1 - j;
    double mixed[2];
    mixed[j] = 1.0;
    mixed[other] = (*theta)[other];
    const double both[2] = {(*theta)[0], (*theta)[1]};
    out << fmt::format("closed_form {:.12g}\n", (*theta)[j] + (*rx)(mixed) - (*rx)(both));
  }
  return exit_code::kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Max-linear tail regression toolkit", "tailmax"};
  app.require_subcommand(1, 1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Master random seed")->capture_default_str();

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate beta from a CSV sample");
  fit_cmd->add_option("--input", fa.input, "Input CSV")->required();
  fit_cmd->add_option("--response", fa.response, "Response column")->required();
  fit_cmd->add_option("--covariates", fa.covariates, "Comma-separated covariate columns")->required();
  fit_cmd->add_option("--k", fa.k, "Tail count")->required();
  fit_cmd->add_option("--s0", fa.s0, "Lower integration limit for alpha")->capture_default_str();
  fit_cmd->add_option("--out", fa.out, "Output CSV")->required();

  SimulateArgs sa;
  sa.threads = default_threads();
  auto* sim_cmd = app.add_subcommand("simulate", "Run the MSE replication study");
  sim_cmd->add_option("--model", sa.model, "M1, M2, M3 or D3")->required();
  sim_cmd->add_option("--nu", sa.nu, "Degrees of freedom")->capture_default_str();
  sim_cmd->add_option("--n", sa.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--reps", sa.reps, "Replications")->required();
  sim_cmd->add_option("--k-grid", sa.k_grid, "Tail counts a:b:step")->required();
  sim_cmd->add_option("--burn-in", sa.burn_in, "AR burn-in (M3)")->capture_default_str();
  sim_cmd->add_option("--threads", sa.threads, "Worker threads (default $TAILMAX_THREADS or 1)");
  sim_cmd->add_option("--out", sa.out, "Output CSV")->required();

  AnalyzeArgs aa;
  aa.threads = default_threads();
  auto* an_cmd = app.add_subcommand("analyze", "Panel application workflow");
  an_cmd->add_option("--input", aa.input, "Panel CSV")->required();
  an_cmd->add_option("--mode", aa.mode, "returns or levels")->required();
  an_cmd->add_option("--market", aa.market, "Market index column (returns mode)");
  an_cmd->add_option("--k", aa.k, "Tail count")->required();
  an_cmd->add_option("--kstar", aa.kstar, "Tail count for the stress-event set")->required();
  an_cmd->add_option("--stride", aa.stride, "Declustering stride (default 2 returns, 1 levels)");
  an_cmd->add_option("--ci-k", aa.ci_k, "Tail count for the declustered CI (default --k)");
  an_cmd->add_option("--confidence", aa.confidence, "CI confidence")->capture_default_str();
  an_cmd->add_option("--threads", aa.threads, "Worker threads");
  an_cmd->add_option("--out-prefix", aa.out_prefix, "Prefix for output CSVs")->required();

  HillArgs ha;
  auto* hill_cmd = app.add_subcommand("hill", "Hill plot data for one column");
  hill_cmd->add_option("--input", ha.input, "Input CSV")->required();
  hill_cmd->add_option("--column", ha.column, "Column name")->required();
  hill_cmd->add_option("--k-max", ha.k_max, "Largest k")->required();
  hill_cmd->add_option("--confidence", ha.confidence, "CI confidence")->capture_default_str();
  hill_cmd->add_option("--out", ha.out, "Output CSV")->required();

  OracleArgs oa;
  auto* or_cmd = app.add_subcommand("oracle", "Evaluate the inclusion-exclusion tail function");
  or_cmd->add_option("--copula", oa.copula, "comonotone, independence or t")->required();
  or_cmd->add_option("--nu", oa.nu, "t degrees of freedom")->capture_default_str();
  or_cmd->add_option("--rho", oa.rho, "t equicorrelation")->capture_default_str();
  or_cmd->add_option("--p", oa.p, "Monte-Carlo tail level")->capture_default_str();
  or_cmd->add_option("--N", oa.draws, "Monte-Carlo draws")->capture_default_str();
  or_cmd->add_option("--theta", oa.theta, "Comma-separated theta")->required();
  or_cmd->add_option("--j", oa.j, "Coordinate (1-based)")->capture_default_str();

  for (auto* sub : {fit_cmd, sim_cmd, an_cmd, hill_cmd, or_cmd}) sub->fallthrough();

  std::vector<std::string> argv_store{"tailmax"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::kUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fa, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(sa, seed, out);
    if (an_cmd->parsed()) return cmd_analyze(aa, out);
    if (hill_cmd->parsed()) return cmd_hill(ha, out, err);
    if (or_cmd->parsed()) return cmd_oracle(oa, seed, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kEstimationFailure;
  }
  return exit_code::kUsage;
}

}  // namespace tailmax
