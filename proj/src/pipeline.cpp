#include "tailmax/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "tailmax/errors.hpp"
#include "tailmax/evt_core.hpp"
#include "tailmax/tdist.hpp"

namespace tailmax {

namespace {

double sample_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

PanelMode parse_panel_mode(std::string_view name) {
  if (name == "returns") return PanelMode::Returns;
  if (name == "levels") return PanelMode::Levels;
  fail(ErrorCode::InvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::vector<double> PanelData::column(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = values[i][j];
  return out;
}

std::size_t PanelData::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < entities.size(); ++j) {
    if (entities[j] == name) return j;
  }
  fail(ErrorCode::UnknownColumn, "column '" + name + "' not found");
}

PanelData parse_panel(const CsvTable& csv, PanelMode mode, const std::string& origin) {
  if (csv.header.size() < 2) {
    fail(ErrorCode::ParseError, origin + ": need a date column and at least one value column");
  }
  if (csv.rows.empty()) fail(ErrorCode::EmptyPanel, origin + ": no data rows");
  PanelData panel;
  panel.entities.assign(csv.header.begin() + 1, csv.header.end());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& cells = csv.rows[r];
    panel.dates.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string where = origin + " row " + std::to_string(r + 2) + " column '" +
                                csv.header[c] + "'";
      const double v = parse_double(cells[c], where);
      if (mode == PanelMode::Returns && !(v > 0.0)) {
        fail(ErrorCode::NonPositivePrice, where + ": price " + cells[c] + " is not positive");
      }
      if (mode == PanelMode::Levels && v < 0.0) {
        fail(ErrorCode::ParseError, where + ": negative amount " + cells[c]);
      }
      row.push_back(v);
    }
    panel.values.push_back(std::move(row));
  }
  return panel;
}

PanelData load_panel_csv(const std::string& path, PanelMode mode) {
  return parse_panel(read_csv(path), mode, path);
}

PanelData neg_log_returns(const PanelData& prices) {
  if (prices.rows() < 2) fail(ErrorCode::EmptyPanel, "returns need at least two price rows");
  PanelData out;
  out.entities = prices.entities;
  for (std::size_t i = 1; i < prices.rows(); ++i) {
    out.dates.push_back(prices.dates[i]);
    std::vector<double> row(prices.columns());
    for (std::size_t j = 0; j < prices.columns(); ++j) {
      const double prev = prices.values[i - 1][j];
      const double cur = prices.values[i][j];
      if (!(prev > 0.0) || !(cur > 0.0)) {
        fail(ErrorCode::NonPositivePrice, "nonpositive price in column '" + prices.entities[j] +
                                              "' at " + prices.dates[i]);
      }
      row[j] = -std::log(cur / prev);
    }
    out.values.push_back(std::move(row));
  }
  return out;
}

SystemIndices build_indices(const PanelData& panel, const std::optional<std::string>& market_column) {
  if (panel.rows() == 0 || panel.columns() == 0) fail(ErrorCode::EmptyPanel, "panel is empty");
  SystemIndices out;
  std::optional<std::size_t> market;
  if (market_column) market = panel.column_index(*market_column);
  for (std::size_t j = 0; j < panel.columns(); ++j) {
    if (!market || j != *market) out.entities.push_back(j);
  }
  if (out.entities.empty()) fail(ErrorCode::EmptyPanel, "no entity columns besides the market");

  for (const auto& row : panel.values) {
    double mx = -kInf;
    double sum = 0.0;
    for (std::size_t j : out.entities) {
      mx = std::max(mx, row[j]);
      sum += row[j];
    }
    out.x2.push_back(mx);
    out.x1.push_back(market ? row[*market] : sum / static_cast<double>(out.entities.size()));
  }
  return out;
}

std::vector<double> decluster(std::span<const double> s, std::size_t stride) {
  if (stride < 1) fail(ErrorCode::InvalidArgument, "decluster stride must be >= 1");
  std::vector<double> out;
  out.reserve((s.size() + stride - 1) / stride);
  for (std::size_t i = 0; i < s.size(); i += stride) out.push_back(s[i]);
  return out;
}

Interval gamma_ci_from_estimate(double gamma_hat, std::size_t k, double confidence) {
  if (!(confidence >= 0.0 && confidence < 1.0)) {
    fail(ErrorCode::InvalidArgument, "confidence must lie in [0, 1)");
  }
  if (k < 1) fail(ErrorCode::InvalidArgument, "k must be positive");
  const double z = confidence == 0.0 ? 0.0 : normal_quantile(0.5 * (1.0 + confidence));
  const double half = z * gamma_hat / std::sqrt(static_cast<double>(k));
  return {gamma_hat - half, gamma_hat + half};
}

Interval gamma_ci(std::span<const double> s, std::size_t k, double confidence) {
  return gamma_ci_from_estimate(hill(s, k), k, confidence);
}

std::vector<double> marginal_transform(std::span<const double> y, double gamma1, double gamma_y) {
  if (!(gamma1 > 0.0 && gamma_y > 0.0)) {
    fail(ErrorCode::InvalidArgument, "marginal_transform: tail indices must be positive");
  }
  if (y.size() < 2) fail(ErrorCode::InvalidArgument, "marginal_transform needs n >= 2");
  const double power = gamma1 / gamma_y;
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double mag = std::pow(std::abs(y[i]), power);
    out[i] = y[i] > 0.0 ? mag : (y[i] < 0.0 ? -mag : 0.0);
  }
  const double sd_t = sample_sd(out);
  if (!(sd_t > 0.0)) fail(ErrorCode::DegenerateSeries, "transformed series has zero spread");
  const double scale = sample_sd(y) / sd_t;
  for (double& v : out) v *= scale;
  return out;
}

std::vector<std::size_t> tail_event_set(std::span<const double> x1, std::span<const double> x2,
                                        std::size_t k_star) {
  const std::size_t n = x1.size();
  if (x2.size() != n) fail(ErrorCode::InvalidArgument, "tail_event_set: length mismatch");
  if (k_star < 1 || k_star >= n) fail(ErrorCode::InvalidArgument, "k_star must satisfy 1 <= k* < n");
  const double t1 = order_statistic(x1, n - k_star);
  const double t2 = order_statistic(x2, n - k_star);
  std::vector<std::size_t> c;
  for (std::size_t i = 0; i < n; ++i) {
    if (x1[i] > t1 || x2[i] > t2) c.push_back(i);
  }
  return c;
}

double dominance_proportion(std::span<const double> x1, std::span<const double> x2,
                            double beta1, double beta2, std::span<const std::size_t> c) {
  if (c.empty()) fail(ErrorCode::EmptySet, "dominance proportion over an empty set");
  std::size_t hits = 0;
  for (std::size_t i : c) {
    if (beta1 * x1[i] > beta2 * x2[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(c.size());
}

HillPlot hill_plot(std::span<const double> s, std::size_t k_max, double confidence) {
  if (k_max < 1 || k_max >= s.size()) {
    fail(ErrorCode::InvalidArgument, "k-max must satisfy 1 <= k-max < n");
  }
  std::vector<double> sorted(s.begin(), s.end());
  std::sort(sorted.begin(), sorted.end());
  HillPlot plot;
  for (std::size_t k = 1; k <= k_max; ++k) {
    try {
      const double g = hill_sorted(sorted, k);
      const auto ci = gamma_ci_from_estimate(g, k, confidence);
      plot.rows.push_back({k, g, ci.lower, ci.upper});
    } catch (const Error& e) {
      plot.complete = false;
      plot.error = e.what();
      break;
    }
  }
  return plot;
}

AnalysisConfig AnalysisConfig::defaults(PanelMode mode) {
  AnalysisConfig c;
  c.mode = mode;
  if (mode == PanelMode::Levels) {
    c.k = 60;
    c.decluster_stride = 1;
  }
  return c;
}

void AnalysisConfig::validate() const {
  if (k < 1) fail(ErrorCode::InvalidArgument, "k must be positive");
  if (k_star < 1 || k_star >= k) {
    fail(ErrorCode::InvalidArgument, "kstar must satisfy 1 <= kstar < k (got kstar=" +
                                         std::to_string(k_star) + ", k=" + std::to_string(k) + ")");
  }
  if (decluster_stride < 1) fail(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (!(s0 > 0.0 && s0 < 1.0)) fail(ErrorCode::InvalidArgument, "s0 must lie in (0,1)");
  if (!(ci_confidence > 0.0 && ci_confidence < 1.0)) {
    fail(ErrorCode::InvalidArgument, "confidence must lie in (0,1)");
  }
}

AnalysisReport analyze(const PanelData& panel, const AnalysisConfig& config) {
  config.validate();
  const PanelData data = config.mode == PanelMode::Returns ? neg_log_returns(panel) : panel;
  const auto idx = build_indices(data, config.market_column);
  const std::size_t n = idx.x1.size();
  if (config.k >= n) {
    fail(ErrorCode::InvalidArgument,
         "k=" + std::to_string(config.k) + " must be below the series length " + std::to_string(n));
  }

  AnalysisReport report;
  const auto declustered = decluster(idx.x1, config.decluster_stride);
  report.ci = gamma_ci(declustered, config.ci_k.value_or(config.k), config.ci_confidence);
  report.gamma1 = hill(idx.x1, config.k);
  report.gamma2 = hill(idx.x2, config.k);
  const auto c = tail_event_set(idx.x1, idx.x2, config.k_star);

  FitConfig fc;
  fc.k = config.k;
  fc.s0 = config.s0;

  report.entities.resize(idx.entities.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t e = next++; e < idx.entities.size(); e = next++) {
      EntityResult& row = report.entities[e];
      const std::size_t col = idx.entities[e];
      row.entity = data.entities[col];
      try {
        auto y = data.column(col);
        row.gamma_y = hill(y, config.k);
        row.in_gamma_ci = row.gamma_y >= report.ci.lower && row.gamma_y <= report.ci.upper;
        if (!row.in_gamma_ci) {
          y = marginal_transform(y, report.gamma1, row.gamma_y);
          row.transformed = true;
        }
        const TailSample sample({idx.x1, idx.x2}, std::move(y));
        const auto f = fit(sample, fc);
        row.beta1 = f.beta_hat[0];
        row.beta2 = f.beta_hat[1];
        row.p_c = dominance_proportion(idx.x1, idx.x2, row.beta1, row.beta2, c);
      } catch (const Error& err) {
        row.error = err.what();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(idx.entities.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  const std::size_t k_max =
      config.hill_plot_k_max > 0 ? config.hill_plot_k_max : std::min(4 * config.k, n - 2);
  report.hill_plot = hill_plot(idx.x1, std::min(k_max, n - 1), config.ci_confidence);
  return report;
}

std::string report_csv(const AnalysisReport& report) {
  std::string out = "entity,gamma_y,in_ci,transformed,beta1,beta2,p_C,error\n";
  for (const auto& e : report.entities) {
    const bool ok = e.error.empty();
    out += csv_safe(e.entity) + ",";
    out += (ok || e.gamma_y != 0.0 ? format_sig6(e.gamma_y) : std::string()) + ",";
    out += std::string(e.in_gamma_ci ? "true" : "false") + ",";
    out += std::string(e.transformed ? "true" : "false") + ",";
    out += (ok ? format_sig6(e.beta1) : std::string()) + ",";
    out += (ok ? format_sig6(e.beta2) : std::string()) + ",";
    out += (ok ? format_sig6(e.p_c) : std::string()) + ",";
    out += csv_safe(e.error) + "\n";
  }
  return out;
}

std::string hill_plot_csv(const HillPlot& plot) {
  std::string out = "k,gamma_hat,ci_lower,ci_upper\n";
  for (const auto& r : plot.rows) {
    out += std::to_string(r.k) + "," + format_sig6(r.gamma_hat) + "," + format_sig6(r.ci_lower) +
           "," + format_sig6(r.ci_upper) + "\n";
  }
  return out;
}

std::string scatter_csv(const AnalysisReport& report) {
  std::string out = "entity,beta1,beta2,p_C\n";
  for (const auto& e : report.entities) {
    if (!e.error.empty()) continue;
    out += csv_safe(e.entity) + "," + format_sig6(e.beta1) + "," + format_sig6(e.beta2) + "," +
           format_sig6(e.p_c) + "\n";
  }
  return out;
}

}  // namespace tailmax
