#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tailmax/cli.hpp"
#include "tailmax/csv.hpp"

using namespace tailmax;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string pareto_csv(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::student_t_distribution<double> t2(2.0);
  std::string text = "x1,x2,y\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 1.0 / (1.0 - u(rng));
    const double b = 1.0 / (1.0 - u(rng));
    text += format_exact(a) + "," + format_exact(b) + "," +
            format_exact(std::max(0.6 * a, 0.4 * b) + t2(rng)) + "\n";
  }
  return text;
}

std::string price_panel(std::size_t n, std::uint64_t seed, bool with_bad_price = false) {
  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> t(3.0);
  std::string text = "date,MKT,A,B,C\n";
  double p[4] = {100, 100, 100, 100};
  for (std::size_t i = 0; i < n; ++i) {
    const double m = t(rng);
    text += std::to_string(20000 + i);
    for (int c = 0; c < 4; ++c) {
      if (i > 0) p[c] *= std::exp(-0.01 * (c == 0 ? m : 0.5 * m + 0.8 * t(rng)));
      const bool bad = with_bad_price && i == 5 && c == 2;
      text += "," + (bad ? std::string("0") : format_exact(p[c]));
    }
    text += "\n";
  }
  return text;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == exit_code::kSuccess);
    CHECK(run({}).code == exit_code::kUsage);
    CHECK(run({"frobnicate"}).code == exit_code::kUsage);
    CHECK(run({"fit", "--bogus"}).code == exit_code::kUsage);
  }

  TEST_CASE("fit") {
    const auto dir = oracle::scratch_dir("cli_fit");
    oracle::spit(dir / "in.csv", pareto_csv(2000, 1));
    const auto out = (dir / "fit.csv").string();
    const auto ok = run({"fit", "--input", (dir / "in.csv").string(), "--response", "y",
                         "--covariates", "x1,x2", "--k", "100", "--out", out});
    CHECK(ok.code == exit_code::kSuccess);
    const auto table = read_csv(out);
    CHECK(table.header == std::vector<std::string>{"beta1", "beta2", "theta1", "theta2",
                                                   "gamma_hat", "alpha1", "alpha2",
                                                   "residual_norm"});
    REQUIRE(table.rows.size() == 1);
    CHECK(parse_double(table.rows[0][0], "beta1") > 0.0);

    const auto big_k = run({"fit", "--input", (dir / "in.csv").string(), "--response", "y",
                            "--covariates", "x1,x2", "--k", "2000", "--out", out});
    CHECK(big_k.code == exit_code::kUsage);
    CHECK(big_k.err.find("--k") != std::string::npos);

    const auto missing = run({"fit", "--input", (dir / "in.csv").string(), "--response", "y",
                              "--covariates", "x1,x9", "--k", "50", "--out", out});
    CHECK(missing.code == exit_code::kUsage);
    CHECK(missing.err.find("x9") != std::string::npos);
  }

  TEST_CASE("fit reports the failing stage") {
    const auto dir = oracle::scratch_dir("cli_fit_fail");
    std::string text = "x1,x2,y\n";
    for (int i = 0; i < 100; ++i) {
      text += std::to_string(i + 1) + "," + std::to_string(100 - i) + "," +
              std::to_string(-1 - i) + "\n";
    }
    oracle::spit(dir / "neg.csv", text);
    const auto r = run({"fit", "--input", (dir / "neg.csv").string(), "--response", "y",
                        "--covariates", "x1,x2", "--k", "10", "--out",
                        (dir / "o.csv").string()});
    CHECK(r.code == exit_code::kEstimationFailure);
    CHECK(r.err.find("gamma") != std::string::npos);
  }

  TEST_CASE("simulate") {
    const auto dir = oracle::scratch_dir("cli_sim");
    const auto a = (dir / "a.csv").string();
    const auto ok = run({"--seed", "7", "simulate", "--model", "D3", "--nu", "4", "--n", "400",
                         "--reps", "2", "--k-grid", "20:60:20", "--out", a});
    CHECK(ok.code == exit_code::kSuccess);
    CHECK(oracle::line_count(oracle::slurp(a)) == 1 + 3 * 2 * 3);

    CHECK(run({"simulate", "--model", "M1", "--reps", "0", "--k-grid", "20:40:20", "--out", a})
              .code == exit_code::kUsage);
    CHECK(run({"simulate", "--model", "M7", "--reps", "1", "--k-grid", "20:40:20", "--out", a})
              .code == exit_code::kUsage);
    CHECK(run({"simulate", "--model", "M1", "--reps", "1", "--k-grid", "20-40", "--out", a})
              .code == exit_code::kUsage);
    CHECK(run({"simulate", "--model", "M1", "--n", "100", "--reps", "1", "--k-grid", "20:200:20",
               "--out", a})
              .code == exit_code::kUsage);
  }

  TEST_CASE("simulate is reproducible across thread counts") {
    const auto dir = oracle::scratch_dir("cli_sim_det");
    const auto a = (dir / "a.csv").string();
    const auto b = (dir / "b.csv").string();
    REQUIRE(run({"--seed", "11", "simulate", "--model", "M2", "--n", "500", "--reps", "6",
                 "--k-grid", "20:40:20", "--threads", "1", "--out", a})
                .code == 0);
    REQUIRE(run({"--seed", "11", "simulate", "--model", "M2", "--n", "500", "--reps", "6",
                 "--k-grid", "20:40:20", "--threads", "8", "--out", b})
                .code == 0);
    CHECK(oracle::slurp(a) == oracle::slurp(b));
  }

  TEST_CASE("analyze") {
    const auto dir = oracle::scratch_dir("cli_analyze");
    oracle::spit(dir / "prices.csv", price_panel(1200, 3));
    const auto prefix = (dir / "run").string();
    const auto ok = run({"analyze", "--input", (dir / "prices.csv").string(), "--mode", "returns",
                         "--market", "MKT", "--k", "40", "--kstar", "20", "--out-prefix",
                         prefix});
    CHECK(ok.code == exit_code::kSuccess);
    for (const char* suffix : {"_report.csv", "_hill.csv", "_scatter.csv"}) {
      CHECK(std::filesystem::exists(prefix + suffix));
    }
    CHECK(read_csv(prefix + "_report.csv").rows.size() == 3);

    const auto same_k = run({"analyze", "--input", (dir / "prices.csv").string(), "--mode",
                             "returns", "--k", "40", "--kstar", "40", "--out-prefix", prefix});
    CHECK(same_k.code == exit_code::kUsage);

    oracle::spit(dir / "bad.csv", price_panel(50, 3, true));
    const auto bad = run({"analyze", "--input", (dir / "bad.csv").string(), "--mode", "returns",
                          "--k", "10", "--kstar", "5", "--out-prefix", prefix});
    CHECK(bad.code == exit_code::kUsage);
    CHECK(bad.err.find("'B'") != std::string::npos);
    CHECK(bad.err.find("row 7") != std::string::npos);
  }

  TEST_CASE("hill") {
    const auto dir = oracle::scratch_dir("cli_hill");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::string text = "v,neg\n";
    for (int i = 0; i < 5000; ++i) {
      text += format_exact(std::pow(1.0 - u(rng), -0.5)) + "," + std::to_string(-1 - i) + "\n";
    }
    oracle::spit(dir / "s.csv", text);
    const auto out = (dir / "h.csv").string();
    CHECK(run({"hill", "--input", (dir / "s.csv").string(), "--column", "v", "--k-max", "400",
               "--out", out})
              .code == 0);
    const auto table = read_csv(out);
    REQUIRE(table.rows.size() == 400);
    double mid = 0.0;
    for (std::size_t k = 100; k < 300; ++k) mid += parse_double(table.rows[k][1], "gamma");
    CHECK(std::abs(mid / 200.0 - 0.5) < 0.05);

    CHECK(run({"hill", "--input", (dir / "s.csv").string(), "--column", "v", "--k-max", "1",
               "--out", out})
              .code == 0);
    CHECK(oracle::line_count(oracle::slurp(out)) == 2);

    const auto neg = run({"hill", "--input", (dir / "s.csv").string(), "--column", "neg",
                          "--k-max", "10", "--out", out});
    CHECK(neg.code == exit_code::kEstimationFailure);
    CHECK(std::filesystem::exists(out));
  }

  TEST_CASE("oracle") {
    const auto com = run({"oracle", "--copula", "comonotone", "--theta", "0.6,0.4", "--j", "2"});
    CHECK(com.code == 0);
    CHECK(com.out == "rtilde 0.6\nclosed_form 0.6\n");
    const auto ind =
        run({"oracle", "--copula", "independence", "--theta", "0.4,0.3,0.5", "--j", "1"});
    CHECK(ind.code == 0);
    CHECK(ind.out == "rtilde 0.4\n");
    CHECK(run({"oracle", "--copula", "comonotone", "--theta", "0.6,1.0"}).code ==
          exit_code::kUsage);
    CHECK(run({"oracle", "--copula", "clayton", "--theta", "0.6,0.4"}).code == exit_code::kUsage);
    const auto t = run({"oracle", "--copula", "t", "--theta", "0.6,0.4", "--N", "200000", "--p",
                        "0.001"});
    CHECK(t.code == 0);
    CHECK(t.out.find("closed_form") != std::string::npos);
  }
}
