#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "check_error.hpp"
#include "oracles.hpp"
#include "tailmax/errors.hpp"
#include "tailmax/evt_core.hpp"

using namespace tailmax;

TEST_SUITE("evt_core") {
  TEST_CASE("ranks are ordinal with index tie-break") {
    CHECK(ranks(std::vector<double>{3.0, 1.0, 2.0}) == RankVector{3, 1, 2});
    CHECK(ranks(std::vector<double>{5.0, 5.0, 1.0}) == RankVector{2, 3, 1});
    std::vector<double> sorted(10);
    RankVector identity(10);
    for (std::size_t i = 0; i < 10; ++i) {
      sorted[i] = static_cast<double>(i + 1);
      identity[i] = i + 1;
    }
    CHECK(ranks(sorted) == identity);
  }

  TEST_CASE("ranks form a permutation") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coarse(0, 5);
    std::vector<double> s(200);
    for (auto& v : s) v = coarse(rng);
    auto r = ranks(s);
    std::vector<bool> seen(s.size() + 1, false);
    for (auto v : r) {
      REQUIRE(v >= 1);
      REQUIRE(v <= s.size());
      CHECK_FALSE(seen[v]);
      seen[v] = true;
    }
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = 0; b < s.size(); ++b) {
        if (s[a] < s[b]) REQUIRE(r[a] < r[b]);
      }
    }
  }

  TEST_CASE("order statistics") {
    const std::vector<double> s{3, 1, 2};
    CHECK(order_statistic(s, 2) == 2.0);
    CHECK(order_statistic(s, 3) == 3.0);
    CHECK(order_statistic(std::vector<double>{7, 7, 1}, 2) == 7.0);
    CHECK_CODE(order_statistic(s, 0), ErrorCode::IndexOutOfRange);
    CHECK_CODE(order_statistic(s, 4), ErrorCode::IndexOutOfRange);
  }

  TEST_CASE("hill on a geometric sample") {
    const std::vector<double> s{1, 2, 4, 8, 16};
    CHECK(hill(s, 4) == doctest::Approx(2.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(hill(s, 4) == doctest::Approx(1.732868).epsilon(1e-6));
    CHECK(hill(std::vector<double>{1, 3, 5, 5}, 1) == 0.0);
  }

  TEST_CASE("hill matches a sort-and-sum oracle") {
    std::mt19937_64 rng(11);
    std::exponential_distribution<double> e(1.0);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> s(500);
      for (auto& v : s) v = std::exp(0.7 * e(rng));
      for (std::size_t k : {1, 10, 77, 250, 499}) {
        CHECK(hill(s, k) == doctest::Approx(oracle::hill(s, k)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("hill is scale invariant and rejects a nonpositive threshold") {
    std::vector<double> s{0.5, 1.5, 2.0, 9.0, 30.0, 31.0};
    std::vector<double> scaled = s;
    for (auto& v : scaled) v *= 13.0;
    CHECK(hill(scaled, 3) == doctest::Approx(hill(s, 3)).epsilon(1e-13));
    CHECK_CODE(hill(std::vector<double>{-2, -1, 0, 4, 5}, 2), ErrorCode::NonPositiveThreshold);
    CHECK_CODE(hill(s, 6), ErrorCode::InvalidArgument);
    CHECK_CODE(hill(s, 0), ErrorCode::InvalidArgument);
  }

  TEST_CASE("pooled gamma is the mean of Hill estimates") {
    // Geometric samples with ratio r have Hill estimate at k=1 equal to log r.
    const std::vector<double> a{1, std::exp(0.5)};
    const std::vector<double> b{2, 2 * std::exp(0.5)};
    const std::vector<double> c{5, 5 * std::exp(0.5)};
    std::vector<std::span<const double>> same{a, b, c};
    CHECK(pooled_gamma(same, 1) == doctest::Approx(0.5).epsilon(1e-14));

    const std::vector<double> p{1, std::exp(0.3)};
    const std::vector<double> q{1, std::exp(0.4)};
    const std::vector<double> r{1, std::exp(0.5)};
    std::vector<std::span<const double>> mixed{p, q, r};
    CHECK(pooled_gamma(mixed, 1) == doctest::Approx(0.4).epsilon(1e-14));

    const std::vector<double> bad{-3, -1};
    std::vector<std::span<const double>> with_bad{p, bad};
    try {
      pooled_gamma(with_bad, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveThreshold);
      CHECK(std::string(e.what()).find("series 2") != std::string::npos);
    }
  }

  TEST_CASE("alpha_hat reference values") {
    std::vector<double> x{0.3, 5.0, 1.0, 2.5, 4.0, 0.7, 9.0, 1.9};
    std::vector<double> y2 = x, y1 = x;
    for (auto& v : y2) v *= 2.0;
    for (std::size_t k : {1, 2, 3, 5, 7}) {
      CHECK(alpha_hat(y2, x, k, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(alpha_hat(y1, x, k, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // n = 6, k = 4: ratios 4 on [1/2, 3/4) and 2 on [3/4, 1).
    const std::vector<double> xs{0.1, 0.2, 1.5, 2.0, 5.0, 6.0};
    const std::vector<double> ys{0.1, 0.2, 3.0, 8.0, 9.0, 10.0};
    CHECK(alpha_hat(ys, xs, 4, 0.5) == doctest::Approx(3.0).epsilon(1e-14));
  }

  TEST_CASE("alpha_hat with s0 off the grid integrates partial segments") {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    const std::vector<double> ys{1, 4, 9, 16, 25};
    // k = 4, s0 = 0.6: [0.6, 0.75) at i=2 (ratio 3), [0.75, 1) at i=3 (ratio 2).
    const double expected = (0.15 * 3.0 + 0.25 * 2.0) / 0.4;
    CHECK(alpha_hat(ys, xs, 4, 0.6) == doctest::Approx(expected).epsilon(1e-14));
    CHECK_CODE(alpha_hat(ys, xs, 4, 1.0), ErrorCode::InvalidArgument);
    CHECK_CODE(alpha_hat(ys, std::vector<double>{1, 2, 3}, 2, 0.5), ErrorCode::InvalidArgument);
    CHECK_CODE(alpha_hat(ys, std::vector<double>{0, 0, 0, 0, 1}, 4, 0.5),
               ErrorCode::DivisionByZero);
  }

  TEST_CASE("empirical_R worked example") {
    std::vector<RankVector> r{{1, 2, 3, 4, 5}, {2, 1, 3, 5, 4}, {1, 3, 2, 4, 5}};
    const double args[3] = {1, 1, 1};
    CHECK(empirical_R(args, 2, r) == 1.0);
    CHECK(oracle::empirical_R(args, 2, r) == 1.0);
  }

  TEST_CASE("empirical_R comonotone and marginal cases") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::vector<double> s(300);
    for (auto& v : s) v = z(rng);
    const auto r = ranks(s);
    std::vector<RankVector> same{r, r, r};
    for (std::size_t k : {1, 10, 50, 299}) {
      const double ones[3] = {1, 1, 1};
      CHECK(empirical_R(ones, k, same) == 1.0);
      const double marginal[3] = {1, kInf, kInf};
      std::vector<RankVector> indep{r, ranks(std::vector<double>(s.rbegin(), s.rend())), r};
      CHECK(empirical_R(marginal, k, indep) == 1.0);
    }
  }

  TEST_CASE("empirical_R matches the row-count oracle") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t n = 120;
      std::vector<RankVector> cols;
      for (int c = 0; c < 3; ++c) {
        std::vector<double> s(n);
        for (auto& v : s) v = z(rng);
        cols.push_back(ranks(s));
      }
      const std::size_t k = 1 + rep % 30;
      double args[3] = {u(rng), u(rng), u(rng)};
      if (rep % 3 == 0) args[1] = kInf;
      CHECK(empirical_R(args, k, cols) == oracle::empirical_R(args, k, cols));
    }
  }

  TEST_CASE("empirical_R domain errors") {
    std::vector<RankVector> r{{1, 2, 3}, {3, 2, 1}};
    const double all_inf[2] = {kInf, kInf};
    CHECK_CODE(empirical_R(all_inf, 1, r), ErrorCode::ArgumentOutOfDomain);
    const double negative[2] = {-1.0, 1.0};
    CHECK_CODE(empirical_R(negative, 1, r), ErrorCode::ArgumentOutOfDomain);
    const double one[1] = {1.0};
    CHECK_CODE(empirical_R(one, 1, r), ErrorCode::InvalidArgument);
  }

  TEST_CASE("tail_level agrees with the rank threshold") {
    for (std::size_t n : {5, 37, 1000}) {
      for (std::size_t k : {1, 3, 4}) {
        for (double v : {0.01, 0.1249, 0.125, 0.5, 1.0, 1.3, 2.0}) {
          std::size_t count = 0;
          for (std::size_t r = 1; r <= n; ++r) {
            if (static_cast<double>(r) > static_cast<double>(n) - static_cast<double>(k) * v + 0.5) {
              ++count;
            }
          }
          CHECK(tail_level(n, k, v) == std::min(count, n));
        }
      }
    }
  }

  TEST_CASE("TailSample caches ranks and sorted copies") {
    TailSample s({{3, 1, 2}, {0.5, 0.7, 0.1}}, {10, 30, 20});
    CHECK(s.size() == 3);
    CHECK(s.dimension() == 2);
    CHECK(s.covariate_ranks(0) == RankVector{3, 1, 2});
    CHECK(s.response_ranks() == RankVector{1, 3, 2});
    CHECK(s.sorted_covariate(1)[0] == 0.1);
    CHECK(s.sorted_response()[2] == 30.0);
    CHECK_THROWS_AS(TailSample({{1, 2}}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(TailSample({}, {1, 2, 3}), Error);
  }
}
