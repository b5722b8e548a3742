#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "check_error.hpp"
#include "oracles.hpp"
#include "tailmax/taildep.hpp"

using namespace tailmax;

namespace {

MonteCarloTCopula small_t_copula(std::size_t d, double rho, std::uint64_t seed = 9) {
  MonteCarloTOptions o;
  o.nu = 4.0;
  o.scale = equicorrelation(d, rho);
  o.tail_level = 1e-3;
  o.draws = 400'000;
  o.seed = seed;
  o.max_arg = 1.0;
  return MonteCarloTCopula(o);
}

}  // namespace

TEST_SUITE("taildep") {
  TEST_CASE("comonotone and independence reference values") {
    CHECK(comonotone_R(std::vector<double>{0.6, 0.4}) == 0.4);
    CHECK(comonotone_R(std::vector<double>{1, kInf}) == 1.0);
    CHECK(comonotone_R(std::vector<double>{0.3, 0.3, 0.3}) == 0.3);
    CHECK(independence_R(std::vector<double>{1, 1}) == 0.0);
    CHECK(independence_R(std::vector<double>{0.7, kInf}) == 0.7);
    CHECK(independence_R(std::vector<double>{0.5, 0.5, kInf}) == 0.0);
  }

  TEST_CASE("tail copula argument validation") {
    ComonotoneTailCopula c(2);
    CHECK_CODE(c(std::vector<double>{kInf, kInf}), ErrorCode::DomainError);
    CHECK_CODE(c(std::vector<double>{0.0, 1.0}), ErrorCode::ArgumentOutOfDomain);
    CHECK_CODE(c(std::vector<double>{1.0}), ErrorCode::InvalidArgument);
  }

  TEST_CASE("tail copulas are bounded by the comonotone copula") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    IndependenceTailCopula ind(2);
    ComonotoneTailCopula com(2);
    auto mc = small_t_copula(2, 0.5);
    for (int i = 0; i < 200; ++i) {
      const double a[2] = {u(rng), u(rng)};
      const double hi = com(a);
      for (const TailCopula* rx : std::initializer_list<const TailCopula*>{&ind, &com, &mc}) {
        const double v = (*rx)(a);
        CHECK(v >= 0.0);
        CHECK(v <= hi + 1e-12);
      }
    }
  }

  TEST_CASE("Monte-Carlo t copula") {
    auto mc = small_t_copula(2, 0.5);
    const double marg[2] = {1.0, kInf};
    CHECK(mc(marg) == 1.0);
    CHECK(mc.raw(marg) == doctest::Approx(1.0).epsilon(4.0 * mc.standard_error(1.0)));
    const double ones[2] = {1.0, 1.0};
    const double v = mc(ones);
    CHECK(v > 0.0);
    CHECK(v < 1.0);

    // Near-comonotone limit.
    auto tight = small_t_copula(2, 0.999);
    CHECK(tight(ones) > 0.9);

    // The streaming estimator agrees with the stored one within MC error.
    const double stream = mc_t_copula_R(ones, 4.0, equicorrelation(2, 0.5), 1e-3, 400'000, 77);
    CHECK(std::abs(stream - v) < 5.0 * mc.standard_error(v) + 0.02);
    const double stream_marg =
        mc_t_copula_R(marg, 4.0, equicorrelation(2, 0.5), 1e-3, 400'000, 77);
    CHECK(stream_marg == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("Monte-Carlo t copula is deterministic per seed") {
    auto a = small_t_copula(2, 0.3, 5);
    auto b = small_t_copula(2, 0.3, 5);
    const double args[2] = {0.7, 0.4};
    CHECK(a(args) == b(args));
    CHECK(a.retained_rows() == b.retained_rows());
  }

  TEST_CASE("ThetaVector and ModelParams domain checks") {
    CHECK_CODE(ThetaVector({0.5, 1.0}), ErrorCode::DomainError);
    CHECK_CODE(ThetaVector({0.0, 0.5}), ErrorCode::DomainError);
    ModelParams p{{0.6, 0.4}, {1.0, 1.0}, 1.0};
    CHECK(p.theta()[0] == doctest::Approx(0.6));
    ModelParams g{{0.25, 0.25}, {1.0, 1.0}, 0.5};
    CHECK(g.theta()[0] == doctest::Approx(0.0625));
    ModelParams bad{{2.0, 0.4}, {1.0, 1.0}, 1.0};
    CHECK_CODE(bad.theta(), ErrorCode::DomainError);
  }

  TEST_CASE("theoretical_R reference values") {
    const ThetaVector theta({0.6, 0.4});
    IndependenceTailCopula ind(2);
    ComonotoneTailCopula com(2);
    CHECK(theoretical_R(1, kInf, 1, theta, ind) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(theoretical_R(1, kInf, 1, theta, com) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK_CODE(theoretical_R(kInf, kInf, kInf, theta, ind), ErrorCode::DomainError);
    IndependenceTailCopula three(3);
    CHECK_CODE(theoretical_R(1, 1, 1, ThetaVector({0.1, 0.2, 0.3}), three),
               ErrorCode::InvalidArgument);
  }

  TEST_CASE("theoretical_R with independent unit-Pareto covariates matches simulation") {
    // Y = max(0.6 X1, 0.4 X2), P(Y > y) ~ 1/y, so U_Y(1/p) ~ 1/p.
    const double p = 1e-3;
    const std::size_t draws = 2'000'000;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t hits = 0;
    const double uy = 1.0 / p;
    for (std::size_t i = 0; i < draws; ++i) {
      const double x1 = 1.0 / (1.0 - u(rng));
      const double x2 = 1.0 / (1.0 - u(rng));
      if (x1 > 1.0 / p && std::max(0.6 * x1, 0.4 * x2) > uy) ++hits;
    }
    const double mc = static_cast<double>(hits) / (draws * p);
    IndependenceTailCopula ind(2);
    const double exact = theoretical_R(1, kInf, 1, ThetaVector({0.6, 0.4}), ind);
    CHECK(std::abs(mc - exact) < 0.06);
  }

  TEST_CASE("rtilde reference values") {
    IndependenceTailCopula ind3(3);
    CHECK(rtilde(0, ThetaVector({0.4, 0.3, 0.5}), ind3) == doctest::Approx(0.4).epsilon(1e-15));
    ComonotoneTailCopula com(2);
    CHECK(rtilde(1, ThetaVector({0.6, 0.4}), com) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK_CODE(rtilde(2, ThetaVector({0.6, 0.4}), com), ErrorCode::IndexOutOfRange);
    CHECK_CODE(rtilde(0, ThetaVector({0.6, 0.4, 0.1}), com), ErrorCode::InvalidArgument);
  }

  TEST_CASE("rtilde equals the two-dimensional closed form") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    IndependenceTailCopula ind(2);
    ComonotoneTailCopula com(2);
    auto mc = small_t_copula(2, 0.5);
    for (int i = 0; i < 300; ++i) {
      const ThetaVector theta({u(rng), u(rng)});
      for (const TailCopula* rx : std::initializer_list<const TailCopula*>{&ind, &com, &mc}) {
        const double a[2] = {1.0, theta[1]};
        const double b[2] = {theta[0], theta[1]};
        const double c[2] = {theta[0], 1.0};
        CHECK(std::abs(rtilde(0, theta, *rx) - (theta[0] + (*rx)(a) - (*rx)(b))) <= 1e-12);
        CHECK(std::abs(rtilde(1, theta, *rx) - (theta[1] + (*rx)(c) - (*rx)(b))) <= 1e-12);
      }
    }
  }

  TEST_CASE("rtilde comonotone closed form in any dimension") {
    // With comonotone covariates the union over {x_i > theta_i} is the event
    // {x > max theta}, intersected with {x_j > 1}: mass min(1, max theta).
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (std::size_t d : {2, 3, 4, 5}) {
      ComonotoneTailCopula com(d);
      for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> t(d);
        for (auto& v : t) v = u(rng);
        const double top = *std::max_element(t.begin(), t.end());
        for (std::size_t j = 0; j < d; ++j) {
          CHECK(rtilde(j, ThetaVector(t), com) == doctest::Approx(top).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("rtilde in three dimensions matches a direct Monte-Carlo union count") {
    const std::vector<double> theta{0.5, 0.3, 0.7};
    MonteCarloTOptions o;
    o.nu = 4.0;
    o.scale = equicorrelation(3, 0.6);
    o.tail_level = 2e-3;
    o.draws = 1'000'000;
    o.seed = 31;
    o.max_arg = 1.0;
    MonteCarloTCopula mc(o);
    for (std::size_t j = 0; j < 3; ++j) {
      const double via_subsets = rtilde(j, ThetaVector(theta), mc);
      const double direct = oracle::mc_union_mass(j, theta, 4.0, 0.6, 2e-3, 1'000'000, 97);
      // Two independent estimates of a probability near theta_j at N p = 2000.
      CHECK(std::abs(via_subsets - direct) < 0.06);
    }
  }
}
