#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jamgame/large_scale.hpp"
#include "oracle.hpp"

using namespace jamgame;
using namespace jamgame::large_scale;
using doctest::Approx;

namespace {

double two_sided_mass(double var, double l) {
  const double r = std::sqrt(l);
  return oracle::expect([&](double x) { return std::abs(x) > r ? 1.0 : 0.0; }, 0.0, var, {-r, r});
}

double two_sided_moment(double var, double l) {
  const double r = std::sqrt(l);
  return oracle::expect([&](double x) { return std::abs(x) > r ? x * x : 0.0; }, 0.0, var, {-r, r});
}

}  // namespace

TEST_CASE("capacity threshold") {
  const ScalarGaussian g(0.0, 1.0);
  for (double k : {0.05, 0.25, 0.5, 0.9}) {
    CHECK(two_sided_mass(1.0, solve_l_lambda(g, k)) == Approx(k).epsilon(1e-10));
  }
  CHECK(std::abs(solve_l_lambda(g, 0.25) - 1.32) < 0.005);
  CHECK(solve_l_lambda(ScalarGaussian(0.0, 4.0), 0.25) == Approx(4.0 * solve_l_lambda(g, 0.25)).epsilon(1e-14));
  CHECK(solve_l_lambda(g, 1.0 - 1e-12) < 1e-20);
  CHECK_THROWS(solve_l_lambda(g, 0.0));
  CHECK_THROWS(solve_l_lambda(g, 1.0));
}

TEST_CASE("jamming threshold") {
  const ScalarGaussian g(0.0, 1.0);
  const double expected[] = {4.11, 2.37, 1.21};
  const double ds[] = {0.25, 0.5, 0.75};
  for (int i = 0; i < 3; ++i) {
    const auto r = solve_l_phi(g, GameCosts(1.0, ds[i]));
    CHECK_FALSE(r.boundary);
    CHECK(std::abs(r.value - expected[i]) < 0.005);
    CHECK(std::abs(two_sided_moment(1.0, r.value) - ds[i]) < 1e-10);
  }
  const ScalarGaussian wide(0.0, 30.0);
  const auto w = solve_l_phi(wide, GameCosts(1.0, 1e-6));  // root beyond the initial bracket
  CHECK(std::abs(two_sided_moment(30.0, w.value) - 1e-6) < 1e-10);
  CHECK(solve_l_phi(g, GameCosts(1.0, 1.0)).boundary);
  CHECK(solve_l_phi(g, GameCosts(1.0, 1.0)).value == 0.0);
  CHECK(std::isinf(solve_l_phi(g, GameCosts(1.0, 0.0)).value));
}

TEST_CASE("table rows") {
  const ScalarGaussian g(0.0, 1.0);
  struct Row {
    double d, k, threshold, p, phi, lambda;
  };
  const Row rows[] = {
      {0.25, 0.25, 4.11, 0.04, 0.76, 0.0}, {0.25, 0.50, 4.11, 0.04, 0.76, 0.0}, {0.25, 0.75, 4.11, 0.04, 0.76, 0.0},
      {0.50, 0.25, 2.37, 0.12, 0.58, 0.0}, {0.50, 0.50, 2.37, 0.12, 0.58, 0.0}, {0.50, 0.75, 2.37, 0.12, 0.58, 0.0},
      {0.75, 0.25, 1.32, 0.25, 0.0, 0.32}, {0.75, 0.50, 1.21, 0.27, 0.18, 0.0}, {0.75, 0.75, 1.21, 0.27, 0.18, 0.0},
      {1.00, 0.25, 1.32, 0.25, 0.0, 0.32}, {1.00, 0.50, 1.00, 0.32, 0.0, 0.0},  {1.00, 0.75, 1.00, 0.32, 0.0, 0.0},
  };
  for (const auto& r : rows) {
    const auto s = classify_and_solve(g, GameCosts(1.0, r.d), r.k);
    CHECK(std::abs(s.threshold - r.threshold) <= 0.01);
    CHECK(std::abs(s.transmit_prob - r.p) <= 0.01);
    CHECK(std::abs(s.phi_star - r.phi) <= 0.01);
    CHECK(std::abs(s.lambda_star - r.lambda) <= 0.01);
  }
  CHECK(classify_and_solve(g, GameCosts(1.0, 1.0), 0.5).case_id == Case::kC1);
  CHECK(classify_and_solve(g, GameCosts(1.0, 1.0), 0.25).case_id == Case::kC2);
  CHECK(classify_and_solve(g, GameCosts(1.0, 0.5), 0.5).case_id == Case::kC3);
  CHECK(classify_and_solve(g, GameCosts(1.0, 0.75), 0.25).case_id == Case::kC4b);
  CHECK(classify_and_solve(g, GameCosts(1.0, 0.25), 0.25).case_id == Case::kC4c);
}

TEST_CASE("jam-only with d = 0 drives phi to the clamp") {
  const auto s = classify_and_solve(ScalarGaussian(0.0, 1.0), GameCosts(1.0, 0.0), 0.5);
  CHECK(s.case_id == Case::kC3);
  CHECK(s.phi_star == kMaxJamProbability);
  CHECK(std::isfinite(s.threshold));
  CHECK(std::isfinite(s.value));
}

TEST_CASE("tied thresholds give an interval of jamming probabilities") {
  const ScalarGaussian g(0.0, 1.0);
  const double k = 0.25;
  const double l = solve_l_lambda(g, k);
  const double d = 2.0 * tail_second_moment(g, std::sqrt(l));
  const GameCosts costs(1.0, d);
  const auto s = classify_and_solve(g, costs, k);
  REQUIRE(s.case_id == Case::kC4a);
  REQUIRE(s.phi_interval);
  CHECK(s.phi_interval->lo == 0.0);
  CHECK(s.phi_interval->hi == Approx(1.0 - costs.c / l).epsilon(1e-9));
  for (int i = 0; i <= 4; ++i) {
    const double phi = s.phi_interval->hi * i / 4.0;
    const double lambda = s.lambda_for(phi, costs.c);
    CHECK((costs.c + lambda) / (1.0 - phi) == Approx(l).epsilon(1e-12));
    CHECK(std::abs(lagrangian_value(g, costs, k, phi, lambda) - s.value) < 1e-8);
  }
}

TEST_CASE("lagrangian at lambda = 0 is the point-to-point objective") {
  const ScalarGaussian g(0.0, 1.7);
  const GameCosts k(0.8, 0.4);
  for (double phi : {0.0, 0.3, 0.8}) {
    CHECK(lagrangian_value(g, k, 0.4, phi, 0.0) ==
          Approx(objective_tilde(g, k, ReprSymbols::scalar(0.0, 0.0), phi)).epsilon(1e-14));
  }
}

TEST_CASE("saddle properties over a parameter grid") {
  const ScalarGaussian g(0.0, 1.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double c : {0.25, 0.5, 1.0, 1.5, 2.0}) {
    for (double d : {0.1, 0.3, 0.6, 0.9, 1.2}) {
      for (double k : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const GameCosts costs(c, d);
        const auto s = classify_and_solve(g, costs, k);
        CHECK(s.lambda_star * (s.transmit_prob - k) == Approx(0.0).epsilon(1e-8));
        CHECK(s.transmit_prob <= k + 1e-8);
        CHECK(s.transmit_prob == Approx(two_sided_mass(1.0, s.threshold)).epsilon(1e-9));
        if (s.case_id == Case::kC2 || s.case_id == Case::kC4b) CHECK(s.transmit_prob == Approx(k).epsilon(1e-9));
        if (s.case_id == Case::kC1 || s.case_id == Case::kC3) {
          CHECK(s.lambda_star == 0.0);
          CHECK(s.transmit_prob < k);
        }
        const ThresholdPolicy policy{{0.0}, s.threshold};
        CHECK(asymptotic_objective(g, costs, k, policy, s.estimator, s.phi_star) == Approx(s.value).epsilon(1e-9));
        for (int i = 0; i < 100; ++i) {
          const double phi = i / 100.0;
          for (double lambda : {0.0, s.lambda_star, s.lambda_star + 1.0}) {
            CHECK(lagrangian_with_policy(g, costs, k, policy, s.estimator, phi, lambda) <= s.value + 1e-8);
          }
        }
        for (int i = 0; i < 20; ++i) {
          const ThresholdPolicy moved{{0.3 * u(rng)}, std::max(0.0, s.threshold + u(rng))};
          const auto sym = ReprSymbols::scalar(0.5 * u(rng), 0.5 * u(rng));
          CHECK(lagrangian_with_policy(g, costs, k, moved, sym, s.phi_star, s.lambda_star) >= s.value - 1e-8);
        }
      }
    }
  }
}

TEST_CASE("case 4 split follows the larger threshold") {
  const ScalarGaussian g(0.0, 1.0);
  for (double d : {0.2, 0.4, 0.6, 0.8}) {
    for (double k : {0.1, 0.2, 0.3}) {
      const auto s = classify_and_solve(g, GameCosts(0.5, d), k);
      const double ll = solve_l_lambda(g, k);
      const double lp = solve_l_phi(g, GameCosts(0.5, d)).value;
      if (s.case_id == Case::kC4b) CHECK(ll > lp);
      if (s.case_id == Case::kC4c) CHECK(lp > ll);
    }
  }
}

TEST_CASE("monotone in the costs and capacity") {
  const ScalarGaussian g(0.0, 1.0);
  for (double k : {0.2, 0.5, 0.8}) {
    double prev = INFINITY;
    for (double d = 0.05; d < 1.5; d += 0.05) {
      const double phi = classify_and_solve(g, GameCosts(1.0, d), k).phi_star;
      CHECK(phi <= prev + 1e-12);
      prev = phi;
    }
  }
  for (double d : {0.3, 0.8, 1.2}) {
    double prev = INFINITY;
    for (double k = 0.05; k < 0.96; k += 0.05) {
      const double lambda = classify_and_solve(g, GameCosts(1.0, d), k).lambda_star;
      CHECK(lambda <= prev + 1e-12);
      prev = lambda;
    }
  }
}

TEST_CASE("asymptotic objective branches") {
  const ScalarGaussian g(0.0, 1.0);
  const GameCosts costs(1.0, 0.5);
  const auto sym = ReprSymbols::scalar(0.0, 0.0);
  const ThresholdPolicy loose{{0.0}, 0.1};  // transmits ~75% of the time
  const double p = transmit_probability(g, loose);
  for (double k : {0.2, 0.5}) {
    CHECK(asymptotic_objective(g, costs, k, loose, sym, 0.0) >= 1.0 + costs.c * k);
  }
  CHECK(asymptotic_objective(g, costs, 0.5, loose, sym, 0.3) == Approx(0.3 * (1.0 - 0.5) + p + 0.7).epsilon(1e-12));
  CHECK(asymptotic_objective(g, costs, 0.999, loose, sym, 0.3) ==
        Approx(objective_with_policy(g, costs, loose, sym, 0.3)).epsilon(1e-14));
}
