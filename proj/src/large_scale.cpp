#include "jamgame/large_scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bisect.hpp"
#include "jamgame/errors.hpp"

namespace jamgame::large_scale {

using detail::require;

namespace {

constexpr double kGateTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_kappa(double kappa_bar) {
  require(kappa_bar > 0.0 && kappa_bar < 1.0, "kappa_bar must lie in (0, 1)");
}

}  // namespace

double solve_l_lambda(const ScalarGaussian& g, double kappa_bar) {
  require_kappa(kappa_bar);
  const double z = std_normal_tail_inverse(0.5 * kappa_bar);
  return g.variance * z * z;
}

ThresholdRoot solve_l_phi(const ScalarGaussian& g, const GameCosts& costs) {
  if (costs.d <= 0.0) return {kInf, true};
  if (costs.d >= g.variance) return {0.0, true};
  auto h = [&](double l) { return 2.0 * tail_second_moment(g, std::sqrt(l)) - costs.d; };
  double lo = 1e-12;
  double hi = 50.0 * g.variance;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  const auto br = detail::bisect_decreasing(h, lo, hi, 1e-15 * hi);
  return {br.mid(), false};
}

std::string to_string(Case c) {
  switch (c) {
    case Case::kC1: return "C1";
    case Case::kC2: return "C2";
    case Case::kC3: return "C3";
    case Case::kC4a: return "C4a";
    case Case::kC4b: return "C4b";
    case Case::kC4c: return "C4c";
  }
  return "?";
}

double LargeScaleSaddle::lambda_for(double phi, double c) const {
  return std::max(0.0, threshold * (1.0 - phi) - c);
}

double transmit_probability(const ScalarGaussian& g, const ThresholdPolicy& policy) {
  const double r = std::sqrt(policy.threshold);
  return 1.0 - interval_moments(g, policy.center[0] - r, policy.center[0] + r).mass;
}

LargeScaleSaddle classify_and_solve(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar) {
  require_kappa(kappa_bar);
  const ScalarGaussian centered(0.0, g.variance);
  const double root_c = std::sqrt(costs.c);
  const bool capacity_gate = tail_prob(centered, root_c) >= 0.5 * kappa_bar - kGateTol;
  const bool jam_gate = tail_second_moment(centered, root_c) >= 0.5 * costs.d - kGateTol;

  LargeScaleSaddle s;
  s.estimator = ReprSymbols::scalar(g.mean, g.mean);
  s.l_lambda = solve_l_lambda(g, kappa_bar);
  s.l_phi = solve_l_phi(g, costs);

  auto capacity_bound = [&](Case id) {
    s.case_id = id;
    s.threshold = s.l_lambda;
    s.phi_star = 0.0;
    s.lambda_star = s.l_lambda - costs.c;
  };
  auto jam_bound = [&](Case id) {
    s.case_id = id;
    if (std::isinf(s.l_phi.value)) {
      s.phi_star = kMaxJamProbability;
      s.threshold = costs.c / (1.0 - kMaxJamProbability);
    } else {
      s.threshold = s.l_phi.value;
      s.phi_star = std::max(0.0, 1.0 - costs.c / s.l_phi.value);
    }
    s.lambda_star = 0.0;
  };

  if (!capacity_gate && !jam_gate) {
    s.case_id = Case::kC1;
    s.threshold = costs.c;
  } else if (capacity_gate && !jam_gate) {
    capacity_bound(Case::kC2);
  } else if (!capacity_gate && jam_gate) {
    jam_bound(Case::kC3);
  } else {
    const double ll = s.l_lambda;
    const double lp = s.l_phi.value;
    if (std::abs(ll - lp) <= kGateTol * std::max(1.0, ll)) {
      s.case_id = Case::kC4a;
      s.threshold = ll;
      s.phi_interval = PhiInterval{0.0, std::max(0.0, 1.0 - costs.c / ll)};
      s.phi_star = 0.0;
      s.lambda_star = s.lambda_for(0.0, costs.c);
    } else if (ll > lp) {
      capacity_bound(Case::kC4b);
    } else {
      jam_bound(Case::kC4c);
    }
  }
  s.lambda_star = std::max(0.0, s.lambda_star);
  s.transmit_prob = transmit_probability(g, {{g.mean}, s.threshold});
  s.value = lagrangian_value(g, costs, kappa_bar, s.phi_star, s.lambda_star);
  return s;
}

double lagrangian_value(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar, double phi,
                        double lambda) {
  require(lambda >= 0.0, "lagrangian_value: lambda must be >= 0");
  return phi * (g.variance - costs.d) + clipped_sq_loss(g, g.mean, costs.c + lambda, phi) -
         lambda * kappa_bar;
}

double lagrangian_with_policy(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar,
                              const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi,
                              double lambda) {
  require(lambda >= 0.0, "lagrangian_with_policy: lambda must be >= 0");
  // c P(T) + lambda (P(T) - kappa_bar) folds into an effective cost c + lambda.
  GameCosts shifted = costs;
  shifted.c += lambda;
  return objective_with_policy(g, shifted, policy, symbols, phi) - lambda * kappa_bar;
}

double asymptotic_objective(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar,
                            const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi) {
  require_kappa(kappa_bar);
  const double p = transmit_probability(g, policy);
  // A binding threshold lands on kappa_bar only up to rounding.
  if (p <= kappa_bar + kGateTol) return objective_with_policy(g, costs, policy, symbols, phi);
  const double dev = g.mean - symbols.x_hat1[0];
  const double mse1 = g.variance + dev * dev;
  return phi * (mse1 - costs.d) + costs.c * p + (1.0 - phi) * mse1;
}

}  // namespace jamgame::large_scale
