#pragma once

#include <optional>
#include <string>

#include "jamgame/gaussian.hpp"
#include "jamgame/proactive.hpp"

namespace jamgame::large_scale {

/// A squared threshold. `boundary` marks a degenerate root: l = 0 when the
/// defining equation has no positive solution, l = inf when it has no finite one.
struct ThresholdRoot {
  double value = 0.0;
  bool boundary = false;
};

/// (sigma Q^-1(kappa_bar / 2))^2, the squared threshold whose two-sided
/// transmit probability equals kappa_bar.
double solve_l_lambda(const ScalarGaussian& g, double kappa_bar);

/// Root of 2 E[(X - mu)^2 1(X - mu > sqrt(l))] = d.
ThresholdRoot solve_l_phi(const ScalarGaussian& g, const GameCosts& costs);

enum class Case { kC1, kC2, kC3, kC4a, kC4b, kC4c };

std::string to_string(Case c);

struct PhiInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct LargeScaleSaddle {
  Case case_id = Case::kC1;
  double threshold = 0.0;  // transmit iff (x - mu)^2 > threshold
  double phi_star = 0.0;   // for C4a the representative endpoint 0
  std::optional<PhiInterval> phi_interval;
  double lambda_star = 0.0;
  double transmit_prob = 0.0;
  double value = 0.0;
  ReprSymbols estimator;
  double l_lambda = 0.0;
  ThresholdRoot l_phi;

  /// On C4a, the dual variable paired with phi on the curve (c + lambda) / (1 - phi) = l.
  double lambda_for(double phi, double c) const;
};

LargeScaleSaddle classify_and_solve(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar);

/// phi (sigma^2 - d) + E[min{(1 - phi)(X - mu)^2, c + lambda}] - lambda kappa_bar.
double lagrangian_value(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar, double phi,
                        double lambda);

/// The Lagrangian under an arbitrary threshold policy and symbols.
double lagrangian_with_policy(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar,
                              const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi,
                              double lambda);

/// Large-n limit of the objective: the collision-free form when
/// P(transmit) <= kappa_bar, otherwise the saturated form in which every
/// transmission collides.
double asymptotic_objective(const ScalarGaussian& g, const GameCosts& costs, double kappa_bar,
                            const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi);

/// Two-sided transmit probability P((X - center)^2 > threshold).
double transmit_probability(const ScalarGaussian& g, const ThresholdPolicy& policy);

}  // namespace jamgame::large_scale
