#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jamgame/gaussian.hpp"

namespace jamgame {

struct GameCosts {
  double c = 1.0;  // transmission cost
  double d = 1.0;  // jamming cost

  GameCosts() = default;
  GameCosts(double c, double d);
};

/// Estimator outputs for the no-transmission (x_hat0) and collision (x_hat1)
/// events.
struct ReprSymbols {
  std::vector<double> x_hat0;
  std::vector<double> x_hat1;

  static ReprSymbols scalar(double x_hat0, double x_hat1) { return {{x_hat0}, {x_hat1}}; }
  static ReprSymbols at(const std::vector<double>& mean) { return {mean, mean}; }

  std::size_t dim() const { return x_hat0.size(); }
};

/// Transmit iff ||x - center||^2 > threshold.
struct ThresholdPolicy {
  std::vector<double> center;
  double threshold = 0.0;

  bool transmits(std::span<const double> x) const;
};

enum class ProactiveCase { kNoJam, kInteriorJam };

struct ProactiveSaddle {
  double phi_star = 0.0;
  double threshold = 0.0;  // on the squared deviation from the mean
  ReprSymbols estimator;
  double value = 0.0;
  ProactiveCase kind = ProactiveCase::kNoJam;
  double condition_std_err = 0.0;  // nonzero only on the sampled vector path

  ThresholdPolicy policy() const { return {estimator.x_hat0, threshold}; }
};

/// 2 E[(X - mu)^2 1((1 - phi)(X - mu)^2 > c)] - d; the jammer's marginal gain
/// in phi. Strictly decreasing in phi.
double jammer_marginal(const ScalarGaussian& g, const GameCosts& costs, double phi);

/// Root of jammer_marginal on [0, kMaxJamProbability]. Throws NoRootError when
/// the marginal is already negative at phi = 0; returns the clamp when it
/// stays positive (d = 0).
double solve_phi_tilde(const ScalarGaussian& g, const GameCosts& costs);

ProactiveSaddle solve_saddle(const ScalarGaussian& g, const GameCosts& costs);

/// Objective after the coordinator plays its best threshold for x_hat0:
/// E[min{(1 - phi)(X - x_hat0)^2, c}] + phi (E[(X - x_hat1)^2] - d).
double objective_tilde(const ScalarGaussian& g, const GameCosts& costs, const ReprSymbols& symbols,
                       double phi);

/// Objective under an arbitrary threshold transmission policy:
/// (1 - phi) E[(X - x_hat0)^2 1N] + c P(T) + phi (E[(X - x_hat1)^2] - d).
double objective_with_policy(const ScalarGaussian& g, const GameCosts& costs,
                             const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi);

struct McConfig {
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
};

/// Multivariate saddle: estimator at the mean, phi* from
/// E[||X - mu||^2 1((1 - phi)||X - mu||^2 > c)] = d. Closed form when the
/// variances are equal; otherwise one fixed sample set is reused across the
/// bisection and the root is accepted only within 3 standard errors.
ProactiveSaddle solve_saddle_vector(const DiagonalGaussian& g, const GameCosts& costs,
                                    const McConfig& mc = {});
ProactiveSaddle solve_saddle_vector(const GeneralGaussian& g, const GameCosts& costs,
                                    const McConfig& mc = {});

}  // namespace jamgame
