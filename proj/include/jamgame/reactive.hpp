#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jamgame/gaussian.hpp"
#include "jamgame/proactive.hpp"

namespace jamgame::reactive {

/// Jam with probability alpha on an idle channel, beta on an occupied one.
struct ReactivePolicy {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Componentwise clamp to [0, 1]^2.
ReactivePolicy project_box(double alpha, double beta);

/// q(x) = (alpha - beta)||x - x_hat1||^2 + (1 - alpha)||x - x_hat0||^2 - c - d(alpha - beta).
/// The sensor transmits iff q(x) > 0.
double transmit_margin(std::span<const double> x, const ReprSymbols& symbols,
                       const ReactivePolicy& policy, const GameCosts& costs);

struct Interval {
  double lo;
  double hi;
};

/// Scalar transmit set {x : q(x) > 0} as sorted, disjoint open intervals.
struct TransmitRegion {
  std::vector<Interval> intervals;

  bool contains(double x) const;
  /// Closure of the no-transmit set, also as sorted intervals.
  std::vector<Interval> complement() const;
};

TransmitRegion transmit_region(const ReprSymbols& symbols, const ReactivePolicy& policy,
                               const GameCosts& costs);

/// Objective, subgradients in the symbols and the policy, and the gradient of the convex part
/// G = E[max{a, b}] used by the CCP step, all at one point. Standard errors
/// are zero on the exact path.
struct Evaluation {
  double objective = 0.0;
  std::vector<double> grad_x0;
  std::vector<double> grad_x1;
  double grad_alpha = 0.0;
  double grad_beta = 0.0;
  std::vector<double> dc_g0;
  std::vector<double> dc_g1;

  double objective_se = 0.0;
  std::vector<double> grad_x0_se;
  std::vector<double> grad_x1_se;
  double grad_alpha_se = 0.0;
  double grad_beta_se = 0.0;

  std::vector<double> grad_xhat() const;  // (grad_x0, grad_x1)
};

/// Closed-form evaluation for a scalar source via truncated Gaussian moments.
class ExactScalarModel {
 public:
  ExactScalarModel(ScalarGaussian g, GameCosts costs) : g_(g), costs_(costs) {}

  Evaluation evaluate(const ReprSymbols& symbols, const ReactivePolicy& policy) const;

  std::size_t dim() const { return 1; }
  std::vector<double> mean() const { return {g_.mean}; }
  std::vector<double> stddevs() const { return {g_.stddev()}; }
  std::vector<double> ccp_center() const { return mean(); }
  bool sampled() const { return false; }
  const GameCosts& costs() const { return costs_; }

 private:
  ScalarGaussian g_;
  GameCosts costs_;
};

/// Sample-average evaluation over one fixed set of draws (common random
/// numbers for a whole solve).
class SampledModel {
 public:
  SampledModel(const SourceModel& source, GameCosts costs, std::size_t samples, std::uint64_t seed);

  /// Blocked OpenMP kernel. Blocks have a fixed size and are merged in order,
  /// so the result does not depend on the thread count.
  Evaluation evaluate(const ReprSymbols& symbols, const ReactivePolicy& policy) const;
  /// Single-pass reference kernel.
  Evaluation evaluate_serial(const ReprSymbols& symbols, const ReactivePolicy& policy) const;

  std::size_t dim() const { return draws_.dim; }
  std::vector<double> mean() const { return mean_; }
  std::vector<double> stddevs() const { return stddevs_; }
  /// Sample mean: the minimizer of the convex part under the empirical
  /// measure, so CCP fixed points are stationary for the sampled objective.
  std::vector<double> ccp_center() const { return sample_mean_; }
  bool sampled() const { return true; }
  const GameCosts& costs() const { return costs_; }
  const SampleMatrix& draws() const { return draws_; }

 private:
  GameCosts costs_;
  SampleMatrix draws_;
  std::vector<double> mean_;
  std::vector<double> stddevs_;
  std::vector<double> sample_mean_;
};

// Scalar exact entry points.
double objective(const ScalarGaussian& g, const GameCosts& costs, const ReprSymbols& symbols,
                 const ReactivePolicy& policy);
std::vector<double> grad_xhat(const ScalarGaussian& g, const GameCosts& costs,
                              const ReprSymbols& symbols, const ReactivePolicy& policy);
std::vector<double> grad_phi(const ScalarGaussian& g, const GameCosts& costs,
                             const ReprSymbols& symbols, const ReactivePolicy& policy);

/// max{||grad_xhat||, sum_i max(g_i (0 - phi_i), g_i (1 - phi_i))} with a
/// delta-method standard error for the sampled path.
Estimate fne_index(const Evaluation& e, const ReactivePolicy& policy);

/// x_hat0 <- mu + g0 / (2(1 - alpha)), x_hat1 <- mu + g1 / (2(alpha + beta));
/// a singular block sets that symbol to mu.
ReprSymbols ccp_step(const Evaluation& e, const std::vector<double>& mean, const ReactivePolicy& policy);

template <class Model>
ReprSymbols ccp_update(const Model& model, const ReprSymbols& symbols, const ReactivePolicy& policy) {
  return ccp_step(model.evaluate(symbols, policy), model.ccp_center(), policy);
}

double fne_index(const ScalarGaussian& g, const GameCosts& costs, const ReprSymbols& symbols,
                 const ReactivePolicy& policy);

}  // namespace jamgame::reactive
