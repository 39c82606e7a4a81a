#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jamgame/reactive.hpp"

namespace jamgame::reactive {

enum class StepRule { kConstant, kInvSqrt };

struct SolverConfig {
  double epsilon = 1e-5;
  std::size_t max_iters = 5000;
  double pga_step = 0.1;  // ascent step on (alpha, beta); GDA uses it too
  StepRule step_rule = StepRule::kConstant;
  double gd_step = 0.01;  // GDA descent step on the symbols
  std::size_t mc_samples = 10'000;
  std::uint64_t seed = 1;

  void validate() const;
  double ascent_step(std::size_t k) const;  // k >= 1
};

struct SolverState {
  ReprSymbols symbols;
  ReactivePolicy policy;
};

/// x_hat0 = mu + 0.1 sigma, x_hat1 = mu, (alpha, beta) = (0.5, 0.5).
SolverState default_init(const std::vector<double>& mean, const std::vector<double>& stddevs);

/// Symbols uniform on mu +- sigma per coordinate, policy uniform on [0, 1]^2.
SolverState random_init(const std::vector<double>& mean, const std::vector<double>& stddevs,
                        std::uint64_t seed);

template <class Model>
SolverState default_init(const Model& model) {
  return default_init(model.mean(), model.stddevs());
}

template <class Model>
SolverState random_init(const Model& model, std::uint64_t seed) {
  return random_init(model.mean(), model.stddevs(), seed);
}

struct TraceRow {
  std::size_t iteration = 0;
  double fne_index = 0.0;
  double objective = 0.0;
  ReactivePolicy policy;
  ReprSymbols symbols;
};

struct FneReport {
  ReprSymbols symbols;
  ReactivePolicy policy;
  double fne_index = 0.0;
  double fne_std_err = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace;  // row 0 is the initial point

  /// First iteration whose index is <= level; last iteration + 1 if never.
  std::size_t iterations_to(double level) const;
};

/// Projected gradient ascent on (alpha, beta) followed by a CCP step on the
/// symbols at the new policy; stops once the FNE index is <= epsilon
/// (plus 3 standard errors on a sampled model).
template <class Model>
FneReport solve_pga_ccp(const Model& model, const SolverConfig& config, const SolverState& init);

/// Simultaneous projected ascent on the policy and descent on the symbols.
template <class Model>
FneReport solve_gda(const Model& model, const SolverConfig& config, const SolverState& init);

}  // namespace jamgame::reactive
