#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "jamgame/gaussian.hpp"
#include "jamgame/proactive.hpp"
#include "jamgame/reactive.hpp"

namespace jamgame::network {

struct NetworkConfig {
  std::size_t n = 1;
  std::size_t capacity = 1;

  NetworkConfig() = default;
  NetworkConfig(std::size_t n, std::size_t capacity);

  /// capacity = ceil(kappa_bar * n).
  static NetworkConfig from_fraction(std::size_t n, double kappa_bar);
};

struct Packet {
  std::size_t sensor_id = 0;
  double value = 0.0;
};

enum class ChannelState { kIdle, kDelivered, kCollision };

struct ChannelOutcome {
  ChannelState state = ChannelState::kIdle;
  std::vector<Packet> packets;  // filled only when delivered
  bool intrinsic = false;       // more transmitters than capacity
  bool extrinsic = false;       // jammed
  std::size_t transmitters = 0;
};

struct ProactiveJammer {
  double phi = 0.0;
};

struct ReactiveJammer {
  reactive::ReactivePolicy policy;
};

using Jammer = std::variant<ProactiveJammer, ReactiveJammer>;

/// Homogeneous transmission rule: a threshold, or an explicit scalar region.
using TransmitRule = std::variant<ThresholdPolicy, reactive::TransmitRegion>;

struct RoundPolicies {
  TransmitRule rule;
  ReprSymbols symbols;
  Jammer jammer;
};

struct RoundResult {
  double cost = 0.0;  // (1/n) sum_i [(X_i - Xhat_i)^2 + c U_i] - d J
  ChannelOutcome outcome;
};

/// One channel use. Sensor i draws from stream (seed, trial, lane i), the
/// jammer from (seed, trial, kJammerLane). A reactive jammer needs n = 1.
RoundResult simulate_round(const ScalarGaussian& g, const GameCosts& costs, const NetworkConfig& config,
                           const RoundPolicies& policies, std::uint64_t seed, std::uint64_t trial);

struct EmpiricalEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t trials = 0;
};

/// Mean round cost over trials 0..trials-1. Parallel over fixed-size blocks
/// merged in order, so the result is identical for any thread count.
EmpiricalEstimate estimate_cost(const ScalarGaussian& g, const GameCosts& costs, const NetworkConfig& config,
                                const RoundPolicies& policies, std::size_t trials, std::uint64_t seed);

/// Single-threaded Welford reference for estimate_cost.
EmpiricalEstimate estimate_cost_serial(const ScalarGaussian& g, const GameCosts& costs,
                                       const NetworkConfig& config, const RoundPolicies& policies,
                                       std::size_t trials, std::uint64_t seed);

/// P(Bin(n, p) <= kappa); 0 for kappa < 0.
double binomial_cdf(std::int64_t n, std::int64_t kappa, double p);

/// P(Bin(n, p) > kappa), computed directly so small tails keep their precision.
double binomial_sf(std::int64_t n, std::int64_t kappa, double p);

/// Finite-n objective for a homogeneous threshold policy and proactive phi.
double jn_analytic(const ScalarGaussian& g, const GameCosts& costs, const NetworkConfig& config,
                   const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi);

enum class TailKind {
  kUpper,  // P(S >= (1 + delta) mu) <= exp(-mu delta^2 / (2 + delta)), delta > 0
  kLower,  // P(S <= (1 - delta) mu) <= exp(-mu delta^2 / 2), 0 < delta < 1
};

double chernoff_upper_bound(std::int64_t n, double p, TailKind kind, double delta);

struct ProbeRow {
  std::size_t n = 0;
  double cdf_kappa = 0.0;        // F_{n-1, kappa(n)}
  double cdf_kappa_minus1 = 0.0;  // F_{n-1, kappa(n)-1}
};

struct ProbeResult {
  std::vector<ProbeRow> rows;
  double limit = 0.0;  // 1(p <= kappa_bar)
  bool boundary_warning = false;
};

ProbeResult convergence_probe(double p, double kappa_bar, const std::vector<std::size_t>& n_grid);
ProbeResult convergence_probe(const ScalarGaussian& g, const ThresholdPolicy& policy, double kappa_bar,
                              const std::vector<std::size_t>& n_grid);

}  // namespace jamgame::network
