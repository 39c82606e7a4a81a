#include "jamgame/network_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "jamgame/errors.hpp"
#include "jamgame/large_scale.hpp"
#include "jamgame/rng.hpp"

namespace jamgame::network {

using detail::require;

NetworkConfig::NetworkConfig(std::size_t n_, std::size_t capacity_) : n(n_), capacity(capacity_) {
  require(n >= 1, "network: n must be >= 1");
  require(capacity >= 1 && capacity <= n, "network: capacity must lie in [1, n]");
}

NetworkConfig NetworkConfig::from_fraction(std::size_t n, double kappa_bar) {
  require(kappa_bar > 0.0 && kappa_bar <= 1.0, "network: kappa_bar must lie in (0, 1]");
  const auto cap = static_cast<std::size_t>(std::ceil(kappa_bar * static_cast<double>(n)));
  return NetworkConfig(n, std::clamp<std::size_t>(cap, 1, n));
}

namespace {

bool rule_transmits(const TransmitRule& rule, double x) {
  return std::visit(
      [x](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ThresholdPolicy>) {
          return r.transmits(std::span<const double>(&x, 1));
        } else {
          return r.contains(x);
        }
      },
      rule);
}

struct Welford {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }

  EmpiricalEstimate estimate() const {
    const double var = count > 1.0 ? m2 / (count - 1.0) : 0.0;
    return {mean, std::sqrt(var / count), static_cast<std::size_t>(count)};
  }
};

void check_estimate_args(const RoundPolicies& policies, std::size_t trials) {
  require(trials >= 2, "estimate_cost: trials must be >= 2");
  require(policies.symbols.dim() == 1, "network simulation supports scalar sources only");
}

}  // namespace

RoundResult simulate_round(const ScalarGaussian& g, const GameCosts& costs, const NetworkConfig& config,
                           const RoundPolicies& policies, std::uint64_t seed, std::uint64_t trial) {
  const bool reactive_jammer = std::holds_alternative<ReactiveJammer>(policies.jammer);
  if (reactive_jammer && config.n != 1) {
    throw UnsupportedError("simulate_round: a reactive jammer is only modeled for n = 1");
  }
  const double sd = g.stddev();
  thread_local std::vector<double> xs;
  thread_local std::vector<char> us;
  xs.resize(config.n);
  us.resize(config.n);

  RoundResult out;
  std::size_t count = 0;
  for (std::size_t i = 0; i < config.n; ++i) {
    const Stream stream(seed, {trial, static_cast<std::uint32_t>(i)});
    xs[i] = g.mean + sd * stream.normal_pair(0).first;
    us[i] = rule_transmits(policies.rule, xs[i]) ? 1 : 0;
    count += static_cast<std::size_t>(us[i]);
  }

  const double u = Stream(seed, {trial, kJammerLane}).uniform(0);
  double jam_prob = 0.0;
  if (reactive_jammer) {
    const auto& p = std::get<ReactiveJammer>(policies.jammer).policy;
    jam_prob = count > 0 ? p.beta : p.alpha;
  } else {
    jam_prob = std::get<ProactiveJammer>(policies.jammer).phi;
  }
  const bool jammed = u < jam_prob;

  ChannelOutcome& oc = out.outcome;
  oc.transmitters = count;
  oc.intrinsic = count > config.capacity;
  oc.extrinsic = jammed;
  if (oc.intrinsic || oc.extrinsic) {
    oc.state = ChannelState::kCollision;
  } else if (count > 0) {
    oc.state = ChannelState::kDelivered;
  } else {
    oc.state = ChannelState::kIdle;
  }
  if ((oc.state == ChannelState::kCollision) != (count > config.capacity || jammed)) {
    throw std::logic_error("simulate_round: collision accounting violated");
  }

  const double x0 = policies.symbols.x_hat0[0];
  const double x1 = policies.symbols.x_hat1[0];
  double total = 0.0;
  for (std::size_t i = 0; i < config.n; ++i) {
    double estimate = x0;
    if (oc.state == ChannelState::kCollision) {
      estimate = x1;
    } else if (us[i]) {
      estimate = xs[i];
      oc.packets.push_back({i, xs[i]});
    }
    const double err = xs[i] - estimate;
    total += err * err + (us[i] ? costs.c : 0.0);
  }
  out.cost = total / static_cast<double>(config.n) - (jammed ? costs.d : 0.0);
  return out;
}

EmpiricalEstimate estimate_cost_serial(const ScalarGaussian& g, const GameCosts& costs,
                                       const NetworkConfig& config, const RoundPolicies& policies,
                                       std::size_t trials, std::uint64_t seed) {
  check_estimate_args(policies, trials);
  Welford acc;
  for (std::size_t t = 0; t < trials; ++t) acc.add(simulate_round(g, costs, config, policies, seed, t).cost);
  return acc.estimate();
}

EmpiricalEstimate estimate_cost(const ScalarGaussian& g, const GameCosts& costs, const NetworkConfig& config,
                                const RoundPolicies& policies, std::size_t trials, std::uint64_t seed) {
  check_estimate_args(policies, trials);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<Welford> partial(blocks);
  const auto nb = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(trials, lo + kBlock);
    Welford& acc = partial[static_cast<std::size_t>(b)];
    for (std::size_t t = lo; t < hi; ++t) acc.add(simulate_round(g, costs, config, policies, seed, t).cost);
  }
  Welford total;
  for (const auto& w : partial) total.merge(w);
  return total.estimate();
}

// P(Bin(n, p) <= k) = I_{1-p}(n - k, k + 1), the regularized incomplete beta.
double binomial_cdf(std::int64_t n, std::int64_t kappa, double p) {
  require(n >= 0, "binomial_cdf: n must be >= 0");
  require(p >= 0.0 && p <= 1.0, "binomial_cdf: p must lie in [0, 1]");
  if (kappa < 0) return 0.0;
  if (kappa >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  return boost::math::ibetac(static_cast<double>(kappa + 1), static_cast<double>(n - kappa), p);
}

double binomial_sf(std::int64_t n, std::int64_t kappa, double p) {
  require(n >= 0, "binomial_sf: n must be >= 0");
  require(p >= 0.0 && p <= 1.0, "binomial_sf: p must lie in [0, 1]");
  if (kappa < 0) return 1.0;
  if (kappa >= n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(kappa + 1), static_cast<double>(n - kappa), p);
}

double jn_analytic(const ScalarGaussian& g, const GameCosts& costs, const NetworkConfig& config,
                   const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi) {
  require(phi >= 0.0 && phi <= 1.0, "jn_analytic: phi must lie in [0, 1]");
  require(symbols.dim() == 1 && policy.center.size() == 1, "jn_analytic: scalar inputs expected");
  const double r = std::sqrt(policy.threshold);
  const auto quiet = interval_moments(g, policy.center[0] - r, policy.center[0] + r);
  const double p_tx = 1.0 - quiet.mass;
  const double x0 = symbols.x_hat0[0];
  const double x1 = symbols.x_hat1[0];
  const double mse1 = g.variance + (g.mean - x1) * (g.mean - x1);
  const double quiet_err0 = quiet.centered_second(x0);
  const double quiet_err1 = quiet.centered_second(x1);
  const double loud_err1 = mse1 - quiet_err1;

  const auto others = static_cast<std::int64_t>(config.n) - 1;
  const auto kappa = static_cast<std::int64_t>(config.capacity);
  const double f_k = binomial_cdf(others, kappa, p_tx);
  const double f_k1 = binomial_cdf(others, kappa - 1, p_tx);
  return phi * (mse1 - costs.d) + costs.c * p_tx +
         (1.0 - phi) * (quiet_err0 * f_k + quiet_err1 * (1.0 - f_k) + loud_err1 * (1.0 - f_k1));
}

double chernoff_upper_bound(std::int64_t n, double p, TailKind kind, double delta) {
  const double mu = static_cast<double>(n) * p;
  require(mu > 0.0, "chernoff_upper_bound: n p must be > 0");
  if (kind == TailKind::kUpper) {
    require(delta > 0.0, "chernoff_upper_bound: upper tail needs delta > 0");
    return std::exp(-mu * delta * delta / (2.0 + delta));
  }
  require(delta > 0.0 && delta < 1.0, "chernoff_upper_bound: lower tail needs 0 < delta < 1");
  return std::exp(-mu * delta * delta / 2.0);
}

ProbeResult convergence_probe(double p, double kappa_bar, const std::vector<std::size_t>& n_grid) {
  require(kappa_bar > 0.0 && kappa_bar < 1.0, "convergence_probe: kappa_bar must lie in (0, 1)");
  ProbeResult out;
  out.limit = p <= kappa_bar ? 1.0 : 0.0;
  out.boundary_warning = std::abs(p - kappa_bar) < 1e-6;
  for (std::size_t n : n_grid) {
    const auto cfg = NetworkConfig::from_fraction(n, kappa_bar);
    const auto others = static_cast<std::int64_t>(n) - 1;
    const auto k = static_cast<std::int64_t>(cfg.capacity);
    out.rows.push_back({n, binomial_cdf(others, k, p), binomial_cdf(others, k - 1, p)});
  }
  return out;
}

ProbeResult convergence_probe(const ScalarGaussian& g, const ThresholdPolicy& policy, double kappa_bar,
                              const std::vector<std::size_t>& n_grid) {
  return convergence_probe(large_scale::transmit_probability(g, policy), kappa_bar, n_grid);
}

}  // namespace jamgame::network
