#include "jamgame/proactive.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "bisect.hpp"
#include "jamgame/errors.hpp"

namespace jamgame {

using detail::require;

namespace {

constexpr double kPhiTol = 1e-12;

// Bisection for the root of a nonincreasing h on [0, kMaxJamProbability].
// nullopt when h(0) < 0.
template <class H>
std::optional<double> phi_root(H&& h) {
  if (h(0.0) < 0.0) return std::nullopt;
  if (h(kMaxJamProbability) >= 0.0) return kMaxJamProbability;
  return detail::bisect_decreasing(h, 0.0, kMaxJamProbability, kPhiTol).mid();
}

}  // namespace

GameCosts::GameCosts(double c_, double d_) : c(c_), d(d_) {
  require(std::isfinite(c) && c > 0.0, "GameCosts: c must be > 0");
  require(std::isfinite(d) && d >= 0.0, "GameCosts: d must be >= 0");
}

bool ThresholdPolicy::transmits(std::span<const double> x) const {
  double q = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) q += (x[j] - center[j]) * (x[j] - center[j]);
  return q > threshold;
}

double jammer_marginal(const ScalarGaussian& g, const GameCosts& costs, double phi) {
  phi = clamp_jam_probability(phi);
  return 2.0 * tail_second_moment(g, std::sqrt(costs.c / (1.0 - phi))) - costs.d;
}

double solve_phi_tilde(const ScalarGaussian& g, const GameCosts& costs) {
  const auto root = phi_root([&](double phi) { return jammer_marginal(g, costs, phi); });
  if (!root) throw NoRootError("solve_phi_tilde: jammer marginal is negative at phi = 0");
  return *root;
}

double objective_tilde(const ScalarGaussian& g, const GameCosts& costs, const ReprSymbols& symbols,
                       double phi) {
  require(symbols.dim() == 1, "objective_tilde: scalar symbols expected");
  const double x1_dev = g.mean - symbols.x_hat1[0];
  const double collision_mse = g.variance + x1_dev * x1_dev;
  return clipped_sq_loss(g, symbols.x_hat0[0], costs.c, phi) + phi * (collision_mse - costs.d);
}

double objective_with_policy(const ScalarGaussian& g, const GameCosts& costs,
                             const ThresholdPolicy& policy, const ReprSymbols& symbols, double phi) {
  require(symbols.dim() == 1 && policy.center.size() == 1, "objective_with_policy: scalar inputs expected");
  require(phi >= 0.0 && phi <= 1.0, "objective_with_policy: phi must lie in [0, 1]");
  require(policy.threshold >= 0.0, "objective_with_policy: threshold must be >= 0");
  const double r = std::sqrt(policy.threshold);
  const auto quiet = interval_moments(g, policy.center[0] - r, policy.center[0] + r);
  const double x1_dev = g.mean - symbols.x_hat1[0];
  const double collision_mse = g.variance + x1_dev * x1_dev;
  return (1.0 - phi) * quiet.centered_second(symbols.x_hat0[0]) + costs.c * (1.0 - quiet.mass) +
         phi * (collision_mse - costs.d);
}

ProactiveSaddle solve_saddle(const ScalarGaussian& g, const GameCosts& costs) {
  ProactiveSaddle out;
  out.estimator = ReprSymbols::scalar(g.mean, g.mean);
  if (jammer_marginal(g, costs, 0.0) < 0.0) {
    out.kind = ProactiveCase::kNoJam;
    out.phi_star = 0.0;
  } else {
    out.kind = ProactiveCase::kInteriorJam;
    out.phi_star = solve_phi_tilde(g, costs);
  }
  out.threshold = costs.c / (1.0 - out.phi_star);
  out.value = objective_tilde(g, costs, out.estimator, out.phi_star);
  return out;
}

namespace {

ProactiveSaddle finish_vector(const std::vector<double>& mean, const GameCosts& costs,
                              std::optional<double> root, double trace, double clipped_value,
                              double condition_se) {
  ProactiveSaddle out;
  out.estimator = ReprSymbols::at(mean);
  out.kind = root ? ProactiveCase::kInteriorJam : ProactiveCase::kNoJam;
  out.phi_star = root.value_or(0.0);
  out.threshold = costs.c / (1.0 - out.phi_star);
  out.value = clipped_value + out.phi_star * (trace - costs.d);
  out.condition_std_err = condition_se;
  return out;
}

}  // namespace

ProactiveSaddle solve_saddle_vector(const DiagonalGaussian& g, const GameCosts& costs,
                                    const McConfig& mc) {
  if (g.dim() == 1) return solve_saddle(ScalarGaussian(g.mean[0], g.variances[0]), costs);

  if (g.is_isotropic()) {
    const std::size_t m = g.dim();
    const double var = g.variances.front();
    auto h = [&](double phi) {
      return norm_sq_tail_moment_isotropic(m, var, costs.c / (1.0 - phi)) - costs.d;
    };
    const auto root = phi_root(h);
    const double phi = root.value_or(0.0);
    const double r = costs.c / (1.0 - phi);
    const double k = static_cast<double>(m);
    // E[min{(1 - phi) Q, c}] with Q = ||X - mu||^2 ~ var * chi2_m.
    const double below = var * k - norm_sq_tail_moment_isotropic(m, var, r);
    const double above_prob = boost::math::gamma_q(0.5 * k, 0.5 * r / var);
    return finish_vector(g.mean, costs, root, g.trace(), (1.0 - phi) * below + costs.c * above_prob, 0.0);
  }

  const NormSqSamples draws(g, mc.samples, mc.seed);
  auto h = [&](double phi) { return draws.tail_moment(costs.c / (1.0 - phi)).value - costs.d; };
  const auto root = phi_root(h);
  const double phi = root.value_or(0.0);
  const Estimate cond = draws.tail_moment(costs.c / (1.0 - phi));
  if (root && *root < kMaxJamProbability && std::abs(cond.value - costs.d) > 3.0 * cond.std_err) {
    throw NoRootError("solve_saddle_vector: sampled condition " + std::to_string(cond.value - costs.d) +
                      " exceeds 3 standard errors");
  }
  return finish_vector(g.mean, costs, root, g.trace(), draws.clipped_loss(costs.c, phi), cond.std_err);
}

ProactiveSaddle solve_saddle_vector(const GeneralGaussian& g, const GameCosts& costs,
                                    const McConfig& mc) {
  // ||X - mu||^2 is rotation invariant, so the whitened model has the same
  // phi* and threshold; only the estimator is reported in original coordinates.
  const Whitened w = whiten(g);
  DiagonalGaussian centered(std::vector<double>(g.dim(), 0.0), w.model.variances);
  ProactiveSaddle out = solve_saddle_vector(centered, costs, mc);
  const std::vector<double> mean(g.mean().data(), g.mean().data() + g.mean().size());
  out.estimator = ReprSymbols::at(mean);
  return out;
}

}  // namespace jamgame
