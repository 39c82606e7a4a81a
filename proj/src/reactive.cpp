#include "jamgame/reactive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jamgame/errors.hpp"

namespace jamgame::reactive {

using detail::require;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this a CCP block of A(phi) is treated as singular.
constexpr double kSingularBlock = 1e-12;

void require_policy(const ReactivePolicy& p) {
  require(p.alpha >= 0.0 && p.alpha <= 1.0 && p.beta >= 0.0 && p.beta <= 1.0,
          "reactive policy must lie in [0, 1]^2");
}

IntervalMoments sum_moments(const ScalarGaussian& g, const std::vector<Interval>& parts) {
  IntervalMoments m;
  for (const auto& iv : parts) m += interval_moments(g, iv.lo, iv.hi);
  return m;
}

}  // namespace

ReactivePolicy project_box(double alpha, double beta) {
  return {std::clamp(alpha, 0.0, 1.0), std::clamp(beta, 0.0, 1.0)};
}

double transmit_margin(std::span<const double> x, const ReprSymbols& symbols,
                       const ReactivePolicy& policy, const GameCosts& costs) {
  double d0 = 0.0;
  double d1 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    d0 += (x[j] - symbols.x_hat0[j]) * (x[j] - symbols.x_hat0[j]);
    d1 += (x[j] - symbols.x_hat1[j]) * (x[j] - symbols.x_hat1[j]);
  }
  const double ab = policy.alpha - policy.beta;
  return ab * d1 + (1.0 - policy.alpha) * d0 - costs.c - costs.d * ab;
}

bool TransmitRegion::contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [x](const Interval& iv) { return x > iv.lo && x < iv.hi; });
}

std::vector<Interval> TransmitRegion::complement() const {
  std::vector<Interval> out;
  double cursor = -kInf;
  for (const auto& iv : intervals) {
    if (iv.lo > cursor) out.push_back({cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < kInf) out.push_back({cursor, kInf});
  return out;
}

TransmitRegion transmit_region(const ReprSymbols& symbols, const ReactivePolicy& policy,
                               const GameCosts& costs) {
  require(symbols.dim() == 1, "transmit_region: scalar symbols expected");
  require_policy(policy);
  const double x0 = symbols.x_hat0[0];
  const double x1 = symbols.x_hat1[0];
  const double ab = policy.alpha - policy.beta;
  const double a = ab + (1.0 - policy.alpha);
  const double b = -2.0 * (ab * x1 + (1.0 - policy.alpha) * x0);
  const double c = ab * x1 * x1 + (1.0 - policy.alpha) * x0 * x0 - costs.c - costs.d * ab;

  TransmitRegion region;
  if (a == 0.0) {
    if (b == 0.0) {
      if (c > 0.0) region.intervals.push_back({-kInf, kInf});
    } else if (b > 0.0) {
      region.intervals.push_back({-c / b, kInf});
    } else {
      region.intervals.push_back({-kInf, -c / b});
    }
    return region;
  }

  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) {
    // q keeps the sign of a, except possibly at one point.
    if (a > 0.0) {
      if (disc == 0.0) {
        const double r = -b / (2.0 * a);
        region.intervals = {{-kInf, r}, {r, kInf}};
      } else {
        region.intervals.push_back({-kInf, kInf});
      }
    }
    return region;
  }
  const double s = std::sqrt(disc);
  const double qq = -0.5 * (b + (b >= 0.0 ? s : -s));
  double r1 = qq / a;
  double r2 = c / qq;
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0.0) {
    region.intervals = {{-kInf, r1}, {r2, kInf}};
  } else {
    region.intervals.push_back({r1, r2});
  }
  return region;
}

std::vector<double> Evaluation::grad_xhat() const {
  std::vector<double> out(grad_x0);
  out.insert(out.end(), grad_x1.begin(), grad_x1.end());
  return out;
}

Evaluation ExactScalarModel::evaluate(const ReprSymbols& symbols, const ReactivePolicy& policy) const {
  const TransmitRegion region = transmit_region(symbols, policy, costs_);
  const IntervalMoments mt = sum_moments(g_, region.intervals);
  const IntervalMoments mn = sum_moments(g_, region.complement());
  const double y0 = symbols.x_hat0[0];
  const double y1 = symbols.x_hat1[0];
  const double al = policy.alpha;
  const double be = policy.beta;
  const double c = costs_.c;
  const double d = costs_.d;

  Evaluation e;
  e.objective = be * mt.centered_second(y1) + (c - d * be) * mt.mass + al * mn.centered_second(y1) +
                (1.0 - al) * mn.centered_second(y0) - d * al * mn.mass;
  e.grad_x0 = {-2.0 * (1.0 - al) * mn.centered_first(y0)};
  e.grad_x1 = {-2.0 * be * mt.centered_first(y1) - 2.0 * al * mn.centered_first(y1)};
  e.grad_alpha = mn.centered_second(y1) - mn.centered_second(y0) - d * mn.mass;
  e.grad_beta = mt.centered_second(y1) - d * mt.mass;
  e.dc_g0 = {-2.0 * (1.0 - al) * mt.centered_first(y0)};
  e.dc_g1 = {-2.0 * be * mn.centered_first(y1) - 2.0 * al * mt.centered_first(y1)};
  e.grad_x0_se = {0.0};
  e.grad_x1_se = {0.0};
  return e;
}

double objective(const ScalarGaussian& g, const GameCosts& costs, const ReprSymbols& symbols,
                 const ReactivePolicy& policy) {
  return ExactScalarModel(g, costs).evaluate(symbols, policy).objective;
}

std::vector<double> grad_xhat(const ScalarGaussian& g, const GameCosts& costs,
                              const ReprSymbols& symbols, const ReactivePolicy& policy) {
  return ExactScalarModel(g, costs).evaluate(symbols, policy).grad_xhat();
}

std::vector<double> grad_phi(const ScalarGaussian& g, const GameCosts& costs,
                             const ReprSymbols& symbols, const ReactivePolicy& policy) {
  const auto e = ExactScalarModel(g, costs).evaluate(symbols, policy);
  return {e.grad_alpha, e.grad_beta};
}

Estimate fne_index(const Evaluation& e, const ReactivePolicy& policy) {
  double norm_sq = 0.0;
  double norm_var = 0.0;
  auto add = [&](const std::vector<double>& g, const std::vector<double>& se) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      norm_sq += g[j] * g[j];
      const double s = j < se.size() ? se[j] : 0.0;
      norm_var += g[j] * g[j] * s * s;
    }
  };
  add(e.grad_x0, e.grad_x0_se);
  add(e.grad_x1, e.grad_x1_se);
  const double norm = std::sqrt(norm_sq);
  const double norm_se = norm > 0.0 ? std::sqrt(norm_var) / norm : 0.0;

  // Box LP: the maximizing vertex is phi_i = 1 for a positive gradient, else 0.
  double lp = 0.0;
  double lp_var = 0.0;
  const double phis[2] = {policy.alpha, policy.beta};
  const double grads[2] = {e.grad_alpha, e.grad_beta};
  const double ses[2] = {e.grad_alpha_se, e.grad_beta_se};
  for (int i = 0; i < 2; ++i) {
    const double w = grads[i] >= 0.0 ? 1.0 - phis[i] : -phis[i];
    lp += grads[i] * w;
    lp_var += w * w * ses[i] * ses[i];
  }
  if (norm >= lp) return {norm, norm_se};
  return {lp, std::sqrt(lp_var)};
}

double fne_index(const ScalarGaussian& g, const GameCosts& costs, const ReprSymbols& symbols,
                 const ReactivePolicy& policy) {
  return fne_index(ExactScalarModel(g, costs).evaluate(symbols, policy), policy).value;
}

ReprSymbols ccp_step(const Evaluation& e, const std::vector<double>& mean, const ReactivePolicy& policy) {
  const double a0 = 2.0 * (1.0 - policy.alpha);
  const double a1 = 2.0 * (policy.alpha + policy.beta);
  ReprSymbols out{mean, mean};
  for (std::size_t j = 0; j < mean.size(); ++j) {
    if (a0 > kSingularBlock) out.x_hat0[j] += e.dc_g0[j] / a0;
    if (a1 > kSingularBlock) out.x_hat1[j] += e.dc_g1[j] / a1;
  }
  return out;
}

}  // namespace jamgame::reactive
