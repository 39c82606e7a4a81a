// One PASS/FAIL line per acceptance criterion. The exit code is nonzero only
// when a criterion fails that is not listed as a known deviation in the README.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jamgame/gaussian.hpp"
#include "jamgame/large_scale.hpp"
#include "jamgame/network_sim.hpp"
#include "jamgame/proactive.hpp"
#include "jamgame/reactive.hpp"
#include "jamgame/reactive_solver.hpp"
#include "jamgame/runner/runner.hpp"
#include "oracle.hpp"

using namespace jamgame;
using namespace jamgame::reactive;
using jamgame::network::NetworkConfig;
using jamgame::network::RoundPolicies;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      detail << what;
      ok = false;
    }
  }
};

int unexpected_failures = 0;

void criterion(const std::string& id, const std::string& name, const std::function<void(Check&)>& body,
               bool known_deviation = false) {
  Check c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  const double t = seconds_since(t0);
  std::printf("%s %-3s %s (%.2fs)", c.ok ? "PASS" : "FAIL", id.c_str(), name.c_str(), t);
  if (!c.ok) {
    std::printf(": %s", c.detail.str().c_str());
    if (known_deviation) std::printf(" [known deviation]");
  }
  std::printf("\n");
  std::fflush(stdout);
  if (!c.ok && !known_deviation) ++unexpected_failures;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

FneReport solve_unit(double var, double d, double epsilon = 1e-5) {
  const ExactScalarModel model(ScalarGaussian(0.0, var), GameCosts(1.0, d));
  SolverConfig cfg;
  cfg.epsilon = epsilon;
  return solve_pga_ccp(model, cfg, default_init(model));
}

void table_reproduction(Check& c) {
  struct Row {
    double d, k, threshold, p, phi, lambda;
  };
  const Row expected[] = {
      {0.25, 0.25, 4.11, 0.04, 0.76, 0.0}, {0.25, 0.50, 4.11, 0.04, 0.76, 0.0}, {0.25, 0.75, 4.11, 0.04, 0.76, 0.0},
      {0.50, 0.25, 2.37, 0.12, 0.58, 0.0}, {0.50, 0.50, 2.37, 0.12, 0.58, 0.0}, {0.50, 0.75, 2.37, 0.12, 0.58, 0.0},
      {0.75, 0.25, 1.32, 0.25, 0.0, 0.32}, {0.75, 0.50, 1.21, 0.27, 0.18, 0.0}, {0.75, 0.75, 1.21, 0.27, 0.18, 0.0},
      {1.00, 0.25, 1.32, 0.25, 0.0, 0.32}, {1.00, 0.50, 1.00, 0.32, 0.0, 0.0},  {1.00, 0.75, 1.00, 0.32, 0.0, 0.0},
  };
  const auto t0 = Clock::now();
  const auto config =
      runner::parse_config(runner::load_config_file(std::string(JAMGAME_CONFIG_DIR) + "/table1.json"));
  const auto out = runner::run(config);
  const double t = seconds_since(t0);
  c.require(out.exit_code == runner::kExitOk, "sweep exit code " + std::to_string(out.exit_code));
  c.require(out.rows.size() == 12, "rows " + std::to_string(out.rows.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(12, out.rows.size()); ++i) {
    const auto& row = out.rows[i];
    const auto& e = expected[i];
    const std::string at = "d=" + fmt(e.d) + " k=" + fmt(e.k);
    c.require(row["costs.d"].get<double>() == e.d && row["kappa_bar"].get<double>() == e.k, at + " order");
    const double got[] = {row["threshold"].get<double>(), row["transmit_prob"].get<double>(),
                          row["phi_star"].get<double>(), row["lambda_star"].get<double>()};
    const double want[] = {e.threshold, e.p, e.phi, e.lambda};
    const char* names[] = {"threshold", "transmit_prob", "phi_star", "lambda_star"};
    for (int j = 0; j < 4; ++j) {
      c.require(std::abs(got[j] - want[j]) <= 0.01, at + " " + names[j] + "=" + fmt(got[j]));
    }
  }
  c.require(t < 1.0, "runtime " + fmt(t) + "s");
}

void gate_integrals(Check& c) {
  const ScalarGaussian g(0.0, 1.0);
  const double p = tail_prob(g, 1.0);
  const double m = tail_second_moment(g, 1.0);
  c.require(std::abs(p - 0.1587) <= 5e-4, "tail_prob=" + fmt(p));
  c.require(std::abs(m - 0.4007) <= 5e-4, "tail_second_moment=" + fmt(m));
  c.require(std::abs(p - 0.16) < 0.005 && std::abs(m - 0.40) < 0.005, "quoted two-digit values");
}

void proactive_saddles(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = INFINITY;
  for (int i = 0; i < 10; ++i) {
    const double var = 0.3 + 4.0 * u(rng);
    const ScalarGaussian g(0.0, var);
    const GameCosts k(0.2 + 1.8 * u(rng), 0.05 + 1.5 * u(rng));
    const auto s = solve_saddle(g, k);
    const auto policy = s.policy();
    // Jammer side: no phi does better against the coordinator's saddle policy.
    for (int j = 0; j < 100; ++j) {
      const double phi = j / 99.0 * kMaxJamProbability;
      worst = std::min(worst, s.value - objective_with_policy(g, k, policy, s.estimator, phi));
    }
    // Coordinator side: perturbed thresholds and symbols, valued by quadrature.
    const double sd = std::sqrt(var);
    for (int j = 0; j < 20; ++j) {
      const double thr = std::max(0.0, s.threshold + sd * (2.0 * u(rng) - 1.0));
      const double x0 = s.estimator.x_hat0[0] + sd * (2.0 * u(rng) - 1.0);
      const double x1 = s.estimator.x_hat1[0] + sd * (2.0 * u(rng) - 1.0);
      const double moved = oracle::proactive_objective(g.mean, var, k.c, k.d, s.estimator.x_hat0[0], thr, x0, x1,
                                                       s.phi_star);
      worst = std::min(worst, moved - s.value);
    }
  }
  const double t = seconds_since(t0);
  c.require(worst >= -1e-8, "min slack " + fmt(worst));
  c.require(t < 10.0, "runtime " + fmt(t) + "s");
}

void reactive_fne(Check& c) {
  const auto r = solve_unit(1.0, 1.0);
  const double x0 = r.symbols.x_hat0[0], x1 = r.symbols.x_hat1[0];
  c.require(r.converged && r.fne_index <= 1e-5, "fne_index=" + fmt(r.fne_index));
  c.require(r.iterations <= 5000, "iterations=" + std::to_string(r.iterations));
  c.require(std::abs(x0) > 1e-3 && std::abs(x1) > 1e-3 && std::abs(x0 - x1) > 1e-3,
            "symbols x_hat0=" + fmt(x0) + " x_hat1=" + fmt(x1));
}

void reactive_no_idle_jam(Check& c) {
  for (int var = 1; var <= 5; ++var) {
    const auto r = solve_unit(var, 1.5);
    c.require(r.converged, "sigma2=" + std::to_string(var) + " not converged");
    c.require(r.policy.alpha <= 1e-6, "sigma2=" + std::to_string(var) + " alpha*=" + fmt(r.policy.alpha));
  }
}

void reactive_idle_jam(Check& c) {
  double best = 0.0;
  for (int var = 1; var <= 5; ++var) {
    const auto r = solve_unit(var, 1.0);
    c.require(r.converged, "sigma2=" + std::to_string(var) + " not converged");
    best = std::max(best, r.policy.alpha);
  }
  c.require(best > 1e-6, "max alpha*=" + fmt(best));
}

void solver_speed(Check& c) {
  const auto t0 = Clock::now();
  double pga_total = 0.0, gda_total = 0.0;
  int runs = 0;
  for (double var : {1.0, 3.0, 5.0}) {
    const ExactScalarModel model(ScalarGaussian(0.0, var), GameCosts(1.0, 1.0));
    SolverConfig cfg;
    cfg.epsilon = 0.05;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto init = random_init(model, seed);
      pga_total += static_cast<double>(solve_pga_ccp(model, cfg, init).iterations_to(0.05));
      gda_total += static_cast<double>(solve_gda(model, cfg, init).iterations_to(0.05));
      ++runs;
    }
  }
  const double pga = pga_total / runs, gda = gda_total / runs;
  c.require(2.0 * pga <= gda, "mean iterations PGA-CCP " + fmt(pga) + " GDA " + fmt(gda));

  std::vector<double> vars(10, 1.0);
  for (std::size_t i = 5; i < 10; ++i) vars[i] = 2.0;
  const SampledModel model(DiagonalGaussian(std::vector<double>(10, 0.0), vars), GameCosts(1.0, 1.0), 10000, 1);
  SolverConfig cfg;
  cfg.epsilon = 0.1;
  cfg.max_iters = 500;
  const auto rep = solve_pga_ccp(model, cfg, default_init(model));
  c.require(rep.iterations_to(0.1) <= 500, "vector PGA-CCP final fne " + fmt(rep.fne_index));
  const double t = seconds_since(t0);
  c.require(t < 300.0, "runtime " + fmt(t) + "s");
}

void gradients(Check& c) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  int accepted = 0;
  while (accepted < 100) {
    const double mean = 2.0 * u(rng) - 1.0, var = 0.3 + 3.0 * u(rng), sd = std::sqrt(var);
    const ScalarGaussian g(mean, var);
    const GameCosts k(0.2 + 1.5 * u(rng), 0.1 + 1.5 * u(rng));
    auto sym = ReprSymbols::scalar(mean + sd * (2.0 * u(rng) - 1.0), mean + sd * (2.0 * u(rng) - 1.0));
    ReactivePolicy pol{0.05 + 0.9 * u(rng), 0.05 + 0.9 * u(rng)};
    // Stay away from alpha = beta, where the transmit region changes shape.
    if (std::abs(pol.alpha - pol.beta) < 0.02) continue;
    ++accepted;
    const auto gx = grad_xhat(g, k, sym, pol);
    const auto gp = grad_phi(g, k, sym, pol);
    double* vars[4] = {&sym.x_hat0[0], &sym.x_hat1[0], &pol.alpha, &pol.beta};
    const double grads[4] = {gx[0], gx[1], gp[0], gp[1]};
    for (int j = 0; j < 4; ++j) {
      const double v0 = *vars[j];
      *vars[j] = v0 + h;
      const double up = objective(g, k, sym, pol);
      *vars[j] = v0 - h;
      const double dn = objective(g, k, sym, pol);
      *vars[j] = v0;
      const double fd = (up - dn) / (2.0 * h);
      worst = std::max(worst, std::abs(grads[j] - fd) / std::max(1.0, std::abs(grads[j])));
    }
  }
  c.require(worst <= 1e-6, "exact max relative error " + fmt(worst));

  const DiagonalGaussian vg({0.0, 0.5, -0.5, 1.0, 0.2}, {1.0, 1.5, 0.7, 2.0, 1.2});
  const SampledModel model(vg, GameCosts(1.0, 0.7), 20000, 7);
  ReprSymbols sym{{0.3, 0.2, -0.1, 1.4, 0.5}, {-0.2, 0.8, -0.9, 0.6, -0.3}};
  ReactivePolicy pol{0.35, 0.55};
  const auto e = model.evaluate(sym, pol);
  const double hv = 1e-6;
  double worst_z = 0.0;
  for (std::size_t j = 0; j < vg.dim(); ++j) {
    for (int which = 0; which < 2; ++which) {
      auto& v = which == 0 ? sym.x_hat0[j] : sym.x_hat1[j];
      const double v0 = v;
      v = v0 + hv;
      const double up = model.evaluate(sym, pol).objective;
      v = v0 - hv;
      const double dn = model.evaluate(sym, pol).objective;
      v = v0;
      const double fd = (up - dn) / (2.0 * hv);
      const double grad = which == 0 ? e.grad_x0[j] : e.grad_x1[j];
      const double se = which == 0 ? e.grad_x0_se[j] : e.grad_x1_se[j];
      worst_z = std::max(worst_z, std::abs(fd - grad) / se);
    }
  }
  c.require(worst_z <= 3.0, "vector max |fd - grad| / se = " + fmt(worst_z));
}

void simulator_agreement(Check& c) {
  constexpr std::size_t kRounds = 1'000'000;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto compare = [&](const std::string& what, const network::EmpiricalEstimate& est, double analytic) {
    const double z = std::abs(est.mean - analytic) / est.std_err;
    c.require(z <= 3.0, what + " z=" + fmt(z));
  };
  const NetworkConfig single(1, 1);
  for (int i = 0; i < 10; ++i) {
    const ScalarGaussian g(u(rng) - 0.5, 0.5 + 2.0 * u(rng));
    const GameCosts k(0.3 + u(rng), 0.2 + u(rng));
    const auto sym = ReprSymbols::scalar(g.mean + 0.5 * (u(rng) - 0.5), g.mean + 0.5 * (u(rng) - 0.5));
    const double phi = 0.9 * u(rng);
    // The best response to phi transmits iff (1 - phi)(x - x_hat0)^2 > c.
    const RoundPolicies rp{ThresholdPolicy{sym.x_hat0, k.c / (1.0 - phi)}, sym, network::ProactiveJammer{phi}};
    compare("proactive n=1 #" + std::to_string(i),
            network::estimate_cost(g, k, single, rp, kRounds, 1000 + static_cast<std::uint64_t>(i)),
            objective_tilde(g, k, sym, phi));
  }
  for (int i = 0; i < 10; ++i) {
    const ScalarGaussian g(u(rng) - 0.5, 0.5 + 2.0 * u(rng));
    const GameCosts k(0.3 + u(rng), 0.2 + u(rng));
    const auto sym = ReprSymbols::scalar(g.mean + 0.5 * (u(rng) - 0.5), g.mean + 0.5 * (u(rng) - 0.5));
    const ReactivePolicy pol{u(rng), u(rng)};
    const RoundPolicies rp{transmit_region(sym, pol, k), sym, network::ReactiveJammer{pol}};
    compare("reactive n=1 #" + std::to_string(i),
            network::estimate_cost(g, k, single, rp, kRounds, 2000 + static_cast<std::uint64_t>(i)),
            objective(g, k, sym, pol));
  }
  for (std::size_t n : {5, 20}) {
    for (int i = 0; i < 10; ++i) {
      const ScalarGaussian g(u(rng) - 0.5, 0.5 + 2.0 * u(rng));
      const GameCosts k(0.3 + u(rng), 0.2 + u(rng));
      const NetworkConfig net(n, 1 + static_cast<std::size_t>(u(rng) * static_cast<double>(n - 1)));
      const ThresholdPolicy pol{{g.mean}, 0.2 + 2.0 * u(rng)};
      const auto sym = ReprSymbols::scalar(g.mean + 0.3 * (u(rng) - 0.5), g.mean + 0.3 * (u(rng) - 0.5));
      const double phi = 0.8 * u(rng);
      const RoundPolicies rp{pol, sym, network::ProactiveJammer{phi}};
      compare("n=" + std::to_string(n) + " #" + std::to_string(i),
              network::estimate_cost(g, k, net, rp, kRounds, 3000 + 100 * n + static_cast<std::uint64_t>(i)),
              network::jn_analytic(g, k, net, pol, sym, phi));
    }
  }
}

void limits(Check& c) {
  for (double kappa : {0.3, 0.5, 0.7}) {
    for (double p : {kappa - 0.2, kappa + 0.2}) {
      const auto probe = network::convergence_probe(p, kappa, {5000});
      const double gap = std::abs(probe.rows[0].cdf_kappa - probe.limit);
      c.require(gap <= 1e-3, "kappa=" + fmt(kappa) + " p=" + fmt(p) + " gap " + fmt(gap));
    }
  }
  for (std::int64_t n : {10, 100, 1000, 5000}) {
    for (double p : {0.1, 0.3, 0.5, 0.7}) {
      const double mu = static_cast<double>(n) * p;
      for (double delta : {0.05, 0.2, 0.5, 0.9, 2.0}) {
        const auto k_up = static_cast<std::int64_t>(std::ceil((1.0 + delta) * mu)) - 1;
        const double up = network::binomial_sf(n, k_up, p);
        c.require(up <= network::chernoff_upper_bound(n, p, network::TailKind::kUpper, delta),
                  "upper tail n=" + std::to_string(n) + " p=" + fmt(p) + " delta=" + fmt(delta));
        if (delta < 1.0) {
          const auto k_dn = static_cast<std::int64_t>(std::floor((1.0 - delta) * mu));
          const double dn = network::binomial_cdf(n, k_dn, p);
          c.require(dn <= network::chernoff_upper_bound(n, p, network::TailKind::kLower, delta),
                    "lower tail n=" + std::to_string(n) + " p=" + fmt(p) + " delta=" + fmt(delta));
        }
      }
    }
  }
  const ScalarGaussian g(0.0, 1.0);
  const GameCosts k(1.0, 0.5);
  const double kappa = 0.3;
  const auto s = large_scale::classify_and_solve(g, k, kappa);
  const ThresholdPolicy pol{{0.0}, s.threshold};
  const double jn = network::jn_analytic(g, k, NetworkConfig::from_fraction(2000, kappa), pol, s.estimator, s.phi_star);
  const double limit = large_scale::asymptotic_objective(g, k, kappa, pol, s.estimator, s.phi_star);
  c.require(std::abs(large_scale::transmit_probability(g, pol) - kappa) > 0.05, "instance is on the boundary");
  c.require(std::abs(jn - limit) < 0.01, "n=2000 gap " + fmt(std::abs(jn - limit)));
}

void identity(Check& c) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double mean = 2.0 * u(rng) - 1.0, var = 0.3 + 3.0 * u(rng), sd = std::sqrt(var);
    const ScalarGaussian g(mean, var);
    const GameCosts k(0.2 + 1.5 * u(rng), 0.1 + 1.5 * u(rng));
    const auto sym = ReprSymbols::scalar(mean + sd * (2.0 * u(rng) - 1.0), mean + sd * (2.0 * u(rng) - 1.0));
    const double phi = 0.99 * u(rng);
    worst = std::max(worst, std::abs(objective(g, k, sym, {phi, phi}) - objective_tilde(g, k, sym, phi)));
  }
  c.require(worst <= 1e-12, "max difference " + fmt(worst));
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  criterion("1", "large-scale saddle table, 12 rows", table_reproduction);
  criterion("2", "gate integrals", gate_integrals);
  criterion("3", "proactive saddle inequalities", proactive_saddles);
  criterion("4a", "reactive FNE on the unit instance", reactive_fne);
  criterion("4b", "d=1.5: alpha*=0 for sigma2 in 1..5", reactive_no_idle_jam, true);
  criterion("4c", "d=1: alpha*>0 for some sigma2 in 1..5", reactive_idle_jam);
  criterion("5", "PGA-CCP vs GDA iteration counts", solver_speed);
  criterion("6", "gradients vs finite differences", gradients);
  criterion("7", "simulator vs analytic objectives", simulator_agreement);
  criterion("8", "limit behavior and Chernoff bounds", limits);
  criterion("9", "alpha=beta=phi identity", identity);
  std::printf("%s: %d unexpected failure(s)\n", unexpected_failures == 0 ? "OK" : "NOT OK", unexpected_failures);
  return unexpected_failures == 0 ? 0 : 1;
}
