#include "jamgame/reactive_solver.hpp"

#include <cmath>

#include "jamgame/errors.hpp"
#include "jamgame/rng.hpp"

namespace jamgame::reactive {

using detail::require;

void SolverConfig::validate() const {
  require(epsilon > 0.0, "solver.epsilon must be > 0");
  require(max_iters >= 1, "solver.max_iters must be >= 1");
  require(pga_step > 0.0, "solver.pga_step must be > 0");
  require(gd_step > 0.0, "solver.gd_step must be > 0");
  require(mc_samples >= 2, "solver.mc_samples must be >= 2");
}

double SolverConfig::ascent_step(std::size_t k) const {
  if (step_rule == StepRule::kInvSqrt) return pga_step / std::sqrt(static_cast<double>(k));
  return pga_step;
}

SolverState default_init(const std::vector<double>& mean, const std::vector<double>& stddevs) {
  SolverState s{ReprSymbols::at(mean), {0.5, 0.5}};
  for (std::size_t j = 0; j < mean.size(); ++j) s.symbols.x_hat0[j] += 0.1 * stddevs[j];
  return s;
}

SolverState random_init(const std::vector<double>& mean, const std::vector<double>& stddevs,
                        std::uint64_t seed) {
  const Stream stream(seed, {0, kInitLane});
  std::uint32_t draw = 0;
  SolverState s{ReprSymbols::at(mean), {}};
  for (std::size_t j = 0; j < mean.size(); ++j) {
    s.symbols.x_hat0[j] += stddevs[j] * (2.0 * stream.uniform(draw++) - 1.0);
  }
  for (std::size_t j = 0; j < mean.size(); ++j) {
    s.symbols.x_hat1[j] += stddevs[j] * (2.0 * stream.uniform(draw++) - 1.0);
  }
  s.policy.alpha = stream.uniform(draw++);
  s.policy.beta = stream.uniform(draw++);
  return s;
}

std::size_t FneReport::iterations_to(double level) const {
  for (const auto& row : trace) {
    if (row.fne_index <= level) return row.iteration;
  }
  return trace.empty() ? 0 : trace.back().iteration + 1;
}

namespace {

template <class Model>
class Run {
 public:
  Run(const Model& model, const SolverConfig& config, const SolverState& init)
      : model_(model), config_(config), state_(init) {
    config.validate();
    require(init.symbols.x_hat0.size() == model.dim() && init.symbols.x_hat1.size() == model.dim(),
            "solver init: symbol dimension mismatch");
    require(init.policy.alpha >= 0.0 && init.policy.alpha <= 1.0 && init.policy.beta >= 0.0 &&
                init.policy.beta <= 1.0,
            "solver init: policy must lie in [0, 1]^2");
    eval_ = model_.evaluate(state_.symbols, state_.policy);
    record(0);
  }

  bool done() const {
    const double slack = model_.sampled() ? 3.0 * index_.std_err : 0.0;
    return index_.value <= config_.epsilon + slack;
  }

  const Evaluation& eval() const { return eval_; }
  const SolverState& state() const { return state_; }

  void advance(std::size_t k, SolverState next) {
    state_ = std::move(next);
    eval_ = model_.evaluate(state_.symbols, state_.policy);
    record(k);
  }

  FneReport finish(std::size_t iterations) {
    report_.symbols = state_.symbols;
    report_.policy = state_.policy;
    report_.fne_index = index_.value;
    report_.fne_std_err = index_.std_err;
    report_.objective = eval_.objective;
    report_.iterations = iterations;
    report_.converged = done();
    return std::move(report_);
  }

 private:
  void record(std::size_t k) {
    index_ = fne_index(eval_, state_.policy);
    report_.trace.push_back({k, index_.value, eval_.objective, state_.policy, state_.symbols});
  }

  const Model& model_;
  const SolverConfig& config_;
  SolverState state_;
  Evaluation eval_;
  Estimate index_;
  FneReport report_;
};

}  // namespace

template <class Model>
FneReport solve_pga_ccp(const Model& model, const SolverConfig& config, const SolverState& init) {
  Run<Model> run(model, config, init);
  std::size_t k = 0;
  while (!run.done() && k < config.max_iters) {
    ++k;
    const double step = config.ascent_step(k);
    const auto& e = run.eval();
    const auto& s = run.state();
    const ReactivePolicy policy =
        project_box(s.policy.alpha + step * e.grad_alpha, s.policy.beta + step * e.grad_beta);
    ReprSymbols symbols = ccp_update(model, s.symbols, policy);
    run.advance(k, {std::move(symbols), policy});
  }
  return run.finish(k);
}

template <class Model>
FneReport solve_gda(const Model& model, const SolverConfig& config, const SolverState& init) {
  Run<Model> run(model, config, init);
  std::size_t k = 0;
  while (!run.done() && k < config.max_iters) {
    ++k;
    const double step = config.ascent_step(k);
    const auto& e = run.eval();
    SolverState next = run.state();
    next.policy = project_box(next.policy.alpha + step * e.grad_alpha, next.policy.beta + step * e.grad_beta);
    for (std::size_t j = 0; j < next.symbols.dim(); ++j) {
      next.symbols.x_hat0[j] -= config.gd_step * e.grad_x0[j];
      next.symbols.x_hat1[j] -= config.gd_step * e.grad_x1[j];
    }
    run.advance(k, std::move(next));
  }
  return run.finish(k);
}

template FneReport solve_pga_ccp<ExactScalarModel>(const ExactScalarModel&, const SolverConfig&,
                                                   const SolverState&);
template FneReport solve_pga_ccp<SampledModel>(const SampledModel&, const SolverConfig&, const SolverState&);
template FneReport solve_gda<ExactScalarModel>(const ExactScalarModel&, const SolverConfig&,
                                               const SolverState&);
template FneReport solve_gda<SampledModel>(const SampledModel&, const SolverConfig&, const SolverState&);

}  // namespace jamgame::reactive
