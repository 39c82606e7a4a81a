#include "jamgame/runner/runner.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jamgame/large_scale.hpp"
#include "jamgame/network_sim.hpp"
#include "jamgame/proactive.hpp"
#include "jamgame/reactive.hpp"
#include "jamgame/runner/table.hpp"

#ifndef JAMGAME_VERSION
#define JAMGAME_VERSION "0.0.0"
#endif

namespace jamgame::runner {

namespace {

Json numbers(const std::vector<double>& v) {
  if (v.size() == 1) return v[0];
  return v;
}

std::vector<std::string> symbol_columns(const std::string& name, std::size_t dim) {
  if (dim == 1) return {name};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back(name + "_" + std::to_string(i));
  return out;
}

void put_symbols(Json& out, const ReprSymbols& s) {
  out["x_hat0"] = numbers(s.x_hat0);
  out["x_hat1"] = numbers(s.x_hat1);
}

const ScalarGaussian& scalar_source(const ExperimentConfig& c) { return std::get<ScalarGaussian>(c.source); }

void check_point(const ExperimentConfig& c) {
  if (c.mode == Mode::kSweep) throw ConfigError("mode", "a sweep point cannot be a sweep");
  if (c.mode == Mode::kReactive && c.solver.model == ReactiveModel::kExact &&
      !std::holds_alternative<ScalarGaussian>(c.source)) {
    throw ConfigError("solver.model", "the exact model needs a scalar source");
  }
}

template <class Model>
reactive::FneReport solve_reactive(const Model& model, const SolverSpec& spec) {
  const auto init = spec.init == InitMode::kDefault ? reactive::default_init(model)
                                                    : reactive::random_init(model, spec.config.seed);
  return spec.algorithm == Algorithm::kPgaCcp ? reactive::solve_pga_ccp(model, spec.config, init)
                                              : reactive::solve_gda(model, spec.config, init);
}

reactive::FneReport solve_reactive(const ExperimentConfig& c) {
  const bool exact = c.solver.model == ReactiveModel::kExact ||
                     (c.solver.model == ReactiveModel::kAuto && std::holds_alternative<ScalarGaussian>(c.source));
  if (exact) return solve_reactive(reactive::ExactScalarModel(scalar_source(c), c.costs), c.solver);
  return solve_reactive(reactive::SampledModel(c.source, c.costs, c.solver.config.mc_samples, c.seed), c.solver);
}

void run_proactive(const ExperimentConfig& c, PointResult& r) {
  const McConfig mc{c.solver.config.mc_samples, c.seed};
  const ProactiveSaddle s = std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ScalarGaussian>) {
          return solve_saddle(g, c.costs);
        } else {
          return solve_saddle_vector(g, c.costs, mc);
        }
      },
      c.source);
  auto& o = r.outputs;
  o["case"] = s.kind == ProactiveCase::kNoJam ? "no_jam" : "interior_jam";
  o["threshold"] = s.threshold;
  o["phi_star"] = s.phi_star;
  if (const auto* g = std::get_if<ScalarGaussian>(&c.source)) {
    o["transmit_prob"] = large_scale::transmit_probability(*g, s.policy());
  }
  o["value"] = s.value;
  put_symbols(o, s.estimator);
  if (s.condition_std_err > 0.0) o["condition_std_err"] = s.condition_std_err;
}

void put_report(Json& o, const reactive::FneReport& rep) {
  o["alpha"] = rep.policy.alpha;
  o["beta"] = rep.policy.beta;
  put_symbols(o, rep.symbols);
  o["fne_index"] = rep.fne_index;
  if (rep.fne_std_err > 0.0) o["fne_std_err"] = rep.fne_std_err;
  o["iterations"] = rep.iterations;
  o["converged"] = rep.converged;
  o["value"] = rep.objective;
}

void run_reactive(const ExperimentConfig& c, PointResult& r) {
  auto rep = solve_reactive(c);
  put_report(r.outputs, rep);
  r.trace = std::move(rep.trace);
  r.has_trace = true;
  r.converged = rep.converged;
}

void run_large_scale(const ExperimentConfig& c, PointResult& r) {
  const auto s = large_scale::classify_and_solve(scalar_source(c), c.costs, *c.kappa_bar);
  auto& o = r.outputs;
  o["case"] = large_scale::to_string(s.case_id);
  o["threshold"] = s.threshold;
  o["transmit_prob"] = s.transmit_prob;
  o["phi_star"] = s.phi_star;
  if (s.phi_interval) o["phi_interval"] = {s.phi_interval->lo, s.phi_interval->hi};
  o["lambda_star"] = s.lambda_star;
  o["value"] = s.value;
  put_symbols(o, s.estimator);
  o["l_lambda"] = s.l_lambda;
  if (std::isfinite(s.l_phi.value)) o["l_phi"] = s.l_phi.value;
  o["l_phi_boundary"] = s.l_phi.boundary;
}

void run_simulate(const ExperimentConfig& c, PointResult& r) {
  const auto& g = scalar_source(c);
  const auto& sim = c.simulate;
  const auto net = c.network_capacity ? network::NetworkConfig(*c.network_n, *c.network_capacity)
                                      : network::NetworkConfig::from_fraction(*c.network_n, *c.kappa_bar);
  auto& o = r.outputs;
  network::RoundPolicies policies;
  double analytic = 0.0;

  if (sim.jammer == JammerKind::kProactive) {
    ThresholdPolicy policy{{g.mean}, sim.threshold};
    ReprSymbols symbols = ReprSymbols::scalar(sim.x_hat0, sim.x_hat1);
    double phi = sim.phi;
    if (sim.policy == SimPolicy::kSaddle) {
      if (c.kappa_bar) {
        const auto s = large_scale::classify_and_solve(g, c.costs, *c.kappa_bar);
        policy.threshold = s.threshold;
        phi = s.phi_star;
        symbols = s.estimator;
      } else {
        const auto s = solve_saddle(g, c.costs);
        policy = s.policy();
        phi = s.phi_star;
        symbols = s.estimator;
      }
    }
    policies = {policy, symbols, network::ProactiveJammer{phi}};
    analytic = network::jn_analytic(g, c.costs, net, policy, symbols, phi);
    o["threshold"] = policy.threshold;
    o["phi"] = phi;
    put_symbols(o, symbols);
  } else {
    ReprSymbols symbols = ReprSymbols::scalar(sim.x_hat0, sim.x_hat1);
    reactive::ReactivePolicy policy{sim.alpha, sim.beta};
    if (sim.policy == SimPolicy::kFne) {
      const auto rep = solve_reactive(reactive::ExactScalarModel(g, c.costs), c.solver);
      symbols = rep.symbols;
      policy = rep.policy;
      r.converged = rep.converged;
      o["fne_index"] = rep.fne_index;
      o["converged"] = rep.converged;
    }
    policies = {reactive::transmit_region(symbols, policy, c.costs), symbols, network::ReactiveJammer{policy}};
    analytic = reactive::objective(g, c.costs, symbols, policy);
    o["alpha"] = policy.alpha;
    o["beta"] = policy.beta;
    put_symbols(o, symbols);
  }
  const auto est = network::estimate_cost(g, c.costs, net, policies, sim.trials, c.seed);
  o["n"] = net.n;
  o["capacity"] = net.capacity;
  o["mean"] = est.mean;
  o["std_err"] = est.std_err;
  o["trials"] = est.trials;
  o["analytic"] = analytic;
}

void require_finite(const Json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw std::logic_error("non-finite output in result record");
  }
  if (j.is_structured()) {
    for (const auto& v : j) require_finite(v);
  }
}

Json table_row(const Json& outputs) {
  Json row = Json::object();
  for (const auto& [k, v] : outputs.items()) {
    if (v.is_array() && k != "phi_interval") {
      for (std::size_t i = 0; i < v.size(); ++i) row[k + "_" + std::to_string(i)] = v[i];
    } else {
      row[k] = v;
    }
  }
  return row;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("--out", "cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::string version() { return JAMGAME_VERSION; }

PointResult run_point(const ExperimentConfig& config) {
  check_point(config);
  PointResult r;
  try {
    switch (config.mode) {
      case Mode::kProactive: run_proactive(config, r); break;
      case Mode::kReactive: run_reactive(config, r); break;
      case Mode::kLargeScale: run_large_scale(config, r); break;
      case Mode::kSimulate: run_simulate(config, r); break;
      case Mode::kSweep: break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.error = e.what();
    r.converged = false;
  }
  require_finite(r.outputs);
  return r;
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config) {
  if (!config.sweep) throw ConfigError("sweep", "required for mode sweep");
  Json base = config.resolved;
  base.erase("sweep");
  base["mode"] = to_string(config.sweep->mode);
  const auto& axes = config.sweep->axes;

  std::vector<ExperimentConfig> points;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    Json point = base;
    for (std::size_t a = 0; a < axes.size(); ++a) set_path(point, axes[a].name, axes[a].values[idx[a]]);
    try {
      points.push_back(parse_config(point));
    } catch (const ConfigError& e) {
      // An axis naming a field outside the schema surfaces as an unknown key.
      throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2) + " (in sweep point)");
    }
    check_point(points.back());
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return points;
    }
    if (axes.empty()) return points;
  }
}

std::vector<std::string> table_columns(Mode mode, std::size_t dim) {
  std::vector<std::string> cols;
  auto add = [&](std::initializer_list<const char*> names) { cols.insert(cols.end(), names.begin(), names.end()); };
  auto add_symbols = [&] {
    for (const char* s : {"x_hat0", "x_hat1"}) {
      const auto names = symbol_columns(s, dim);
      cols.insert(cols.end(), names.begin(), names.end());
    }
  };
  switch (mode) {
    case Mode::kProactive:
      add({"case", "threshold", "transmit_prob", "phi_star", "value"});
      add_symbols();
      break;
    case Mode::kLargeScale:
      add({"case", "threshold", "transmit_prob", "phi_star", "lambda_star", "value"});
      break;
    case Mode::kReactive:
      add({"alpha", "beta"});
      add_symbols();
      add({"fne_index", "iterations", "converged", "value"});
      break;
    case Mode::kSimulate:
      add({"mean", "std_err", "trials", "analytic"});
      break;
    case Mode::kSweep:
      break;
  }
  return cols;
}

std::string trace_csv(const std::vector<reactive::TraceRow>& trace) {
  const std::size_t dim = trace.empty() ? 1 : trace.front().symbols.dim();
  std::vector<std::string> cols = {"iteration", "fne_index", "objective", "alpha", "beta"};
  for (const char* s : {"x_hat0", "x_hat1"}) {
    const auto names = symbol_columns(s, dim);
    cols.insert(cols.end(), names.begin(), names.end());
  }
  std::vector<Json> rows;
  rows.reserve(trace.size());
  for (const auto& t : trace) {
    Json row = {{"iteration", t.iteration},
                {"fne_index", t.fne_index},
                {"objective", t.objective},
                {"alpha", t.policy.alpha},
                {"beta", t.policy.beta}};
    const auto n0 = symbol_columns("x_hat0", dim);
    const auto n1 = symbol_columns("x_hat1", dim);
    for (std::size_t i = 0; i < dim; ++i) {
      row[n0[i]] = t.symbols.x_hat0[i];
      row[n1[i]] = t.symbols.x_hat1[i];
    }
    rows.push_back(std::move(row));
  }
  return emit_table(cols, rows, 10);
}

RunOutcome run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunOutcome out;
  out.record = {{"config", config.resolved}, {"provenance", {{"version", version()}, {"seed", config.seed}}}};
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);

  if (config.mode != Mode::kSweep) {
    PointResult r = run_point(config);
    out.columns = table_columns(config.mode, config.dim());
    out.record["outputs"] = r.outputs;
    Json row = table_row(r.outputs);
    if (!r.error.empty()) {
      out.record["error"] = r.error;
      out.columns.push_back("error");
      row["error"] = r.error;
    }
    out.rows.push_back(std::move(row));
    if (r.has_trace) {
      out.record["trace"] = "trace.csv";
      if (write) write_file(out_dir / "trace.csv", trace_csv(r.trace));
    }
    out.exit_code = r.converged && r.error.empty() ? kExitOk : kExitNotConverged;
  } else {
    const auto points = expand_sweep(config);
    const auto& axes = config.sweep->axes;
    std::vector<PointResult> results(points.size());
    const auto np = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < np; ++i) {
      auto& r = results[static_cast<std::size_t>(i)];
      try {
        r = run_point(points[static_cast<std::size_t>(i)]);
      } catch (const std::exception& e) {
        r.error = e.what();
        r.converged = false;
      }
    }

    for (const auto& a : axes) out.columns.push_back(a.name);
    const std::size_t dim = points.empty() ? config.dim() : points.front().dim();
    const auto mode_cols = table_columns(config.sweep->mode, dim);
    out.columns.insert(out.columns.end(), mode_cols.begin(), mode_cols.end());

    Json rows = Json::array();
    bool any_error = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& r = results[i];
      Json rec = Json::object();
      Json row = Json::object();
      std::size_t stride = points.size();
      for (std::size_t a = 0; a < axes.size(); ++a) {
        stride /= axes[a].values.size();
        const double v = axes[a].values[(i / stride) % axes[a].values.size()];
        rec[axes[a].name] = v;
        row[axes[a].name] = v;
      }
      rec["outputs"] = r.outputs;
      Json flat = table_row(r.outputs);
      row.update(flat);
      if (!r.error.empty()) {
        rec["error"] = r.error;
        row["error"] = r.error;
        any_error = true;
      }
      if (r.has_trace) {
        char name[32];
        std::snprintf(name, sizeof name, "trace_%04zu.csv", i);
        rec["trace"] = name;
        if (write) write_file(out_dir / name, trace_csv(r.trace));
      }
      if (!r.converged || !r.error.empty()) out.exit_code = kExitNotConverged;
      rows.push_back(std::move(rec));
      out.rows.push_back(std::move(row));
    }
    if (any_error) out.columns.push_back("error");
    out.record["outputs"] = {{"rows", rows}};
  }

  out.record["table"] = "table.csv";
  out.record["converged"] = out.exit_code == kExitOk;
  if (write) {
    write_file(out_dir / "result.json", out.record.dump(2) + "\n");
    write_file(out_dir / "table.csv", emit_table(out.columns, out.rows));
  }
  return out;
}

}  // namespace jamgame::runner
