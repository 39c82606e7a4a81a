#include "jamgame/runner/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace jamgame::runner {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Read-side view of one JSON object that remembers its dotted path.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) throw ConfigError(join(path_, k), "unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& raw(const std::string& key) const { return j_.at(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(path(key), "required number is missing");
    }
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }

  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(path(key), "required integer is missing");
    }
    const Json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) return static_cast<std::uint64_t>(x);
    }
    throw ConfigError(path(key), "expected a non-negative integer");
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(path(key), "expected a string");
    return j_.at(key).get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const Json& v = j_.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) throw ConfigError(path(key), "expected a number or a nonempty array");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(path(key), "array entries must be numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const Json& j_;
  std::string path_;
};

template <class Fn>
auto wrap(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  } catch (const NotSpdError& e) {
    throw ConfigError(field, e.what());
  }
}

SourceModel parse_source(const Section& s) {
  s.allow({"mean", "variance", "variances", "covariance"});
  const int kinds = int(s.has("variance")) + int(s.has("variances")) + int(s.has("covariance"));
  if (kinds != 1) throw ConfigError(s.path("variance"), "give exactly one of variance, variances, covariance");
  std::vector<double> mean = s.has("mean") ? s.numbers("mean") : std::vector<double>{};

  if (s.has("variance")) {
    const double var = s.number("variance");
    if (mean.empty()) mean = {0.0};
    if (mean.size() == 1) return wrap(s.path("variance"), [&] { return SourceModel(ScalarGaussian(mean[0], var)); });
    return wrap(s.path("variance"), [&] {
      return SourceModel(DiagonalGaussian(mean, std::vector<double>(mean.size(), var)));
    });
  }
  if (s.has("variances")) {
    const auto vars = s.numbers("variances");
    if (mean.empty()) mean.assign(vars.size(), 0.0);
    if (mean.size() != vars.size()) throw ConfigError(s.path("mean"), "length must match source.variances");
    return wrap(s.path("variances"), [&] { return SourceModel(DiagonalGaussian(mean, vars)); });
  }
  const Json& cov = s.raw("covariance");
  if (!cov.is_array() || cov.empty()) throw ConfigError(s.path("covariance"), "expected a square array of arrays");
  const auto m = static_cast<Eigen::Index>(cov.size());
  Eigen::MatrixXd sigma(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Json& row = cov[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      throw ConfigError(s.path("covariance"), "expected a square array of arrays");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!row[static_cast<std::size_t>(j)].is_number()) throw ConfigError(s.path("covariance"), "entries must be numbers");
      sigma(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  if (mean.empty()) mean.assign(static_cast<std::size_t>(m), 0.0);
  if (static_cast<Eigen::Index>(mean.size()) != m) throw ConfigError(s.path("mean"), "length must match source.covariance");
  const Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mean.data(), m);
  return wrap(s.path("covariance"), [&] { return SourceModel(GeneralGaussian(mu, sigma)); });
}

template <class E>
E pick(const Section& s, const std::string& key, const std::string& fallback,
       std::initializer_list<std::pair<const char*, E>> options) {
  const std::string v = s.text(key, fallback);
  for (const auto& [name, value] : options) {
    if (v == name) return value;
  }
  std::string names;
  for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(s.path(key), "must be one of: " + names);
}

SolverSpec parse_solver(const Section& s) {
  s.allow({"epsilon", "max_iters", "pga_step", "step_rule", "gd_step", "mc_samples", "algorithm", "init", "model"});
  SolverSpec out;
  auto& c = out.config;
  c.epsilon = s.number("epsilon", c.epsilon);
  c.max_iters = s.count("max_iters", c.max_iters);
  c.pga_step = s.number("pga_step", c.pga_step);
  c.gd_step = s.number("gd_step", c.gd_step);
  c.mc_samples = s.count("mc_samples", c.mc_samples);
  c.step_rule = pick<reactive::StepRule>(s, "step_rule", "constant",
                                         {{"constant", reactive::StepRule::kConstant},
                                          {"inv_sqrt", reactive::StepRule::kInvSqrt}});
  out.algorithm = pick<Algorithm>(s, "algorithm", "pga_ccp", {{"pga_ccp", Algorithm::kPgaCcp}, {"gda", Algorithm::kGda}});
  out.init = pick<InitMode>(s, "init", "default", {{"default", InitMode::kDefault}, {"random", InitMode::kRandom}});
  out.model = pick<ReactiveModel>(s, "model", "auto",
                                  {{"auto", ReactiveModel::kAuto},
                                   {"exact", ReactiveModel::kExact},
                                   {"sampled", ReactiveModel::kSampled}});
  if (!(c.epsilon > 0.0)) throw ConfigError(s.path("epsilon"), "must be > 0");
  if (c.max_iters < 1) throw ConfigError(s.path("max_iters"), "must be >= 1");
  if (!(c.pga_step > 0.0)) throw ConfigError(s.path("pga_step"), "must be > 0");
  if (!(c.gd_step > 0.0)) throw ConfigError(s.path("gd_step"), "must be > 0");
  if (c.mc_samples < 2) throw ConfigError(s.path("mc_samples"), "must be >= 2");
  return out;
}

SimulateSpec parse_simulate(const Section& s) {
  s.allow({"trials", "policy", "jammer", "threshold", "phi", "alpha", "beta", "x_hat0", "x_hat1"});
  SimulateSpec out;
  out.trials = s.count("trials", out.trials);
  out.policy = pick<SimPolicy>(s, "policy", "saddle",
                               {{"saddle", SimPolicy::kSaddle}, {"fne", SimPolicy::kFne}, {"explicit", SimPolicy::kExplicit}});
  out.jammer = pick<JammerKind>(s, "jammer", "proactive",
                                {{"proactive", JammerKind::kProactive}, {"reactive", JammerKind::kReactive}});
  out.threshold = s.number("threshold", out.threshold);
  out.phi = s.number("phi", out.phi);
  out.alpha = s.number("alpha", out.alpha);
  out.beta = s.number("beta", out.beta);
  out.x_hat0 = s.number("x_hat0", out.x_hat0);
  out.x_hat1 = s.number("x_hat1", out.x_hat1);
  if (out.trials < 2) throw ConfigError(s.path("trials"), "must be >= 2");
  if (out.threshold < 0.0) throw ConfigError(s.path("threshold"), "must be >= 0");
  for (const char* k : {"phi", "alpha", "beta"}) {
    const double v = s.number(k, 0.0);
    if (v < 0.0 || v > 1.0) throw ConfigError(s.path(k), "must lie in [0, 1]");
  }
  return out;
}

SweepSpec parse_sweep(const Section& s) {
  s.allow({"mode", "axes"});
  SweepSpec out;
  out.mode = wrap(s.path("mode"), [&] { return parse_mode(s.text("mode", "large_scale")); });
  if (out.mode == Mode::kSweep) throw ConfigError(s.path("mode"), "a sweep cannot nest another sweep");
  if (!s.has("axes") || !s.raw("axes").is_array() || s.raw("axes").empty()) {
    throw ConfigError(s.path("axes"), "expected a nonempty array");
  }
  std::size_t i = 0;
  for (const auto& a : s.raw("axes")) {
    const Section axis(a, s.path("axes") + "[" + std::to_string(i++) + "]");
    axis.allow({"name", "values"});
    SweepAxis ax;
    ax.name = axis.text("name", "");
    if (ax.name.empty()) throw ConfigError(axis.path("name"), "required string is missing");
    if (!axis.has("values")) throw ConfigError(axis.path("values"), "required array is missing");
    ax.values = axis.numbers("values");
    if (!std::is_sorted(ax.values.begin(), ax.values.end())) throw ConfigError(axis.path("values"), "grid must be sorted");
    out.axes.push_back(std::move(ax));
  }
  return out;
}

Json source_json(const SourceModel& model) {
  return std::visit(
      [](const auto& g) -> Json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ScalarGaussian>) {
          return {{"mean", g.mean}, {"variance", g.variance}};
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          return {{"mean", g.mean}, {"variances", g.variances}};
        } else {
          Json cov = Json::array();
          for (Eigen::Index i = 0; i < g.covariance().rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index j = 0; j < g.covariance().cols(); ++j) row.push_back(g.covariance()(i, j));
            cov.push_back(row);
          }
          return {{"mean", std::vector<double>(g.mean().data(), g.mean().data() + g.mean().size())},
                  {"covariance", cov}};
        }
      },
      model);
}

Json resolve(const ExperimentConfig& c) {
  const auto& s = c.solver;
  Json out = {
      {"mode", to_string(c.mode)},
      {"source", source_json(c.source)},
      {"costs", {{"c", c.costs.c}, {"d", c.costs.d}}},
      {"solver",
       {{"epsilon", s.config.epsilon},
        {"max_iters", s.config.max_iters},
        {"pga_step", s.config.pga_step},
        {"step_rule", s.config.step_rule == reactive::StepRule::kConstant ? "constant" : "inv_sqrt"},
        {"gd_step", s.config.gd_step},
        {"mc_samples", s.config.mc_samples},
        {"algorithm", s.algorithm == Algorithm::kPgaCcp ? "pga_ccp" : "gda"},
        {"init", s.init == InitMode::kDefault ? "default" : "random"},
        {"model", s.model == ReactiveModel::kAuto ? "auto" : s.model == ReactiveModel::kExact ? "exact" : "sampled"}}},
      {"seed", c.seed},
  };
  if (c.kappa_bar) out["kappa_bar"] = *c.kappa_bar;
  if (c.network_n) {
    out["network"] = {{"n", *c.network_n}};
    if (c.network_capacity) out["network"]["capacity"] = *c.network_capacity;
  }
  const auto& m = c.simulate;
  out["simulate"] = {
      {"trials", m.trials},
      {"policy", m.policy == SimPolicy::kSaddle ? "saddle" : m.policy == SimPolicy::kFne ? "fne" : "explicit"},
      {"jammer", m.jammer == JammerKind::kProactive ? "proactive" : "reactive"},
      {"threshold", m.threshold},
      {"phi", m.phi},
      {"alpha", m.alpha},
      {"beta", m.beta},
      {"x_hat0", m.x_hat0},
      {"x_hat1", m.x_hat1},
  };
  if (c.sweep) {
    Json axes = Json::array();
    for (const auto& a : c.sweep->axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    out["sweep"] = {{"mode", to_string(c.sweep->mode)}, {"axes", axes}};
  }
  return out;
}

void require_scalar(const ExperimentConfig& c, const std::string& why) {
  if (!std::holds_alternative<ScalarGaussian>(c.source)) throw ConfigError("source", why + " needs a scalar source");
}

void check_mode(const ExperimentConfig& c, Mode mode) {
  switch (mode) {
    case Mode::kProactive:
    case Mode::kReactive:
      break;
    case Mode::kLargeScale:
      require_scalar(c, "mode large_scale");
      if (!c.kappa_bar) throw ConfigError("kappa_bar", "required for mode large_scale");
      break;
    case Mode::kSimulate: {
      require_scalar(c, "mode simulate");
      if (!c.network_n) throw ConfigError("network.n", "required for mode simulate");
      if (!c.network_capacity && !c.kappa_bar) {
        throw ConfigError("network.capacity", "give network.capacity or kappa_bar for mode simulate");
      }
      const bool reactive = c.simulate.jammer == JammerKind::kReactive;
      if (reactive && *c.network_n != 1) throw ConfigError("network.n", "a reactive jammer is only modeled for n = 1");
      if (reactive && c.simulate.policy == SimPolicy::kSaddle) {
        throw ConfigError("simulate.policy", "a reactive jammer uses policy fne or explicit");
      }
      if (!reactive && c.simulate.policy == SimPolicy::kFne) {
        throw ConfigError("simulate.policy", "policy fne needs simulate.jammer = reactive");
      }
      break;
    }
    case Mode::kSweep:
      if (!c.sweep) throw ConfigError("sweep", "required for mode sweep");
      break;
  }
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kProactive: return "proactive";
    case Mode::kReactive: return "reactive";
    case Mode::kLargeScale: return "large_scale";
    case Mode::kSimulate: return "simulate";
    case Mode::kSweep: return "sweep";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "proactive") return Mode::kProactive;
  if (s == "reactive") return Mode::kReactive;
  if (s == "large_scale" || s == "large-scale") return Mode::kLargeScale;
  if (s == "simulate") return Mode::kSimulate;
  if (s == "sweep") return Mode::kSweep;
  throw DomainError("unknown mode '" + s + "' (proactive, reactive, large_scale, simulate, sweep)");
}

ExperimentConfig parse_config(const Json& input) {
  const Section root(input, "");
  root.allow({"mode", "source", "costs", "kappa_bar", "network", "solver", "simulate", "seed", "sweep"});
  ExperimentConfig c;
  if (!root.has("mode")) throw ConfigError("mode", "required string is missing");
  c.mode = wrap("mode", [&] { return parse_mode(root.text("mode", "")); });

  if (!root.has("source")) throw ConfigError("source", "required object is missing");
  c.source = parse_source(Section(root.raw("source"), "source"));

  if (!root.has("costs")) throw ConfigError("costs", "required object is missing");
  const Section costs(root.raw("costs"), "costs");
  costs.allow({"c", "d"});
  const double cc = costs.number("c");
  const double dd = costs.number("d");
  if (!(cc > 0.0)) throw ConfigError("costs.c", "must be > 0");
  if (!(dd >= 0.0)) throw ConfigError("costs.d", "must be >= 0");
  c.costs = GameCosts(cc, dd);

  if (root.has("kappa_bar")) {
    const double k = root.number("kappa_bar");
    if (!(k > 0.0 && k < 1.0)) throw ConfigError("kappa_bar", "must lie in (0, 1)");
    c.kappa_bar = k;
  }
  if (root.has("network")) {
    const Section net(root.raw("network"), "network");
    net.allow({"n", "capacity"});
    c.network_n = net.count("n");
    if (*c.network_n < 1) throw ConfigError("network.n", "must be >= 1");
    if (net.has("capacity")) {
      c.network_capacity = net.count("capacity");
      if (*c.network_capacity < 1 || *c.network_capacity > *c.network_n) {
        throw ConfigError("network.capacity", "must lie in [1, n]");
      }
    }
  }
  if (root.has("solver")) {
    c.solver = parse_solver(Section(root.raw("solver"), "solver"));
  }
  if (root.has("simulate")) c.simulate = parse_simulate(Section(root.raw("simulate"), "simulate"));
  c.solver.config.seed = c.seed = root.count("seed", 1);
  if (root.has("sweep")) c.sweep = parse_sweep(Section(root.raw("sweep"), "sweep"));

  check_mode(c, c.mode);
  if (c.mode == Mode::kSweep) {
    // The base point must be valid for the swept mode, except for fields an axis sets.
    for (const auto& axis : c.sweep->axes) {
      if (axis.name == "mode" || axis.name.rfind("sweep", 0) == 0 || axis.name == "seed") {
        throw ConfigError("sweep.axes", "axis '" + axis.name + "' is not a sweepable parameter");
      }
    }
  }
  c.resolved = resolve(c);
  return c;
}

void set_path(Json& config, const std::string& path, Json value) {
  Json* node = &config;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError(path, "empty path component");
    parts.push_back(part);
  }
  if (parts.empty()) throw ConfigError(path, "empty path");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError(path, "cannot descend into a non-object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = Json::object();
  }
  if (!node->is_object()) throw ConfigError(path, "cannot descend into a non-object");
  (*node)[parts.back()] = std::move(value);
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set_path(config, key, std::move(value));
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("--config", "'" + path + "' is not valid JSON");
  if (j.is_object() && j.contains("config") && j.contains("provenance")) return j.at("config");
  return j;
}

}  // namespace jamgame::runner
