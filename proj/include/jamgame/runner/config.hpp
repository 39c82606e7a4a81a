#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jamgame/errors.hpp"
#include "jamgame/gaussian.hpp"
#include "jamgame/proactive.hpp"
#include "jamgame/reactive_solver.hpp"

namespace jamgame::runner {

using Json = nlohmann::json;

/// A config problem; `field` is the dotted path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Mode { kProactive, kReactive, kLargeScale, kSimulate, kSweep };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

enum class Algorithm { kPgaCcp, kGda };
enum class InitMode { kDefault, kRandom };
enum class ReactiveModel { kAuto, kExact, kSampled };

struct SolverSpec {
  reactive::SolverConfig config;
  Algorithm algorithm = Algorithm::kPgaCcp;
  InitMode init = InitMode::kDefault;
  ReactiveModel model = ReactiveModel::kAuto;
};

enum class SimPolicy { kSaddle, kFne, kExplicit };
enum class JammerKind { kProactive, kReactive };

struct SimulateSpec {
  std::size_t trials = 100'000;
  SimPolicy policy = SimPolicy::kSaddle;
  JammerKind jammer = JammerKind::kProactive;
  // Used by the explicit policy.
  double threshold = 1.0;
  double phi = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double x_hat0 = 0.0;
  double x_hat1 = 0.0;
};

struct SweepAxis {
  std::string name;  // dotted config path
  std::vector<double> values;
};

struct SweepSpec {
  Mode mode = Mode::kLargeScale;
  std::vector<SweepAxis> axes;
};

struct ExperimentConfig {
  Mode mode = Mode::kProactive;
  SourceModel source;
  GameCosts costs;
  std::optional<double> kappa_bar;
  std::optional<std::size_t> network_n;
  std::optional<std::size_t> network_capacity;
  SolverSpec solver;
  SimulateSpec simulate;
  std::uint64_t seed = 1;
  std::optional<SweepSpec> sweep;

  Json resolved;  // the input with every default filled in

  std::size_t dim() const { return dimension(source); }
};

/// Validates and fills defaults. Unknown keys are errors.
ExperimentConfig parse_config(const Json& input);

/// Sets a dotted path ("costs.d=0.5") in place. The value is parsed as JSON
/// when possible and kept as a string otherwise.
void apply_override(Json& config, const std::string& assignment);

/// Sets a dotted path to a value, creating intermediate objects.
void set_path(Json& config, const std::string& path, Json value);

/// Reads a config file. A result record is accepted too; its embedded
/// config is returned.
Json load_config_file(const std::string& path);

}  // namespace jamgame::runner
