#pragma once

#include <filesystem>
#include <string>

#include "georeshape/agents.hpp"
#include "georeshape/interpreter.hpp"
#include "georeshape/optimizer.hpp"
#include "georeshape/serialization.hpp"

namespace georeshape {

enum class InterpreterMode { Template, External };

std::string to_string(InterpreterMode mode);
InterpreterMode interpreter_mode_from_string(const std::string& text);

/// Rule for objects without an explicit influence radius:
/// max(floor, scale x largest dimension), in normalized units.
struct InfluenceRule {
  double floor = 0.3;
  double scale = 1.5;
};

struct Config {
  OptimizerParams optimizer;
  ObserverThresholds observer;
  int max_rounds = 4;
  bool concurrent_agents = true;
  /// Waypoint count the optimizer works at.
  std::size_t resolution = 64;
  InfluenceRule influence;
  InterpreterMode interpreter = InterpreterMode::Template;
  ExternalInterpreterConfig external;
  std::string host = "127.0.0.1";
  int port = 8080;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// JSON layout (every section and key optional, unknown keys rejected):
///   {"optimizer": {"k", "k_ang", "w_ext", "w_self", "eta", "max_iterations",
///                  "convergence_epsilon", "obstacle_range", "obstacle_gain"},
///    "observer": {"tau_d", "tau_c", "tau_v"},
///    "orchestrator": {"max_rounds", "concurrent"},
///    "resolution": 64,
///    "influence": {"floor", "scale"},
///    "interpreter": {"mode": "template" | "external", "endpoint", "model",
///                    "token", "timeout_s"},
///    "service": {"host", "port"}}
Config config_from_json(const Json& j);
Json config_to_json(const Config& config);

/// GEORESHAPE_ENDPOINT, GEORESHAPE_TOKEN and GEORESHAPE_MODEL override the
/// interpreter settings when set.
void apply_environment(Config& config);

/// Defaults when `path` is empty; environment overrides applied; validated.
Config load_config(const std::filesystem::path& path);

}  // namespace georeshape
