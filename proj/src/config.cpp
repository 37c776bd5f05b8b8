#include "georeshape/config.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>

#include "georeshape/errors.hpp"
#include "georeshape/io.hpp"

namespace georeshape {

namespace {

using Setter = std::function<void(const Json&, const std::string&)>;

void apply_section(const Json& j, const std::string& path,
                   const std::map<std::string, Setter>& setters) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string p = path.empty() ? key : path + "." + key;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError(p, "unknown key");
    it->second(value, p);
  }
}

Setter real(double& target) {
  return [&target](const Json& v, const std::string& p) {
    if (!v.is_number()) throw ParseError(p, "expected a number");
    target = v.get<double>();
  };
}

Setter integer(int& target) {
  return [&target](const Json& v, const std::string& p) {
    if (!v.is_number_integer()) throw ParseError(p, "expected an integer");
    target = v.get<int>();
  };
}

Setter boolean(bool& target) {
  return [&target](const Json& v, const std::string& p) {
    if (!v.is_boolean()) throw ParseError(p, "expected a boolean");
    target = v.get<bool>();
  };
}

Setter text(std::string& target) {
  return [&target](const Json& v, const std::string& p) {
    if (!v.is_string()) throw ParseError(p, "expected a string");
    target = v.get<std::string>();
  };
}

Setter section(const std::map<std::string, Setter>& setters) {
  return [setters](const Json& v, const std::string& p) { apply_section(v, p, setters); };
}

}  // namespace

std::string to_string(InterpreterMode mode) {
  return mode == InterpreterMode::External ? "external" : "template";
}

InterpreterMode interpreter_mode_from_string(const std::string& text) {
  if (text == "template") return InterpreterMode::Template;
  if (text == "external") return InterpreterMode::External;
  throw std::invalid_argument("interpreter must be 'template' or 'external', got '" + text + "'");
}

void Config::validate() const {
  optimizer.validate();
  if (!(observer.distance > 0.0 && observer.cartesian > 0.0 && observer.speed > 0.0)) {
    throw std::invalid_argument("observer thresholds must be > 0");
  }
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (resolution < Trajectory::kMinWaypoints) throw std::invalid_argument("resolution must be >= 4");
  if (!(influence.floor > 0.0 && influence.scale > 0.0)) {
    throw std::invalid_argument("influence rule values must be > 0");
  }
  if (!(external.timeout_s > 0.0)) throw std::invalid_argument("timeout_s must be > 0");
  if (port < 0 || port > 65535) throw std::invalid_argument("port must lie in [0, 65535]");
}

Config config_from_json(const Json& j) {
  Config c;
  std::string mode = to_string(c.interpreter);
  int resolution = static_cast<int>(c.resolution);
  apply_section(
      j, "",
      {{"optimizer", section({{"k", real(c.optimizer.k)},
                              {"k_ang", real(c.optimizer.k_ang)},
                              {"w_ext", real(c.optimizer.w_ext)},
                              {"w_self", real(c.optimizer.w_self)},
                              {"eta", real(c.optimizer.eta)},
                              {"max_iterations", integer(c.optimizer.max_iterations)},
                              {"convergence_epsilon", real(c.optimizer.convergence_epsilon)},
                              {"obstacle_range", real(c.optimizer.obstacle_range)},
                              {"obstacle_gain", real(c.optimizer.obstacle_gain)}})},
       {"observer", section({{"tau_d", real(c.observer.distance)},
                             {"tau_c", real(c.observer.cartesian)},
                             {"tau_v", real(c.observer.speed)}})},
       {"orchestrator",
        section({{"max_rounds", integer(c.max_rounds)}, {"concurrent", boolean(c.concurrent_agents)}})},
       {"resolution", integer(resolution)},
       {"influence", section({{"floor", real(c.influence.floor)}, {"scale", real(c.influence.scale)}})},
       {"interpreter", section({{"mode", text(mode)},
                                {"endpoint", text(c.external.endpoint)},
                                {"model", text(c.external.model)},
                                {"token", text(c.external.token)},
                                {"timeout_s", real(c.external.timeout_s)}})},
       {"service", section({{"host", text(c.host)}, {"port", integer(c.port)}})}});
  try {
    c.interpreter = interpreter_mode_from_string(mode);
  } catch (const std::invalid_argument& e) {
    throw ParseError("interpreter.mode", e.what());
  }
  if (resolution < 0) throw ParseError("resolution", "must be >= 4");
  c.resolution = static_cast<std::size_t>(resolution);
  return c;
}

Json config_to_json(const Config& c) {
  return {{"optimizer",
           {{"k", c.optimizer.k},
            {"k_ang", c.optimizer.k_ang},
            {"w_ext", c.optimizer.w_ext},
            {"w_self", c.optimizer.w_self},
            {"eta", c.optimizer.eta},
            {"max_iterations", c.optimizer.max_iterations},
            {"convergence_epsilon", c.optimizer.convergence_epsilon},
            {"obstacle_range", c.optimizer.obstacle_range},
            {"obstacle_gain", c.optimizer.obstacle_gain}}},
          {"observer",
           {{"tau_d", c.observer.distance}, {"tau_c", c.observer.cartesian}, {"tau_v", c.observer.speed}}},
          {"orchestrator", {{"max_rounds", c.max_rounds}, {"concurrent", c.concurrent_agents}}},
          {"resolution", c.resolution},
          {"influence", {{"floor", c.influence.floor}, {"scale", c.influence.scale}}},
          {"interpreter",
           {{"mode", to_string(c.interpreter)},
            {"endpoint", c.external.endpoint},
            {"model", c.external.model},
            {"token", c.external.token},
            {"timeout_s", c.external.timeout_s}}},
          {"service", {{"host", c.host}, {"port", c.port}}}};
}

void apply_environment(Config& config) {
  if (const char* v = std::getenv("GEORESHAPE_ENDPOINT"); v && *v) config.external.endpoint = v;
  if (const char* v = std::getenv("GEORESHAPE_TOKEN"); v && *v) config.external.token = v;
  if (const char* v = std::getenv("GEORESHAPE_MODEL"); v && *v) config.external.model = v;
}

Config load_config(const std::filesystem::path& path) {
  Config c = path.empty() ? Config{} : config_from_json(read_json_file(path));
  apply_environment(c);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.filename().string(), e.what());
  }
  return c;
}

}  // namespace georeshape
