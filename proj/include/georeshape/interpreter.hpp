#pragma once

#include <string>

#include "georeshape/constraints.hpp"

namespace georeshape {

/// Chat-completion endpoint settings. Requests follow the common
/// {"model", "messages": [{"role", "content"}]} shape and replies are read
/// from choices[0].message.content.
struct ExternalInterpreterConfig {
  std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string token;
  double timeout_s = 30.0;
};

/// The fixed system prompt: the constraint document schema, the axis
/// convention and the scene's object list.
std::string interpreter_system_prompt(const Scene& scene);

/// Sends `command` to the endpoint and parses the reply as a constraint
/// document. A reply that fails to parse is retried once with the error
/// appended. Importance values outside (0, 2] are clamped with a warning.
///
/// Throws TransportError on network/HTTP failures and InterpretationError
/// (carrying both raw replies) after two unparseable replies.
InterpreterResult interpret_command_external(const std::string& command, const Scene& scene,
                                             const ExternalInterpreterConfig& config);

}  // namespace georeshape
