#include "georeshape/interpreter.hpp"

#include <regex>
#include <sstream>

#include "httplib.h"

#include "georeshape/errors.hpp"
#include "georeshape/serialization.hpp"

namespace georeshape {

namespace {

constexpr double kMinClampedImportance = 0.01;

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    throw TransportError("invalid interpreter endpoint '" + url + "'");
  }
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::string extract_document(const std::string& content) {
  const auto first = content.find('{');
  const auto last = content.rfind('}');
  if (first == std::string::npos || last == std::string::npos || last < first) {
    throw ParseError("", "reply contains no JSON object");
  }
  return content.substr(first, last - first + 1);
}

// Clamps importance into (0, 2] in place; returns one warning per change.
std::vector<std::string> clamp_importance(Json& doc) {
  std::vector<std::string> warnings;
  if (!doc.is_object() || !doc.contains("constraints") || !doc["constraints"].is_array()) {
    return warnings;
  }
  auto& arr = doc["constraints"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_object() || !arr[i].contains("importance") ||
        !arr[i]["importance"].is_number()) {
      continue;
    }
    const double v = arr[i]["importance"].get<double>();
    double clamped = v;
    if (v > kMaxImportance) clamped = kMaxImportance;
    if (!(v > 0.0)) clamped = kMinClampedImportance;
    if (clamped != v) {
      std::ostringstream msg;
      msg << "constraints[" << i << "].importance " << v << " clamped to " << clamped;
      warnings.push_back(msg.str());
      arr[i]["importance"] = clamped;
    }
  }
  return warnings;
}

InterpreterResult parse_reply(const std::string& content, const std::string& command,
                              const Scene& scene) {
  Json doc;
  try {
    doc = Json::parse(extract_document(content));
  } catch (const Json::parse_error& e) {
    throw ParseError("", std::string("malformed document: ") + e.what());
  }
  auto warnings = clamp_importance(doc);
  if (doc.is_object() && !doc.contains("source_command")) doc["source_command"] = command;
  InterpreterResult result = parse_interpreter_document(doc.dump(), scene);
  result.warnings = std::move(warnings);
  return result;
}

class ChatClient {
 public:
  explicit ChatClient(const ExternalInterpreterConfig& config)
      : config_(config), endpoint_(split_url(config.endpoint)), client_(endpoint_.base) {
    const auto seconds = static_cast<time_t>(config.timeout_s);
    const auto micros = static_cast<time_t>((config.timeout_s - static_cast<double>(seconds)) * 1e6);
    client_.set_connection_timeout(seconds, micros);
    client_.set_read_timeout(seconds, micros);
    client_.set_write_timeout(seconds, micros);
    if (!config.token.empty()) client_.set_bearer_token_auth(config.token);
  }

  std::string complete(const Json& messages) {
    const Json body = {{"model", config_.model}, {"temperature", 0}, {"messages", messages}};
    auto res = client_.Post(endpoint_.path, body.dump(), "application/json");
    if (!res) {
      throw TransportError("interpreter request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw TransportError("interpreter endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
      const Json reply = Json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception& e) {
      throw TransportError(std::string("unexpected completion payload: ") + e.what());
    }
  }

 private:
  ExternalInterpreterConfig config_;
  Endpoint endpoint_;
  httplib::Client client_;
};

}  // namespace

std::string interpreter_system_prompt(const Scene& scene) {
  std::ostringstream out;
  out << "You translate a user's instruction for reshaping a robot trajectory into "
         "constraints. Reply with one JSON object and nothing else:\n"
         "{\"constraints\": [{\"kind\": \"cartesian\" | \"speed\" | \"distance\",\n"
         "                    \"direction\": [x, y, z],  (cartesian only)\n"
         "                    \"sign\": 1 | -1,          (speed: 1 faster, -1 slower; "
         "distance: 1 farther, -1 closer)\n"
         "                    \"target\": \"<object id>\" | null,\n"
         "                    \"intensity\": number in (0, 2], 1 is neutral,\n"
         "                    \"importance\": number in (0, 2], from the significance and "
         "fragility of the involved objects,\n"
         "                    \"priority\": integer, 0 executes first}],\n"
         " \"sequences\": [[constraint indices], ...]  (optional alternative orders, most "
         "important first),\n"
         " \"rationale\": \"short explanation\"}\n"
         "Axes: +x right, -x left, +y front, -y back, +z up, -z down.\n"
         "speed and distance constraints must name a target; cartesian constraints may name "
         "one to restrict the shift to the region near that object.\n"
         "Objects in the scene (id, name, shape, fragility in [0, 1]):\n";
  for (const auto& o : scene.objects) {
    out << "- " << o.id << ", " << o.name << ", " << shape_name(o.primitive) << ", "
        << o.fragility << "\n";
  }
  return out.str();
}

InterpreterResult interpret_command_external(const std::string& command, const Scene& scene,
                                             const ExternalInterpreterConfig& config) {
  ChatClient client(config);
  Json messages = Json::array({
      {{"role", "system"}, {"content", interpreter_system_prompt(scene)}},
      {{"role", "user"}, {"content", command}},
  });

  const std::string first = client.complete(messages);
  std::string first_error;
  try {
    return parse_reply(first, command, scene);
  } catch (const Error& e) {
    first_error = e.what();
  }

  messages.push_back({{"role", "assistant"}, {"content", first}});
  messages.push_back({{"role", "user"},
                      {"content", "That reply was invalid (" + first_error +
                                      "). Reply again with only the corrected JSON object."}});
  const std::string second = client.complete(messages);
  try {
    return parse_reply(second, command, scene);
  } catch (const Error& e) {
    throw InterpretationError("interpreter reply invalid twice: " + first_error + "; " + e.what(),
                              {first, second});
  }
}

}  // namespace georeshape
