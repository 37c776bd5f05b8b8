#include "georeshape/service.hpp"

#include <regex>

#include "httplib.h"

#include "georeshape/errors.hpp"

namespace georeshape {

namespace {

ParseError prefixed(const std::string& prefix, const ParseError& e) {
  const std::string path = e.path().empty() ? prefix : prefix + "." + e.path();
  std::string what = e.what();
  if (!e.path().empty() && what.rfind(e.path() + ": ", 0) == 0) what = what.substr(e.path().size() + 2);
  return ParseError(path, what);
}

CommandInput command_from_json(const Json& body) {
  if (!body.is_object()) throw ParseError("", "expected an object");
  for (const auto& [key, value] : body.items()) {
    if (key != "command" && key != "constraints") throw ParseError(key, "unknown field");
  }
  CommandInput input;
  if (body.contains("command")) {
    if (!body.at("command").is_string()) throw ParseError("command", "expected a string");
    input.command = body.at("command").get<std::string>();
  }
  if (body.contains("constraints")) input.constraints = body.at("constraints");
  if (input.command.has_value() == input.constraints.has_value()) {
    throw ParseError("command", "give exactly one of 'command' or 'constraints'");
  }
  return input;
}

Json error_body(const std::string& message, const std::optional<std::string>& path = {}) {
  Json j = {{"error", message}};
  if (path) j["path"] = *path;
  return j;
}

}  // namespace

SessionStore::SessionStore(Config config) : config_(std::move(config)) { config_.validate(); }

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound(id);
  return it->second;
}

std::string SessionStore::create(Scene scene, Trajectory trajectory) {
  validate(scene);
  std::unique_lock lock(sessions_mutex_);
  const std::string id = "s" + std::to_string(next_id_++);
  auto session = std::make_shared<Session>(id, std::move(scene), trajectory);
  sessions_.emplace(id, std::move(session));
  return id;
}

std::vector<SessionStore::Candidate> SessionStore::run_round(const Session& s,
                                                             const Trajectory& from,
                                                             const CommandInput& input,
                                                             Json* interpretation) const {
  const ReshapeResult result = reshape(from.rebased(), s.scene, input, config_);
  const auto& orch = result.orchestration;
  std::vector<Candidate> out;
  for (const auto& r : orch.reports) {
    if (r.round != orch.rounds_run) continue;
    out.push_back({r, to_world(r.candidate, result.transform, from.size())});
  }
  if (interpretation) {
    Json warnings = Json::array();
    for (const auto& w : result.interpretation.warnings) warnings.push_back(w);
    *interpretation = {{"constraints", constraint_set_to_json(result.interpretation.constraint_set)},
                       {"rationale", result.interpretation.rationale},
                       {"warnings", warnings},
                       {"success", orch.success()},
                       {"round", orch.rounds_run}};
  }
  return out;
}

Json SessionStore::post_command(const std::string& id, const CommandInput& input) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  Json interpretation;
  auto candidates = run_round(*s, s->current, input, &interpretation);
  Json input_json = input.command ? Json{{"command", *input.command}}
                                  : Json{{"constraints", *input.constraints}};
  s->pending = Pending{input_json, input, std::move(candidates), interpretation};

  Json list = Json::array();
  for (const auto& c : s->pending->candidates) {
    Json entry = report_summary_to_json(c.report);
    entry["trajectory"] = trajectory_to_json(c.world);
    list.push_back(entry);
  }
  Json out = interpretation;
  out["candidates"] = list;
  return out;
}

Json SessionStore::accept(const std::string& id, AgentKind agent) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (!s->pending) throw SessionConflict("no pending candidates to accept");
  const auto it = std::find_if(s->pending->candidates.begin(), s->pending->candidates.end(),
                               [&](const Candidate& c) { return c.report.agent == agent; });
  if (it == s->pending->candidates.end()) {
    throw SessionConflict("no pending candidate from agent '" + to_string(agent) + "'");
  }
  s->history.push_back({s->pending->input, s->pending->command, agent, s->current});
  s->current = it->world;
  s->pending.reset();
  return state_locked(*s);
}

Json SessionStore::undo(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->history.empty()) throw SessionConflict("nothing to undo");
  s->current = s->history.back().before;
  s->history.pop_back();
  s->pending.reset();
  return state_locked(*s);
}

Json SessionStore::state(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return state_locked(*s);
}

Json SessionStore::state_locked(const Session& s) const {
  Json history = Json::array();
  for (const auto& h : s.history) {
    history.push_back({{"input", h.input}, {"agent", to_string(h.agent)}});
  }
  Json pending = nullptr;
  if (s.pending) {
    Json list = Json::array();
    for (const auto& c : s.pending->candidates) {
      Json entry = report_summary_to_json(c.report);
      entry["trajectory"] = trajectory_to_json(c.world);
      list.push_back(entry);
    }
    pending = {{"input", s.pending->input},
               {"interpretation", s.pending->interpretation},
               {"candidates", list}};
  }
  return {{"id", s.id},
          {"scene", scene_to_json(s.scene)},
          {"initial_trajectory", trajectory_to_json(s.initial)},
          {"current_trajectory", trajectory_to_json(s.current)},
          {"history", history},
          {"pending", pending}};
}

Trajectory SessionStore::current(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return s->current;
}

Trajectory SessionStore::replay(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  Trajectory t = s->initial;
  for (const auto& h : s->history) {
    const auto candidates = run_round(*s, t, h.command, nullptr);
    const auto it = std::find_if(candidates.begin(), candidates.end(),
                                 [&](const Candidate& c) { return c.report.agent == h.agent; });
    if (it == candidates.end()) throw Error("replay lost the candidate of " + to_string(h.agent));
    t = it->world;
  }
  return t;
}

HttpResponse handle_request(SessionStore& store, const std::string& method,
                            const std::string& path, const std::string& body) {
  static const std::regex session_route(R"(^/sessions/([^/]+)(/(commands|accept|undo))?$)");
  auto parse_body = [&]() {
    try {
      return body.empty() ? Json::object() : Json::parse(body);
    } catch (const Json::parse_error& e) {
      throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
  };

  try {
    if (path == "/sessions") {
      if (method != "POST") return {405, error_body("method not allowed")};
      const Json j = parse_body();
      if (!j.is_object()) throw ParseError("", "expected an object");
      for (const auto& [key, value] : j.items()) {
        if (key != "scene" && key != "trajectory") throw ParseError(key, "unknown field");
      }
      if (!j.contains("scene")) throw ParseError("scene", "missing field");
      if (!j.contains("trajectory")) throw ParseError("trajectory", "missing field");
      Scene scene;
      try {
        scene = scene_from_json(j.at("scene"));
      } catch (const ParseError& e) {
        throw prefixed("scene", e);
      }
      Trajectory trajectory = trajectory_from_json(j.at("trajectory"), "trajectory");
      return {201, {{"id", store.create(std::move(scene), std::move(trajectory))}}};
    }

    std::smatch m;
    if (!std::regex_match(path, m, session_route)) return {404, error_body("no route " + path)};
    const std::string id = m[1].str();
    const std::string action = m[3].str();

    if (action.empty()) {
      if (method != "GET") return {405, error_body("method not allowed")};
      return {200, store.state(id)};
    }
    if (method != "POST") return {405, error_body("method not allowed")};
    if (action == "commands") return {200, store.post_command(id, command_from_json(parse_body()))};
    if (action == "undo") return {200, store.undo(id)};

    const Json j = parse_body();
    if (!j.is_object() || !j.contains("agent") || !j.at("agent").is_string()) {
      throw ParseError("agent", "expected an agent name");
    }
    AgentKind agent;
    try {
      agent = agent_kind_from_string(j.at("agent").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError("agent", e.what());
    }
    return {200, store.accept(id, agent)};
  } catch (const SessionNotFound& e) {
    return {404, error_body(e.what())};
  } catch (const SessionConflict& e) {
    return {409, error_body(e.what())};
  } catch (const ParseError& e) {
    return {400, error_body(e.what(), e.path())};
  } catch (const ResolutionError& e) {
    return {422, error_body(e.what())};
  } catch (const InterpretationError& e) {
    return {422, error_body(e.what())};
  } catch (const TransportError& e) {
    return {502, error_body(e.what())};
  } catch (const NumericError& e) {
    return {500, error_body(e.what())};
  } catch (const std::invalid_argument& e) {
    return {400, error_body(e.what(), std::string())};
  }
}

Service::Service(Config config)
    : store_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle_request(store_, req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(R"(/.*)", handler);
  server_->Post(R"(/.*)", handler);
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace georeshape
