#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "georeshape/errors.hpp"
#include "georeshape/pipeline.hpp"

namespace httplib {
class Server;
}

namespace georeshape {

class SessionNotFound : public Error {
 public:
  explicit SessionNotFound(const std::string& id) : Error("unknown session '" + id + "'") {}
};

/// Request that does not fit the session's current state (nothing to
/// accept, nothing to undo).
class SessionConflict : public Error {
 public:
  using Error::Error;
};

/// In-memory interactive sessions. Calls on one session are serialized;
/// different sessions proceed independently.
class SessionStore {
 public:
  explicit SessionStore(Config config);

  std::string create(Scene scene, Trajectory trajectory);

  /// Reshapes the current trajectory and keeps the latest round's four
  /// candidates pending. Returns them with their check outcomes.
  Json post_command(const std::string& id, const CommandInput& input);
  /// Commits the pending candidate of `agent` as the current trajectory.
  Json accept(const std::string& id, AgentKind agent);
  /// Reverts the last accept.
  Json undo(const std::string& id);
  Json state(const std::string& id) const;

  Trajectory current(const std::string& id) const;
  /// Re-runs every accepted command from the initial trajectory.
  Trajectory replay(const std::string& id) const;

 private:
  struct Candidate {
    AgentReport report;
    Trajectory world;
  };
  struct Pending {
    Json input;
    CommandInput command;
    std::vector<Candidate> candidates;
    Json interpretation;
  };
  struct HistoryEntry {
    Json input;
    CommandInput command;
    AgentKind agent;
    Trajectory before;
  };
  struct Session {
    Session(std::string id_, Scene scene_, const Trajectory& trajectory)
        : id(std::move(id_)), scene(std::move(scene_)), initial(trajectory), current(trajectory) {}

    std::string id;
    Scene scene;
    Trajectory initial;
    Trajectory current;
    std::vector<HistoryEntry> history;
    std::optional<Pending> pending;
    mutable std::mutex mutex;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  Json state_locked(const Session& s) const;
  std::vector<Candidate> run_round(const Session& s, const Trajectory& from,
                                   const CommandInput& input, Json* interpretation) const;

  Config config_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

struct HttpResponse {
  int status = 200;
  Json body;
};

/// Routes one request. Exposed so handlers can be tested without sockets.
HttpResponse handle_request(SessionStore& store, const std::string& method,
                            const std::string& path, const std::string& body);

/// HTTP front end:
///   POST /sessions                {"scene", "trajectory"} -> 201 {"id"}
///   POST /sessions/{id}/commands  {"command"} | {"constraints"}
///   POST /sessions/{id}/accept    {"agent"}
///   POST /sessions/{id}/undo
///   GET  /sessions/{id}
/// Errors: 404 unknown session or route, 400 malformed payload (with
/// "path"), 409 state conflict, 422 uninterpretable command, 502 interpreter
/// transport failure, 500 numeric failure.
class Service {
 public:
  explicit Service(Config config);
  ~Service();

  /// Binds to `host`:`port` (0 picks a free port) and returns the port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

  SessionStore& store() { return store_; }

 private:
  SessionStore store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace georeshape
