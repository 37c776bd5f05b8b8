#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <random>
#include <thread>

#include "httplib.h"

#include "georeshape/constraints.hpp"
#include "georeshape/errors.hpp"
#include "georeshape/interpreter.hpp"
#include "georeshape/serialization.hpp"

using namespace georeshape;

namespace {

Scene kitchen() {
  Scene s;
  s.objects.push_back({"table_01", "table", Cuboid{{0.5, 0.3, 0.05}}, Pose(), std::nullopt, 0.2});
  s.objects.push_back({"glass_01", "glass", Cylinder{0.05, 0.1}, Pose::translation({0.3, 0, 0.2}), std::nullopt, 0.9});
  s.objects.push_back({"glass_02", "glass", Cylinder{0.05, 0.1}, Pose::translation({-0.3, 0, 0.2}), std::nullopt, 0.9});
  s.objects.push_back({"chair_01", "chair", Cuboid{{0.2, 0.2, 0.4}}, Pose::translation({0, 1, 0}), std::nullopt, 0.1});
  return s;
}

Scene kitchen_single_glass() {
  Scene s = kitchen();
  s.objects.erase(s.objects.begin() + 2);
  return s;
}

// Chat-completion stand-in that replays queued replies.
class MockEndpoint {
 public:
  MockEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex_);
      requests_.push_back(req.body);
      auth_.push_back(req.get_header_value("Authorization"));
      if (replies_.empty()) {
        res.status = 500;
        return;
      }
      auto [status, content] = replies_.front();
      replies_.pop_front();
      res.status = status;
      const Json body = {{"choices", Json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockEndpoint() {
    server_.stop();
    thread_.join();
  }

  void push(std::string content, int status = 200) {
    std::lock_guard lock(mutex_);
    replies_.emplace_back(status, std::move(content));
  }

  ExternalInterpreterConfig config() const {
    ExternalInterpreterConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.token = "secret";
    c.timeout_s = 5.0;
    return c;
  }

  std::vector<std::string> requests() {
    std::lock_guard lock(mutex_);
    return requests_;
  }
  std::vector<std::string> auth() {
    std::lock_guard lock(mutex_);
    return auth_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  std::deque<std::pair<int, std::string>> replies_;
  std::vector<std::string> requests_;
  std::vector<std::string> auth_;
};

const char* kCloserToGlass =
    R"({"constraints": [{"kind": "distance", "sign": -1, "target": "glass_01"}]})";

}  // namespace

TEST(Document, CloserToGlass) {
  const ConstraintSet set = parse_constraint_document(kCloserToGlass, kitchen());
  ASSERT_EQ(set.constraints.size(), 1u);
  const Constraint& c = set.constraints[0];
  EXPECT_EQ(c.kind, ConstraintKind::ObjectDistance);
  EXPECT_EQ(c.sign, -1);
  EXPECT_EQ(c.target, "glass_01");
  EXPECT_DOUBLE_EQ(c.intensity, 1.0);
  EXPECT_DOUBLE_EQ(c.importance, 1.0);
  EXPECT_EQ(c.priority, 0);
}

TEST(Document, DefaultsFilled) {
  const ConstraintSet set = parse_constraint_document(
      R"({"constraints": [{"kind": "cartesian", "direction": [0, 0, 1], "target": null},
                          {"kind": "speed", "sign": 1, "target": "table", "importance": 0.5}]})",
      kitchen());
  EXPECT_DOUBLE_EQ(set.constraints[0].intensity, 1.0);
  EXPECT_FALSE(set.constraints[0].target.has_value());
  EXPECT_EQ(set.constraints[1].priority, 1);
  EXPECT_EQ(set.constraints[1].target, "table_01");
  EXPECT_DOUBLE_EQ(set.constraints[1].importance, 0.5);
}

TEST(Document, AmbiguousNameListsCandidates) {
  try {
    parse_constraint_document(R"({"constraints": [{"kind": "distance", "sign": 1, "target": "Glass"}]})",
                              kitchen());
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_EQ(e.candidates(), (std::vector<std::string>{"glass_01", "glass_02"}));
  }
}

TEST(Document, UnknownObjectListsEverything) {
  try {
    parse_constraint_document(R"({"constraints": [{"kind": "distance", "sign": 1, "target": "sofa"}]})",
                              kitchen());
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_EQ(e.candidates().size(), 4u);
  }
}

TEST(Document, FieldPathsOnSchemaViolations) {
  const Scene scene = kitchen();
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"constraints": [{"kind": "distance", "sign": 1, "target": "table", "intensity": 3}]})",
       "constraints[0].intensity"},
      {R"({"constraints": [{"kind": "cartesian", "direction": [1, 0, 0]},
                           {"kind": "speed", "sign": 2, "target": "table"}]})",
       "constraints[1].sign"},
      {R"({"constraints": [{"kind": "wobble"}]})", "constraints[0].kind"},
      {R"({"constraints": [{"kind": "speed", "sign": 1}]})", "constraints[0].target"},
      {R"({"constraints": []})", "constraints"},
      {R"({"constraints": [{"kind": "cartesian", "direction": [1, 0]}]})", "constraints[0].direction"},
      {R"({"constraints": [{"kind": "distance", "sign": 1, "target": "table", "importance": 0}]})",
       "constraints[0].importance"},
  };
  for (const auto& [doc, path] : cases) {
    try {
      parse_constraint_document(doc, scene);
      ADD_FAILURE() << "accepted " << doc;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.path(), path) << doc;
    }
  }
}

TEST(Document, SequencesMustBePermutations) {
  const Scene scene = kitchen();
  EXPECT_THROW(parse_interpreter_document(
                   R"({"constraints": [{"kind": "cartesian", "direction": [1, 0, 0]},
                                       {"kind": "cartesian", "direction": [0, 1, 0]}],
                       "sequences": [[0, 0]]})",
                   scene),
               ParseError);
  const auto r = parse_interpreter_document(
      R"({"constraints": [{"kind": "cartesian", "direction": [1, 0, 0]},
                          {"kind": "cartesian", "direction": [0, 1, 0]}],
          "sequences": [[1, 0]], "rationale": "why"})",
      scene);
  EXPECT_EQ(r.sequences, (std::vector<std::vector<std::size_t>>{{1, 0}}));
  EXPECT_EQ(r.rationale, "why");
}

TEST(Document, ParseSerializeRoundTrip) {
  const Scene scene = kitchen();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  const std::vector<Vec3> axes = {kRight, kLeft, kFront, kBack, kUp, kDown};
  const std::vector<std::string> ids = {"table_01", "glass_01", "glass_02", "chair_01"};
  for (int rep = 0; rep < 200; ++rep) {
    ConstraintSet set;
    set.source_command = "cmd " + std::to_string(rep);
    const int n = 1 + rep % 4;
    for (int i = 0; i < n; ++i) {
      Constraint c;
      c.kind = static_cast<ConstraintKind>((rep + i) % 3);
      if (c.kind == ConstraintKind::CartesianShift) {
        c.direction = axes[static_cast<std::size_t>(rng() % 6)];
        if (rng() % 2) c.target = ids[rng() % 4];
      } else {
        c.sign = rng() % 2 ? 1 : -1;
        c.target = ids[rng() % 4];
      }
      c.intensity = u(rng);
      c.importance = u(rng);
      c.priority = static_cast<int>(rng() % 5);
      set.constraints.push_back(c);
    }
    EXPECT_EQ(parse_constraint_document(serialize_constraint_document(set), scene), set);
  }
}

TEST(Template, GoMoreToTheRight) {
  const auto r = interpret_command_template("go more to the right", kitchen());
  ASSERT_EQ(r.constraint_set.constraints.size(), 1u);
  const Constraint& c = r.constraint_set.constraints[0];
  EXPECT_EQ(c.kind, ConstraintKind::CartesianShift);
  EXPECT_EQ(c.direction, kRight);
  EXPECT_DOUBLE_EQ(c.intensity, 1.0);
  EXPECT_FALSE(c.target.has_value());
}

TEST(Template, SlowDownNextToTable) {
  const auto r = interpret_command_template("slow down when next to the table", kitchen());
  ASSERT_EQ(r.constraint_set.constraints.size(), 1u);
  const Constraint& c = r.constraint_set.constraints[0];
  EXPECT_EQ(c.kind, ConstraintKind::SpeedChange);
  EXPECT_EQ(c.sign, -1);
  EXPECT_EQ(c.target, "table_01");
}

TEST(Template, TwoClausesKeepOrder) {
  const auto r = interpret_command_template("move closer to the chair and go slower near the glass",
                                            kitchen_single_glass());
  const auto& cs = r.constraint_set.constraints;
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].kind, ConstraintKind::ObjectDistance);
  EXPECT_EQ(cs[0].sign, -1);
  EXPECT_EQ(cs[0].target, "chair_01");
  EXPECT_EQ(cs[0].priority, 0);
  EXPECT_EQ(cs[1].kind, ConstraintKind::SpeedChange);
  EXPECT_EQ(cs[1].target, "glass_01");
  EXPECT_EQ(cs[1].priority, 1);
  EXPECT_EQ(r.constraint_set.source_command,
            "move closer to the chair and go slower near the glass");
}

TEST(Template, IntensityWordsAndJoiners) {
  const auto r = interpret_command_template(
      "go slightly up, then move a lot further from the table and then go down", kitchen());
  const auto& cs = r.constraint_set.constraints;
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_EQ(cs[0].direction, kUp);
  EXPECT_DOUBLE_EQ(cs[0].intensity, 0.5);
  EXPECT_EQ(cs[1].kind, ConstraintKind::ObjectDistance);
  EXPECT_EQ(cs[1].sign, 1);
  EXPECT_DOUBLE_EQ(cs[1].intensity, 1.5);
  EXPECT_EQ(cs[2].direction, kDown);
}

TEST(Template, LocalCartesianShift) {
  const auto r = interpret_command_template("go more to the left near the chair", kitchen());
  const Constraint& c = r.constraint_set.constraints.at(0);
  EXPECT_EQ(c.kind, ConstraintKind::CartesianShift);
  EXPECT_EQ(c.direction, kLeft);
  EXPECT_EQ(c.target, "chair_01");
}

TEST(Template, FailsLoudly) {
  EXPECT_THROW(interpret_command_template("", kitchen()), InterpretationError);
  EXPECT_THROW(interpret_command_template("make it prettier", kitchen()), InterpretationError);
  EXPECT_THROW(interpret_command_template("go right and dance", kitchen()), InterpretationError);
  EXPECT_THROW(interpret_command_template("go slower", kitchen()), InterpretationError);
  EXPECT_THROW(interpret_command_template("go closer to the sofa", kitchen()), ResolutionError);
}

TEST(Template, PureAndSchemaValid) {
  const Scene scene = kitchen_single_glass();
  const std::string cmd = "go faster near the glass, move away from the chair and go a bit back";
  const auto a = interpret_command_template(cmd, scene);
  const auto b = interpret_command_template(cmd, scene);
  EXPECT_EQ(a.constraint_set, b.constraint_set);
  EXPECT_NO_THROW(validate(a.constraint_set, scene));
  EXPECT_EQ(parse_constraint_document(serialize_constraint_document(a.constraint_set), scene),
            a.constraint_set);
}

TEST(External, ValidReplyMatchesDocumentParse) {
  MockEndpoint mock;
  mock.push(std::string("Here you go:\n") + kCloserToGlass);
  const auto r = interpret_command_external("get closer to the glass", kitchen(), mock.config());
  ConstraintSet expected = parse_constraint_document(kCloserToGlass, kitchen());
  expected.source_command = "get closer to the glass";
  EXPECT_EQ(r.constraint_set, expected);
  ASSERT_EQ(mock.requests().size(), 1u);
  const Json req = Json::parse(mock.requests()[0]);
  EXPECT_EQ(req.at("messages").at(0).at("content"), interpreter_system_prompt(kitchen()));
  EXPECT_EQ(req.at("messages").at(1).at("content"), "get closer to the glass");
  EXPECT_EQ(mock.auth()[0], "Bearer secret");
}

TEST(External, RetriesOnceAfterMalformedReply) {
  MockEndpoint mock;
  mock.push("I think you mean closer?");
  mock.push(kCloserToGlass);
  const auto r = interpret_command_external("closer to glass", kitchen(), mock.config());
  EXPECT_EQ(r.constraint_set.constraints.size(), 1u);
  const auto reqs = mock.requests();
  ASSERT_EQ(reqs.size(), 2u);
  const Json second = Json::parse(reqs[1]);
  EXPECT_EQ(second.at("messages").size(), 4u);
  EXPECT_NE(second.at("messages").at(3).at("content").get<std::string>().find("invalid"),
            std::string::npos);
}

TEST(External, TwoBadRepliesCarryBoth) {
  MockEndpoint mock;
  mock.push("nope");
  mock.push(R"({"constraints": [{"kind": "distance", "sign": 7, "target": "table"}]})");
  try {
    interpret_command_external("x", kitchen(), mock.config());
    FAIL() << "expected InterpretationError";
  } catch (const InterpretationError& e) {
    ASSERT_EQ(e.raw_replies().size(), 2u);
    EXPECT_EQ(e.raw_replies()[0], "nope");
  }
}

TEST(External, ImportanceClampedWithWarning) {
  MockEndpoint mock;
  mock.push(R"({"constraints": [{"kind": "speed", "sign": -1, "target": "table", "importance": 5.0}]})");
  const auto r = interpret_command_external("slow near table", kitchen(), mock.config());
  EXPECT_DOUBLE_EQ(r.constraint_set.constraints[0].importance, 2.0);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("clamped"), std::string::npos);
}

TEST(External, HttpErrorIsTransportError) {
  MockEndpoint mock;
  mock.push("", 401);
  EXPECT_THROW(interpret_command_external("x", kitchen(), mock.config()), TransportError);
}

TEST(External, UnreachableIsTransportError) {
  ExternalInterpreterConfig c;
  {
    // Grab a free port and release it so nothing listens there.
    httplib::Server s;
    c.endpoint = "http://127.0.0.1:" + std::to_string(s.bind_to_any_port("127.0.0.1")) + "/v1";
  }
  c.timeout_s = 1.0;
  EXPECT_THROW(interpret_command_external("x", kitchen(), c), TransportError);
  c.endpoint = "not a url";
  EXPECT_THROW(interpret_command_external("x", kitchen(), c), TransportError);
}

TEST(External, ConcurrentRequests) {
  MockEndpoint mock;
  for (int i = 0; i < 8; ++i) mock.push(kCloserToGlass);
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (interpret_command_external("c", kitchen(), mock.config()).constraint_set.constraints.size() == 1) ++ok;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 8);
}

TEST(SystemPrompt, ListsObjectsAndSchema) {
  const std::string p = interpreter_system_prompt(kitchen());
  for (const char* s : {"glass_01", "chair_01", "cuboid", "0.9", "\"constraints\"", "+x right"}) {
    EXPECT_NE(p.find(s), std::string::npos) << s;
  }
}
