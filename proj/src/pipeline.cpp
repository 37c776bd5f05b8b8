#include "georeshape/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "georeshape/errors.hpp"
#include "georeshape/interpreter.hpp"
#include "georeshape/io.hpp"

namespace georeshape {

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

Json optional_round(const std::optional<int>& r) { return r ? Json(*r) : Json(nullptr); }

}  // namespace

Scene apply_influence_rule(Scene scene, const InfluenceRule& rule) {
  for (auto& obj : scene.objects) {
    if (!obj.influence_radius) {
      obj.influence_radius = std::max(rule.floor, rule.scale * largest_dimension(obj.primitive));
    }
  }
  return scene;
}

InterpreterResult interpret(const CommandInput& input, const Scene& scene, const Config& config) {
  if (input.command.has_value() == input.constraints.has_value()) {
    throw std::invalid_argument("give exactly one of a command or a constraint document");
  }
  if (input.constraints) {
    InterpreterResult r = parse_interpreter_document(input.constraints->dump(), scene);
    if (r.rationale.empty()) r.rationale = "constraint document";
    return r;
  }
  if (config.interpreter == InterpreterMode::External) {
    return interpret_command_external(*input.command, scene, config.external);
  }
  return interpret_command_template(*input.command, scene);
}

Trajectory to_world(const Trajectory& candidate, const NormalizationTransform& transform,
                    std::size_t n) {
  return resample(denormalize(candidate, transform), n);
}

ReshapeResult reshape(const Trajectory& trajectory, const Scene& scene, const CommandInput& input,
                      const Config& config) {
  validate(scene);
  const NormalizedScene normalized = normalize_scene(trajectory, scene);
  const Trajectory working = resample(normalized.trajectory, config.resolution);
  const Scene working_scene = apply_influence_rule(normalized.scene, config.influence);

  InterpreterResult interpretation = interpret(input, working_scene, config);
  OrchestrateOptions options;
  options.max_rounds = config.max_rounds;
  options.thresholds = config.observer;
  options.sequences = interpretation.sequences;
  options.concurrent = config.concurrent_agents;
  OrchestrationResult orchestration =
      orchestrate(working, interpretation.constraint_set, working_scene, config.optimizer, options);
  Trajectory world = to_world(orchestration.best.candidate, normalized.transform, trajectory.size());
  return {std::move(interpretation), std::move(orchestration), normalized.transform,
          std::move(world)};
}

Json outcome_to_json(const CheckOutcome& o) {
  return {{"constraint", o.constraint_id},
          {"kind", to_string(o.kind)},
          {"measured", o.measured},
          {"threshold", o.threshold},
          {"passed", o.passed}};
}

Json report_summary_to_json(const AgentReport& report) {
  Json outcomes = Json::array();
  for (const auto& o : report.outcomes) outcomes.push_back(outcome_to_json(o));
  return {{"agent", to_string(report.agent)},
          {"round", report.round},
          {"passed", report.all_passed()},
          {"passed_checks", report.passed_count()},
          {"deviation", report.deviation},
          {"outcomes", outcomes}};
}

Json reshape_report_to_json(const ReshapeResult& result) {
  const auto& orch = result.orchestration;
  Json reports = Json::array();
  for (const auto& r : orch.reports) reports.push_back(report_summary_to_json(r));
  Json agent_rounds = Json::object();
  for (std::size_t i = 0; i < kAllAgents.size(); ++i) {
    agent_rounds[to_string(kAllAgents[i])] = optional_round(orch.agent_success_round[i]);
  }
  Json warnings = Json::array();
  for (const auto& w : result.interpretation.warnings) warnings.push_back(w);
  return {{"success", orch.success()},
          {"success_round", optional_round(orch.success_round)},
          {"rounds_run", orch.rounds_run},
          {"best", report_summary_to_json(orch.best)},
          {"agent_success_round", agent_rounds},
          {"constraints", constraint_set_to_json(result.interpretation.constraint_set)},
          {"rationale", result.interpretation.rationale},
          {"warnings", warnings},
          {"normalization",
           {{"spatial_center", vec3_to_json(result.transform.spatial_center)},
            {"spatial_scale", result.transform.spatial_scale},
            {"speed_scale", result.transform.speed_scale}}},
          {"reports", reports}};
}

RegistrationOutcome register_directory(const std::filesystem::path& dir,
                                       const RegistrationParams& params) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> clouds;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_point_cloud_file(entry.path())) clouds.push_back(entry.path());
  }
  if (clouds.empty()) throw Error("no point cloud files in " + dir.string());
  std::sort(clouds.begin(), clouds.end());

  RegistrationOutcome out;
  std::set<std::string> ids;
  for (const auto& path : clouds) {
    try {
      SceneObject obj = register_object(read_labeled_cloud(path), params);
      std::string id = obj.id;
      for (int k = 2; ids.count(id); ++k) id = obj.id + "_" + std::to_string(k);
      obj.id = id;
      ids.insert(id);
      out.scene.objects.push_back(std::move(obj));
    } catch (const std::exception& e) {
      out.warnings.push_back(path.filename().string() + ": " + e.what());
    }
  }
  return out;
}

double EvaluationResult::agent_first_round_rate(AgentKind agent) const {
  if (samples.empty()) return 0.0;
  const auto slot = static_cast<std::size_t>(agent);
  const auto n = std::count_if(samples.begin(), samples.end(), [&](const SampleResult& s) {
    return s.agent_success_round[slot] == 1;
  });
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

double EvaluationResult::agent_final_round_rate(AgentKind agent) const {
  if (samples.empty()) return 0.0;
  const auto slot = static_cast<std::size_t>(agent);
  const auto n = std::count_if(samples.begin(), samples.end(), [&](const SampleResult& s) {
    return s.agent_success_round[slot].has_value();
  });
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

double EvaluationResult::orchestrator_rate(int round) const {
  if (samples.empty()) return 0.0;
  const auto n = std::count_if(samples.begin(), samples.end(), [&](const SampleResult& s) {
    return s.success_round && *s.success_round <= round;
  });
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

EvaluationResult evaluate_samples(const std::vector<Sample>& samples, const Config& config) {
  EvaluationResult result;
  result.max_rounds = config.max_rounds;
  OrchestrateOptions options;
  options.max_rounds = config.max_rounds;
  options.thresholds = config.observer;
  options.exhaustive = true;
  options.concurrent = config.concurrent_agents;

  for (const auto& sample : samples) {
    SampleResult record;
    record.seed = sample.seed;
    record.kind = sample.kind;
    try {
      const Scene scene = apply_influence_rule(sample.scene, config.influence);
      const InterpreterResult ir = interpret({sample.command_text, std::nullopt}, scene, config);
      const Trajectory working = sample.trajectory.size() == config.resolution
                                     ? sample.trajectory.rebased()
                                     : resample(sample.trajectory, config.resolution);
      OrchestrateOptions opts = options;
      opts.sequences = ir.sequences;
      const OrchestrationResult orch =
          orchestrate(working, ir.constraint_set, scene, config.optimizer, opts);
      record.success_round = orch.success_round;
      record.agent_success_round = orch.agent_success_round;
    } catch (const std::exception& e) {
      record.error = e.what();
    }
    result.samples.push_back(std::move(record));
  }
  return result;
}

Json evaluation_to_json(const EvaluationResult& result) {
  Json agents = Json::object();
  for (AgentKind a : kAllAgents) {
    agents[to_string(a)] = {{"first_round", result.agent_first_round_rate(a)},
                            {"final_round", result.agent_final_round_rate(a)}};
  }
  Json by_round = Json::array();
  for (int r = 1; r <= result.max_rounds; ++r) by_round.push_back(result.orchestrator_rate(r));
  Json samples = Json::array();
  for (const auto& s : result.samples) {
    Json rounds = Json::object();
    for (std::size_t i = 0; i < kAllAgents.size(); ++i) {
      rounds[to_string(kAllAgents[i])] = optional_round(s.agent_success_round[i]);
    }
    Json entry = {{"seed", s.seed},
                  {"kind", to_string(s.kind)},
                  {"success_round", optional_round(s.success_round)},
                  {"agent_success_round", rounds}};
    if (!s.error.empty()) entry["error"] = s.error;
    samples.push_back(entry);
  }
  return {{"sample_count", result.samples.size()},
          {"max_rounds", result.max_rounds},
          {"agents", agents},
          {"orchestrator", {{"by_round", by_round}, {"final_round", result.orchestrator_rate(result.max_rounds)}}},
          {"samples", samples}};
}

std::string evaluation_table(const EvaluationResult& result) {
  std::string out = "samples: " + std::to_string(result.samples.size()) + "\n";
  out += pad("agent", 22) + pad("round 1", 10) + "final\n";
  for (AgentKind a : kAllAgents) {
    out += pad(to_string(a), 22) + pad(fixed3(result.agent_first_round_rate(a)), 10) +
           fixed3(result.agent_final_round_rate(a)) + "\n";
  }
  out += pad("orchestrator", 22) + pad(fixed3(result.orchestrator_rate(1)), 10) +
         fixed3(result.orchestrator_rate(result.max_rounds)) + "\n";
  out += "orchestrator by round:";
  for (int r = 1; r <= result.max_rounds; ++r) {
    out += " " + std::to_string(r) + "=" + fixed3(result.orchestrator_rate(r));
  }
  out += "\n";
  return out;
}

}  // namespace georeshape
