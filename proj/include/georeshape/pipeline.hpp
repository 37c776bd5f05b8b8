#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "georeshape/agents.hpp"
#include "georeshape/config.hpp"
#include "georeshape/dataset.hpp"
#include "georeshape/registration.hpp"

namespace georeshape {

/// A natural-language command or a constraint document, exactly one set.
struct CommandInput {
  std::optional<std::string> command;
  std::optional<Json> constraints;
};

/// Fills unset influence radii with the configured rule.
Scene apply_influence_rule(Scene scene, const InfluenceRule& rule);

/// Runs the configured interpreter, or parses the constraint document.
InterpreterResult interpret(const CommandInput& input, const Scene& scene, const Config& config);

struct ReshapeResult {
  InterpreterResult interpretation;
  /// Normalized frame, working resolution.
  OrchestrationResult orchestration;
  NormalizationTransform transform;
  /// Best candidate in the world frame at the input resolution.
  Trajectory trajectory;
};

/// Normalize, resample to the working resolution, interpret, orchestrate,
/// then map the best candidate back to the world frame and the input
/// resolution.
ReshapeResult reshape(const Trajectory& trajectory, const Scene& scene, const CommandInput& input,
                      const Config& config);

/// Candidate of the working-resolution normalized frame mapped back to the
/// world frame at `n` waypoints.
Trajectory to_world(const Trajectory& candidate, const NormalizationTransform& transform,
                    std::size_t n);

Json outcome_to_json(const CheckOutcome& outcome);
Json report_summary_to_json(const AgentReport& report);
/// Report document written next to the reshaped trajectory.
Json reshape_report_to_json(const ReshapeResult& result);

/// Exit codes of the reshape command.
enum ExitCode : int {
  kExitPassed = 0,
  kExitBestEffort = 1,
  kExitInterpretation = 2,
  kExitNumeric = 3,
};

struct RegistrationOutcome {
  Scene scene;
  std::vector<std::string> warnings;
};

/// Registers every cloud file of `dir` (sorted by name) that has a
/// descriptor. Per-cloud failures become warnings. Throws Error when the
/// directory holds no cloud files.
RegistrationOutcome register_directory(const std::filesystem::path& dir,
                                       const RegistrationParams& params = {});

struct SampleResult {
  std::uint64_t seed = 0;
  SampleKind kind = SampleKind::Single;
  std::optional<int> success_round;
  std::array<std::optional<int>, 4> agent_success_round;
  std::string error;
};

struct EvaluationResult {
  int max_rounds = 4;
  std::vector<SampleResult> samples;

  /// Fraction of samples the agent solved in round 1.
  double agent_first_round_rate(AgentKind agent) const;
  /// Fraction of samples the agent solved in any round.
  double agent_final_round_rate(AgentKind agent) const;
  /// Fraction of samples solved by the orchestrator within `round` rounds.
  double orchestrator_rate(int round) const;
};

/// Orchestrates every sample in exhaustive mode so each agent's per-round
/// record is complete. Per-sample errors count as failures.
EvaluationResult evaluate_samples(const std::vector<Sample>& samples, const Config& config);
Json evaluation_to_json(const EvaluationResult& result);
std::string evaluation_table(const EvaluationResult& result);

}  // namespace georeshape
