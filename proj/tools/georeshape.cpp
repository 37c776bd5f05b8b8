// georeshape command-line tool.
//
//   georeshape register --clouds DIR --out scene.json
//   georeshape reshape  --scene F --trajectory F (--command TEXT | --constraints F) --out DIR
//   georeshape evaluate --dataset DIR [--out DIR]
//   georeshape generate --out DIR --seed N --count N --kind single|multi|complex
//   georeshape serve    [--host H] [--port P]
//
// Every command accepts --config FILE.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "georeshape/config.hpp"
#include "georeshape/dataset.hpp"
#include "georeshape/errors.hpp"
#include "georeshape/io.hpp"
#include "georeshape/pipeline.hpp"
#include "georeshape/service.hpp"

namespace fs = std::filesystem;
using namespace georeshape;

namespace {

constexpr int kExitInputError = 4;

Config load(const std::string& config_path, const std::string& interpreter) {
  Config config = load_config(config_path);
  if (!interpreter.empty()) config.interpreter = interpreter_mode_from_string(interpreter);
  return config;
}

int run_register(const std::string& clouds, const std::string& out) {
  const RegistrationOutcome result = register_directory(clouds);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  write_text_file(out, scene_to_json(result.scene).dump(2) + "\n");
  std::cout << "registered " << result.scene.objects.size() << " object(s), "
            << result.warnings.size() << " warning(s)\n";
  if (result.scene.objects.empty()) return 2;
  return result.warnings.empty() ? 0 : 1;
}

int run_reshape(const std::string& scene_path, const std::string& trajectory_path,
                const std::string& command, const std::string& constraints_path,
                const Config& config, const std::string& out) {
  const Scene scene = read_scene_file(scene_path);
  const Trajectory trajectory = read_trajectory_file(trajectory_path);
  CommandInput input;
  if (!command.empty()) input.command = command;
  if (!constraints_path.empty()) input.constraints = read_json_file(constraints_path);

  std::optional<ReshapeResult> result;
  try {
    result.emplace(reshape(trajectory, scene, input, config));
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ResolutionError& e) {
    std::cerr << "interpretation failed: " << e.what() << "\n";
    return kExitInterpretation;
  } catch (const InterpretationError& e) {
    std::cerr << "interpretation failed: " << e.what() << "\n";
    return kExitInterpretation;
  } catch (const TransportError& e) {
    std::cerr << "interpretation failed: " << e.what() << "\n";
    return kExitInterpretation;
  }

  const TrajectoryFormat format = trajectory_format(trajectory_path);
  const fs::path dir(out);
  write_text_file(dir / (format == TrajectoryFormat::Json ? "trajectory.json" : "trajectory.csv"),
                  format_trajectory(result->trajectory, format));
  write_text_file(dir / "report.json", reshape_report_to_json(*result).dump(2) + "\n");

  const auto& orch = result->orchestration;
  const auto& best = orch.best;
  std::cout << (orch.success() ? "passed" : "best effort") << ": agent "
            << to_string(best.agent) << ", round " << best.round << ", " << best.passed_count()
            << "/" << best.outcomes.size() << " checks\n";
  return orch.success() ? kExitPassed : kExitBestEffort;
}

int run_evaluate(const std::string& dataset, const Config& config, const std::string& out) {
  std::vector<Sample> samples;
  const fs::path dir(dataset);
  if (fs::exists(dir / "manifest.json")) {
    samples = read_dataset(dir);
  } else if (!fs::is_directory(dir) || !fs::is_empty(dir)) {
    throw Error("no manifest.json in " + dataset);
  }
  const EvaluationResult result = evaluate_samples(samples, config);
  std::cout << evaluation_table(result);
  if (!out.empty()) {
    write_text_file(fs::path(out) / "results.json", evaluation_to_json(result).dump(2) + "\n");
    write_text_file(fs::path(out) / "results.txt", evaluation_table(result));
  }
  return 0;
}

int run_generate(const std::string& out, std::uint64_t seed, std::size_t count,
                 const std::string& kind) {
  write_dataset(out, seed, count, sample_kind_from_string(kind));
  std::cout << "wrote " << count << " " << kind << " sample(s) to " << out << "\n";
  return 0;
}

Service* g_service = nullptr;

int run_serve(const Config& config, const std::string& host, int port) {
  Service service(config);
  const int bound = service.bind(host, port);
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->stop();
  });
  std::cout << "listening on " << host << ":" << bound << std::endl;
  service.listen();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reshape robot trajectories from language commands and object geometry"};
  app.require_subcommand(1);

  std::string config_path;
  std::string interpreter;

  std::string clouds, scene_out;
  auto* reg = app.add_subcommand("register", "Fit primitives to labeled point clouds");
  reg->add_option("--clouds", clouds, "Directory of clouds and descriptors")->required();
  reg->add_option("--out", scene_out, "Scene file to write")->required();

  std::string scene, trajectory, command, constraints, reshape_out;
  auto* rsh = app.add_subcommand("reshape", "Reshape a trajectory");
  rsh->add_option("--scene", scene, "Scene file")->required()->check(CLI::ExistingFile);
  rsh->add_option("--trajectory", trajectory, "Trajectory file (.csv or .json)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* cmd_opt = rsh->add_option("--command", command, "Command text");
  auto* cons_opt = rsh->add_option("--constraints", constraints, "Constraint document")
                       ->check(CLI::ExistingFile);
  cmd_opt->excludes(cons_opt);
  rsh->add_option("--out", reshape_out, "Output directory")->required();

  std::string dataset, eval_out;
  auto* evl = app.add_subcommand("evaluate", "Per-agent and per-round success rates");
  evl->add_option("--dataset", dataset, "Dataset directory")->required();
  evl->add_option("--out", eval_out, "Directory for results.json and results.txt");

  std::string gen_out, kind = "single";
  std::uint64_t seed = 0;
  std::size_t count = 100;
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  gen->add_option("--out", gen_out, "Dataset directory")->required();
  gen->add_option("--seed", seed, "Base seed");
  gen->add_option("--count", count, "Number of samples");
  gen->add_option("--kind", kind, "Sample kind")->check(CLI::IsMember({"single", "multi", "complex"}));

  std::string host;
  int port = -1;
  auto* srv = app.add_subcommand("serve", "Run the session HTTP service");
  srv->add_option("--host", host, "Listen address");
  srv->add_option("--port", port, "Listen port (0 picks a free one)");

  for (auto* sub : {reg, rsh, evl, gen, srv}) {
    sub->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--interpreter", interpreter, "Command interpreter")
        ->check(CLI::IsMember({"template", "external"}));
  }
  rsh->add_option("--seed", seed, "Accepted for symmetry; reshaping is deterministic");
  evl->add_option("--seed", seed, "Accepted for symmetry; evaluation is deterministic");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rsh && command.empty() && constraints.empty()) {
      std::cerr << "reshape needs --command or --constraints\n";
      return kExitInputError;
    }
    const Config config = load(config_path, interpreter);
    if (*reg) return run_register(clouds, scene_out);
    if (*rsh) return run_reshape(scene, trajectory, command, constraints, config, reshape_out);
    if (*evl) return run_evaluate(dataset, config, eval_out);
    if (*gen) return run_generate(gen_out, seed, count, kind);
    if (*srv) return run_serve(config, host.empty() ? config.host : host, port < 0 ? config.port : port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return 0;
}
