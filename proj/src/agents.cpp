#include "georeshape/agents.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace georeshape {

namespace {

bool sign_matches(double measured, int sign) {
  return (sign > 0 && measured > 0.0) || (sign < 0 && measured < 0.0);
}

const SceneObject& require_target(const Constraint& c, const Scene& scene) {
  if (!c.target) throw std::invalid_argument(to_string(c.kind) + " constraint has no target");
  const SceneObject* obj = scene.find(*c.target);
  if (!obj) throw std::invalid_argument("constraint targets unknown object '" + *c.target + "'");
  return *obj;
}

void require_permutation(const std::vector<std::size_t>& ordering, std::size_t n) {
  if (ordering.size() != n) throw std::invalid_argument("ordering is not a permutation");
  std::vector<bool> seen(n, false);
  for (std::size_t i : ordering) {
    if (i >= n || seen[i]) throw std::invalid_argument("ordering is not a permutation");
    seen[i] = true;
  }
}

void promote(std::vector<std::size_t>& order, std::size_t constraint) {
  const auto it = std::find(order.begin(), order.end(), constraint);
  if (it != order.end() && it != order.begin()) std::iter_swap(it, it - 1);
}

Trajectory run_fields(const Trajectory& trajectory, const std::vector<PotentialField>& fields,
                      const Scene& scene, const OptimizerParams& params) {
  const OptimizeResult result = optimize(trajectory, fields, scene, params);
  return apply_speed_profile(result.trajectory, fields, scene);
}

}  // namespace

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Parallel:
      return "parallel";
    case AgentKind::Sequential:
      return "sequential";
    case AgentKind::ParallelPriority:
      return "parallel_priority";
    case AgentKind::ParallelImportance:
      return "parallel_importance";
  }
  return "parallel";
}

AgentKind agent_kind_from_string(const std::string& text) {
  for (AgentKind k : kAllAgents) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown agent '" + text + "'");
}

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::Distance:
      return "distance";
    case CheckKind::Cartesian:
      return "cartesian";
    case CheckKind::Speed:
      return "speed";
  }
  return "distance";
}

bool AgentReport::all_passed() const {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.passed; });
}

std::size_t AgentReport::passed_count() const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.passed; }));
}

RefinementState RefinementState::initial(const ConstraintSet& set, const Scene& scene,
                                         const std::vector<std::vector<std::size_t>>& sequences) {
  const std::size_t n = set.constraints.size();
  RefinementState state;
  state.intensity_multipliers.assign(n, 1.0);
  state.importance_multipliers.assign(n, 1.0);

  state.sequential_order.resize(n);
  std::iota(state.sequential_order.begin(), state.sequential_order.end(), std::size_t{0});
  std::stable_sort(state.sequential_order.begin(), state.sequential_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return set.constraints[a].priority < set.constraints[b].priority;
                   });

  if (!sequences.empty()) {
    require_permutation(sequences.front(), n);
    state.priority_order = sequences.front();
  } else {
    auto fragility = [&](std::size_t i) {
      const auto& t = set.constraints[i].target;
      const SceneObject* obj = t ? scene.find(*t) : nullptr;
      return obj ? obj->fragility : 0.0;
    };
    state.priority_order.resize(n);
    std::iota(state.priority_order.begin(), state.priority_order.end(), std::size_t{0});
    std::stable_sort(state.priority_order.begin(), state.priority_order.end(),
                     [&](std::size_t a, std::size_t b) { return fragility(a) > fragility(b); });
  }
  return state;
}

double RefinementState::radius_multiplier(const std::optional<std::string>& object_id) const {
  if (!object_id) return 1.0;
  const auto it = radius_multipliers.find(*object_id);
  return it == radius_multipliers.end() ? 1.0 : it->second;
}

std::vector<double> priority_rank_multipliers(const std::vector<std::size_t>& ordering,
                                              std::size_t n) {
  require_permutation(ordering, n);
  std::vector<double> out(n, 1.0);
  if (n == 0) return out;
  const double max_rank = static_cast<double>(n - 1);
  for (std::size_t rank = 0; rank < n; ++rank) {
    out[ordering[rank]] = 1.0 + kPriorityRankWeight * (max_rank - static_cast<double>(rank));
  }
  return out;
}

std::vector<PotentialField> agent_fields(AgentKind agent, const ConstraintSet& set,
                                         const Scene& scene, const RefinementState& state) {
  const std::size_t n = set.constraints.size();
  if (state.intensity_multipliers.size() != n || state.importance_multipliers.size() != n) {
    throw std::invalid_argument("refinement state does not match the constraint set");
  }
  std::vector<double> rank(n, 1.0);
  if (agent == AgentKind::ParallelPriority) rank = priority_rank_multipliers(state.priority_order, n);

  std::vector<PotentialField> fields;
  fields.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Constraint c = set.constraints[i];
    c.intensity *= state.intensity_multipliers[i] * rank[i];
    c.importance = agent == AgentKind::ParallelImportance
                       ? c.importance * state.importance_multipliers[i]
                       : 1.0;
    fields.push_back(make_field(c, scene, state.radius_multiplier(c.target)));
  }
  return fields;
}

Trajectory run_parallel(const Trajectory& trajectory, const ConstraintSet& set, const Scene& scene,
                        const OptimizerParams& params, const RefinementState& state) {
  return run_fields(trajectory, agent_fields(AgentKind::Parallel, set, scene, state), scene,
                    params);
}

Trajectory run_parallel(const Trajectory& trajectory, const ConstraintSet& set, const Scene& scene,
                        const OptimizerParams& params) {
  return run_parallel(trajectory, set, scene, params, RefinementState::initial(set, scene));
}

Trajectory run_sequential(const Trajectory& trajectory, const ConstraintSet& set,
                          const Scene& scene, const OptimizerParams& params,
                          const RefinementState& state) {
  const auto fields = agent_fields(AgentKind::Sequential, set, scene, state);
  require_permutation(state.sequential_order, fields.size());
  Trajectory current = trajectory;
  bool first = true;
  for (std::size_t idx : state.sequential_order) {
    const Trajectory input = first ? trajectory : current.rebased();
    current = optimize(input, {fields[idx]}, scene, params).trajectory;
    first = false;
  }
  current = trajectory.with_waypoints(current.waypoints());
  return apply_speed_profile(current, fields, scene);
}

Trajectory run_sequential(const Trajectory& trajectory, const ConstraintSet& set,
                          const Scene& scene, const OptimizerParams& params) {
  return run_sequential(trajectory, set, scene, params, RefinementState::initial(set, scene));
}

Trajectory run_parallel_priority(const Trajectory& trajectory, const ConstraintSet& set,
                                 const Scene& scene, const OptimizerParams& params,
                                 const RefinementState& state) {
  return run_fields(trajectory, agent_fields(AgentKind::ParallelPriority, set, scene, state),
                    scene, params);
}

Trajectory run_parallel_priority(const Trajectory& trajectory, const ConstraintSet& set,
                                 const Scene& scene, const OptimizerParams& params,
                                 const std::vector<std::size_t>& ordering) {
  RefinementState state = RefinementState::initial(set, scene);
  require_permutation(ordering, set.constraints.size());
  state.priority_order = ordering;
  return run_parallel_priority(trajectory, set, scene, params, state);
}

Trajectory run_parallel_importance(const Trajectory& trajectory, const ConstraintSet& set,
                                   const Scene& scene, const OptimizerParams& params,
                                   const RefinementState& state) {
  return run_fields(trajectory, agent_fields(AgentKind::ParallelImportance, set, scene, state),
                    scene, params);
}

Trajectory run_parallel_importance(const Trajectory& trajectory, const ConstraintSet& set,
                                   const Scene& scene, const OptimizerParams& params) {
  return run_parallel_importance(trajectory, set, scene, params,
                                 RefinementState::initial(set, scene));
}

Trajectory run_agent(AgentKind agent, const Trajectory& trajectory, const ConstraintSet& set,
                     const Scene& scene, const OptimizerParams& params,
                     const RefinementState& state) {
  switch (agent) {
    case AgentKind::Parallel:
      return run_parallel(trajectory, set, scene, params, state);
    case AgentKind::Sequential:
      return run_sequential(trajectory, set, scene, params, state);
    case AgentKind::ParallelPriority:
      return run_parallel_priority(trajectory, set, scene, params, state);
    case AgentKind::ParallelImportance:
      return run_parallel_importance(trajectory, set, scene, params, state);
  }
  return run_parallel(trajectory, set, scene, params, state);
}

CheckOutcome check_distance(const Trajectory& before, const Trajectory& after,
                            const Constraint& constraint, const Scene& scene, double tau_d) {
  const SceneObject& obj = require_target(constraint, scene);
  const auto indices = closest_waypoint_indices(before, obj, 5);
  double sum = 0.0;
  for (std::size_t i : indices) {
    sum += closest_point(after[i].position, obj).signed_distance -
           closest_point(before[i].position, obj).signed_distance;
  }
  CheckOutcome out;
  out.kind = CheckKind::Distance;
  out.measured = sum / static_cast<double>(indices.size());
  out.threshold = tau_d;
  out.passed = sign_matches(out.measured, constraint.sign) && std::abs(out.measured) >= tau_d;
  return out;
}

CheckOutcome check_cartesian(const Trajectory& before, const Trajectory& after,
                             const Constraint& constraint, const Scene& scene, double tau_c) {
  if (before.size() != after.size()) throw std::invalid_argument("trajectories differ in length");
  std::vector<std::size_t> affected;
  if (!constraint.target) {
    affected.resize(before.size());
    std::iota(affected.begin(), affected.end(), std::size_t{0});
  } else {
    const SceneObject& obj = require_target(constraint, scene);
    const double radius = influence_radius(obj);
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (closest_point(before[i].position, obj).signed_distance <= radius) affected.push_back(i);
    }
    if (affected.empty()) affected = closest_waypoint_indices(before, obj, 5);
  }
  double sum = 0.0;
  for (std::size_t i : affected) {
    sum += (after[i].position - before[i].position).dot(constraint.direction);
  }
  CheckOutcome out;
  out.kind = CheckKind::Cartesian;
  out.measured = sum / static_cast<double>(affected.size());
  out.threshold = tau_c;
  out.passed = out.measured >= tau_c;
  return out;
}

CheckOutcome check_speed(const Trajectory& before, const Trajectory& after,
                         const Constraint& constraint, const Scene& scene, double tau_v) {
  const SceneObject& obj = require_target(constraint, scene);
  const auto indices = closest_waypoint_indices(before, obj, 5);
  double sum_before = 0.0;
  double sum_after = 0.0;
  for (std::size_t i : indices) {
    sum_before += before[i].speed;
    sum_after += after[i].speed;
  }
  CheckOutcome out;
  out.kind = CheckKind::Speed;
  out.measured = sum_before > 0.0 ? (sum_after - sum_before) / sum_before : 0.0;
  out.threshold = tau_v;
  out.passed = sign_matches(out.measured, constraint.sign) && std::abs(out.measured) >= tau_v;
  return out;
}

std::vector<CheckOutcome> observe(const Trajectory& before, const Trajectory& after,
                                  const ConstraintSet& set, const Scene& scene,
                                  const ObserverThresholds& thresholds) {
  std::vector<CheckOutcome> out;
  out.reserve(set.constraints.size());
  for (std::size_t i = 0; i < set.constraints.size(); ++i) {
    const Constraint& c = set.constraints[i];
    CheckOutcome o;
    switch (c.kind) {
      case ConstraintKind::ObjectDistance:
        o = check_distance(before, after, c, scene, thresholds.distance);
        break;
      case ConstraintKind::CartesianShift:
        o = check_cartesian(before, after, c, scene, thresholds.cartesian);
        break;
      case ConstraintKind::SpeedChange:
        o = check_speed(before, after, c, scene, thresholds.speed);
        break;
    }
    o.constraint_id = i;
    out.push_back(o);
  }
  return out;
}

double mean_deviation(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw std::invalid_argument("trajectories differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += distance(a[i].position, b[i].position);
  return sum / static_cast<double>(a.size());
}

std::optional<RefinementState> refine(const std::vector<AgentReport>& reports,
                                      const RefinementState& state, const RefineContext& context) {
  if (state.round >= context.max_rounds) return std::nullopt;
  const std::size_t n = context.set.constraints.size();
  RefinementState next = state;
  next.round = state.round + 1;

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t failures = 0;
    for (const auto& r : reports) {
      if (i < r.outcomes.size() && !r.outcomes[i].passed) ++failures;
    }
    if (failures == 0) continue;

    const Constraint& c = context.set.constraints[i];
    bool unreachable = false;
    if (failures == reports.size() && c.target) {
      ConstraintSet solo{{c}, context.set.source_command};
      RefinementState probe_state = RefinementState::initial(solo, context.scene);
      probe_state.intensity_multipliers[0] = state.intensity_multipliers[i];
      probe_state.radius_multipliers = state.radius_multipliers;
      const Trajectory probe =
          run_parallel(context.trajectory, solo, context.scene, context.params, probe_state);
      const auto outcome =
          observe(context.trajectory, probe, solo, context.scene, context.thresholds);
      unreachable = !outcome.front().passed;
    }

    if (unreachable) {
      next.radius_multipliers[*c.target] = state.radius_multiplier(c.target) * kRefinementFactor;
    } else {
      next.intensity_multipliers[i] *= kRefinementFactor;
      next.importance_multipliers[i] *= kRefinementFactor;
      promote(next.sequential_order, i);
      promote(next.priority_order, i);
    }
  }
  return next;
}

OrchestrationResult orchestrate(const Trajectory& trajectory, const ConstraintSet& set,
                                const Scene& scene, const OptimizerParams& params,
                                const OrchestrateOptions& options) {
  if (options.max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  const Trajectory origin = trajectory.rebased();
  const RefineContext context{origin, set, scene, params, options.thresholds, options.max_rounds};

  OrchestrationResult result{AgentReport{AgentKind::Parallel, origin, {}, 1, 0.0}, {}, {}, {}, 0};
  std::optional<AgentReport> best;
  auto better = [](const AgentReport& a, const AgentReport& b) {
    if (a.passed_count() != b.passed_count()) return a.passed_count() > b.passed_count();
    return a.deviation < b.deviation;
  };

  std::vector<AgentKind> active(kAllAgents.begin(), kAllAgents.end());
  RefinementState state = RefinementState::initial(set, scene, options.sequences);

  while (true) {
    const int round = state.round;
    auto run_one = [&, round](AgentKind agent) {
      Trajectory candidate = run_agent(agent, origin, set, scene, params, state);
      auto outcomes = observe(origin, candidate, set, scene, options.thresholds);
      const double deviation = mean_deviation(origin, candidate);
      return AgentReport{agent, std::move(candidate), std::move(outcomes), round, deviation};
    };

    std::vector<AgentReport> round_reports;
    if (options.concurrent) {
      std::vector<std::future<AgentReport>> futures;
      for (AgentKind a : active) futures.push_back(std::async(std::launch::async, run_one, a));
      for (auto& f : futures) round_reports.push_back(f.get());
    } else {
      for (AgentKind a : active) round_reports.push_back(run_one(a));
    }
    result.rounds_run = round;

    for (const auto& r : round_reports) {
      const auto slot = static_cast<std::size_t>(r.agent);
      if (r.all_passed()) {
        if (!result.agent_success_round[slot]) result.agent_success_round[slot] = round;
        if (!result.success_round) result.success_round = round;
      }
      // Once a round has succeeded, later rounds only feed the per-agent tally.
      const bool eligible = !best || !best->all_passed() || best->round == round;
      if (eligible && (!best || better(r, *best))) best = r;
      result.reports.push_back(r);
    }

    std::vector<AgentKind> failing;
    std::vector<AgentReport> failing_reports;
    for (const auto& r : round_reports) {
      if (!r.all_passed()) {
        failing.push_back(r.agent);
        failing_reports.push_back(r);
      }
    }
    const bool done = options.exhaustive ? failing.empty() : result.success_round.has_value();
    if (done) break;

    auto next = refine(options.exhaustive ? failing_reports : round_reports, state, context);
    if (!next) break;
    state = std::move(*next);
    if (options.exhaustive) active = failing;
  }

  result.best = *best;
  return result;
}

}  // namespace georeshape
