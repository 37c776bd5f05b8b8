#include <gtest/gtest.h>

#include "georeshape/agents.hpp"
#include "georeshape/config.hpp"
#include "georeshape/dataset.hpp"
#include "georeshape/pipeline.hpp"
#include "oracles.hpp"

using namespace georeshape;

namespace {

SceneObject sphere_at(const std::string& id, const Vec3& c, double r, std::optional<double> rho = 0.3,
                      double fragility = 0.5) {
  return {id, id, Sphere{r}, Pose::translation(c), rho, fragility};
}

Constraint distance_to(const std::string& target, int sign, int priority = 0) {
  Constraint c;
  c.kind = ConstraintKind::ObjectDistance;
  c.sign = sign;
  c.target = target;
  c.priority = priority;
  return c;
}

Constraint speed_near(const std::string& target, int sign) {
  Constraint c = distance_to(target, sign);
  c.kind = ConstraintKind::SpeedChange;
  return c;
}

Constraint shift(const Vec3& dir, int priority = 0, double importance = 1.0) {
  Constraint c;
  c.kind = ConstraintKind::CartesianShift;
  c.direction = dir;
  c.priority = priority;
  c.importance = importance;
  return c;
}

ConstraintSet set_of(std::vector<Constraint> cs) { return {std::move(cs), "test"}; }

Trajectory straight(double y = 0.0) { return oracle::line({-1, y, 0}, {1, y, 0}, 48, 0.6); }

// Spheres on either side of the line, well outside each other's reach.
Scene two_sphere_scene() {
  Scene s;
  s.objects.push_back(sphere_at("a", {-0.55, 0.22, 0}, 0.1));
  s.objects.push_back(sphere_at("b", {0.55, -0.22, 0}, 0.1));
  return s;
}

const OptimizerParams kParams{};

}  // namespace

TEST(AgentKinds, NamesRoundTrip) {
  for (AgentKind k : kAllAgents) EXPECT_EQ(agent_kind_from_string(to_string(k)), k);
  EXPECT_EQ(to_string(AgentKind::ParallelImportance), "parallel_importance");
  EXPECT_THROW(agent_kind_from_string("serial"), std::invalid_argument);
}

TEST(Parallel, SingleConstraintIsPlainOptimize) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({distance_to("a", 1)});
  const auto plain = optimize(straight(), {make_field(set.constraints[0], scene)}, scene, kParams);
  const Trajectory expect =
      apply_speed_profile(plain.trajectory, {make_field(set.constraints[0], scene)}, scene);
  EXPECT_EQ(run_parallel(straight(), set, scene, kParams).waypoints(), expect.waypoints());
}

TEST(Parallel, IndependentConstraintsBehaveAsInIsolation) {
  const Scene scene = two_sphere_scene();
  const ObserverThresholds th;
  const Constraint ca = distance_to("a", 1);
  const Constraint cb = distance_to("b", -1);
  const auto joint = observe(straight(), run_parallel(straight(), set_of({ca, cb}), scene, kParams),
                             set_of({ca, cb}), scene, th);
  const auto solo_a = observe(straight(), run_parallel(straight(), set_of({ca}), scene, kParams),
                              set_of({ca}), scene, th);
  const auto solo_b = observe(straight(), run_parallel(straight(), set_of({cb}), scene, kParams),
                              set_of({cb}), scene, th);
  EXPECT_TRUE(solo_a[0].passed);
  EXPECT_TRUE(solo_b[0].passed);
  EXPECT_EQ(joint[0].passed, solo_a[0].passed);
  EXPECT_EQ(joint[1].passed, solo_b[0].passed);
  EXPECT_NEAR(joint[0].measured, solo_a[0].measured, 0.1 * std::abs(solo_a[0].measured));
  EXPECT_NEAR(joint[1].measured, solo_b[0].measured, 0.1 * std::abs(solo_b[0].measured));
}

TEST(Parallel, OpposedDistanceConstraintsCancel) {
  const Scene scene = two_sphere_scene();
  const auto out = run_parallel(straight(), set_of({distance_to("a", 1), distance_to("a", -1)}),
                                scene, kParams);
  EXPECT_LT(mean_deviation(out, straight()), 1e-9);
}

TEST(Sequential, SingleConstraintEqualsParallel) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({distance_to("b", -1)});
  EXPECT_EQ(run_sequential(straight(), set, scene, kParams).waypoints(),
            run_parallel(straight(), set, scene, kParams).waypoints());
}

TEST(Sequential, OrderMatters) {
  const Scene scene = two_sphere_scene();
  const auto ab = run_sequential(straight(), set_of({shift(kFront, 0), distance_to("a", 1, 1)}),
                                 scene, kParams);
  const auto ba = run_sequential(straight(), set_of({shift(kFront, 1), distance_to("a", 1, 0)}),
                                 scene, kParams);
  EXPECT_GT(mean_deviation(ab, ba), 1e-4);
}

TEST(Sequential, OutOfReachPassIsIdentity) {
  Scene scene;
  scene.objects.push_back(sphere_at("far", {0, 2, 0}, 0.1));
  const auto out = run_sequential(straight(), set_of({distance_to("far", 1)}), scene, kParams);
  EXPECT_EQ(out.waypoints(), straight().waypoints());
}

TEST(Sequential, ReferenceIsTheInputTrajectory) {
  const Scene scene = two_sphere_scene();
  const auto out =
      run_sequential(straight(), set_of({shift(kUp), distance_to("a", 1, 1)}), scene, kParams);
  EXPECT_EQ(out.original_waypoints(), straight().waypoints());
}

TEST(Priority, RankMultipliers) {
  const auto m = priority_rank_multipliers({0, 1}, 2);
  EXPECT_DOUBLE_EQ(m[0], 1.25);
  EXPECT_DOUBLE_EQ(m[1], 1.0);
  const auto m3 = priority_rank_multipliers({2, 0, 1}, 3);
  EXPECT_DOUBLE_EQ(m3[2], 1.5);
  EXPECT_DOUBLE_EQ(m3[0], 1.25);
  EXPECT_DOUBLE_EQ(m3[1], 1.0);
  EXPECT_DOUBLE_EQ(priority_rank_multipliers({0}, 1)[0], 1.0);
}

TEST(Priority, RejectsNonPermutation) {
  EXPECT_THROW(priority_rank_multipliers({0, 0}, 2), std::invalid_argument);
  EXPECT_THROW(priority_rank_multipliers({0}, 2), std::invalid_argument);
  EXPECT_THROW(priority_rank_multipliers({0, 2}, 2), std::invalid_argument);
  const Scene scene = two_sphere_scene();
  EXPECT_THROW(run_parallel_priority(straight(), set_of({shift(kUp), shift(kDown)}), scene, kParams,
                                     std::vector<std::size_t>{1, 1}),
               std::invalid_argument);
}

TEST(Priority, FallbackOrdering) {
  Scene uniform = two_sphere_scene();
  const auto set = set_of({distance_to("a", 1), distance_to("b", 1), shift(kUp)});
  EXPECT_EQ(RefinementState::initial(set, uniform).priority_order,
            (std::vector<std::size_t>{0, 1, 2}));
  Scene fragile = uniform;
  fragile.objects[1].fragility = 0.9;
  EXPECT_EQ(RefinementState::initial(set, fragile).priority_order,
            (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_EQ(RefinementState::initial(set, fragile, {{2, 1, 0}}).priority_order,
            (std::vector<std::size_t>{2, 1, 0}));
}

TEST(Priority, SingleConstraintEqualsParallel) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({distance_to("a", -1)});
  EXPECT_EQ(run_parallel_priority(straight(), set, scene, kParams, std::vector<std::size_t>{0})
                .waypoints(),
            run_parallel(straight(), set, scene, kParams).waypoints());
}

TEST(Priority, LeadingConstraintWins) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({shift(kLeft), shift(kRight)});
  const auto left_first =
      run_parallel_priority(straight(), set, scene, kParams, std::vector<std::size_t>{0, 1});
  const auto right_first =
      run_parallel_priority(straight(), set, scene, kParams, std::vector<std::size_t>{1, 0});
  const std::size_t mid = straight().size() / 2;
  EXPECT_LT(left_first[mid].position.x, straight()[mid].position.x);
  EXPECT_GT(right_first[mid].position.x, straight()[mid].position.x);
}

TEST(Importance, UnitImportanceEqualsParallel) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({distance_to("a", 1), shift(kUp), speed_near("b", -1)});
  EXPECT_EQ(run_parallel_importance(straight(), set, scene, kParams).waypoints(),
            run_parallel(straight(), set, scene, kParams).waypoints());
}

TEST(Importance, HeavierConstraintWins) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({shift(kFront, 0, 2.0), shift(kBack, 1, 1.0)});
  const auto weighted = run_parallel_importance(straight(), set, scene, kParams);
  const auto flat = run_parallel(straight(), set, scene, kParams);
  const auto c = check_cartesian(straight(), weighted, set.constraints[0], scene);
  EXPECT_GT(c.measured, 0.0);
  EXPECT_LT(mean_deviation(flat, straight()), 1e-12);
}

TEST(Checks, DistanceExamples) {
  Scene scene;
  scene.objects.push_back(sphere_at("s", {0, 0, 0}, 0.1));
  const Trajectory before = straight(0.3);
  const Trajectory pushed = straight(0.4);
  const auto same = check_distance(before, before, distance_to("s", 1), scene);
  EXPECT_EQ(same.measured, 0.0);
  EXPECT_FALSE(same.passed);
  // Near the sphere the distance grows by just under the 0.1 lateral push.
  const auto farther = check_distance(before, pushed, distance_to("s", 1), scene);
  EXPECT_NEAR(farther.measured, 0.1, 0.005);
  EXPECT_TRUE(farther.passed);
  EXPECT_FALSE(check_distance(before, pushed, distance_to("s", -1), scene).passed);
  const auto small = check_distance(before, straight(0.27), distance_to("s", -1), scene);
  EXPECT_LT(small.measured, 0.0);
  EXPECT_GT(small.measured, -0.05);
  EXPECT_FALSE(small.passed);
}

TEST(Checks, DistanceUsesIndicesOfBefore) {
  Scene scene;
  scene.objects.push_back(sphere_at("s", {0, 0, 0}, 0.1));
  const Trajectory before = straight(0.3);
  std::vector<Waypoint> w = before.waypoints();
  for (std::size_t i = 0; i < 10; ++i) w[i].position.y = 0.11;  // far end drifts close
  const auto out = check_distance(before, Trajectory(w), distance_to("s", -1), scene);
  EXPECT_EQ(out.measured, 0.0);
}

TEST(Checks, CartesianExamples) {
  const Scene scene = two_sphere_scene();
  const Trajectory before = straight();
  EXPECT_FALSE(check_cartesian(before, before, shift(kFront), scene).passed);
  const auto moved = check_cartesian(before, straight(0.1), shift(kFront), scene);
  EXPECT_NEAR(moved.measured, 0.1, 1e-12);
  EXPECT_TRUE(moved.passed);
  const auto orth = check_cartesian(before, straight(0.1), shift(kUp), scene);
  EXPECT_EQ(orth.measured, 0.0);
  EXPECT_FALSE(orth.passed);
}

TEST(Checks, LocalCartesianUsesInfluencedWaypoints) {
  const Scene scene = two_sphere_scene();
  const Trajectory before = straight();
  std::vector<Waypoint> w = before.waypoints();
  for (auto& p : w) {
    if (closest_point(p.position, scene.objects[0]).signed_distance <= 0.3) p.position.z += 0.2;
  }
  Constraint c = shift(kUp);
  c.target = "a";
  EXPECT_NEAR(check_cartesian(before, Trajectory(w), c, scene).measured, 0.2, 1e-12);
}

TEST(Checks, SpeedExamples) {
  Scene scene;
  scene.objects.push_back(sphere_at("s", {0, 0, 0}, 0.1));
  const Trajectory before = straight(0.3);
  EXPECT_FALSE(check_speed(before, before, speed_near("s", -1), scene).passed);
  std::vector<Waypoint> half = before.waypoints();
  for (auto& p : half) p.speed *= 0.5;
  const auto slow = check_speed(before, Trajectory(half), speed_near("s", -1), scene);
  EXPECT_NEAR(slow.measured, -0.5, 1e-12);
  EXPECT_TRUE(slow.passed);
  std::vector<Waypoint> slight = before.waypoints();
  for (auto& p : slight) p.speed *= 0.95;
  EXPECT_FALSE(check_speed(before, Trajectory(slight), speed_near("s", -1), scene).passed);
}

TEST(Checks, ObserveOnePerConstraint) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({distance_to("a", 1), shift(kUp), speed_near("b", 1)});
  const auto out = observe(straight(), straight(), set, scene, ObserverThresholds{});
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].constraint_id, i);
  EXPECT_EQ(out[0].kind, CheckKind::Distance);
  EXPECT_EQ(out[1].kind, CheckKind::Cartesian);
  EXPECT_EQ(out[2].kind, CheckKind::Speed);
}

TEST(Refine, FarObjectExpandsRadius) {
  Scene scene;
  scene.objects.push_back(sphere_at("far", {0, 0.5, 0}, 0.1));
  const auto set = set_of({distance_to("far", -1)});
  const Trajectory t = straight();
  const ObserverThresholds th;
  const RefineContext ctx{t, set, scene, kParams, th, 4};
  const RefinementState state = RefinementState::initial(set, scene);
  const auto candidate = run_parallel(t, set, scene, kParams, state);
  const AgentReport report{AgentKind::Parallel, candidate, observe(t, candidate, set, scene, th), 1, 0.0};
  const auto next = refine({report}, state, ctx);
  ASSERT_TRUE(next);
  EXPECT_EQ(next->round, 2);
  EXPECT_DOUBLE_EQ(next->radius_multiplier(std::string("far")), 1.5);
  EXPECT_DOUBLE_EQ(next->intensity_multipliers[0], 1.0);
}

TEST(Refine, JointConflictRaisesIntensity) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({distance_to("a", 1), distance_to("a", -1)});
  const Trajectory t = straight();
  const ObserverThresholds th;
  const RefineContext ctx{t, set, scene, kParams, th, 4};
  RefinementState state = RefinementState::initial(set, scene);
  std::vector<AgentReport> reports;
  for (AgentKind k : kAllAgents) {
    const auto c = run_agent(k, t, set, scene, kParams, state);
    reports.push_back({k, c, observe(t, c, set, scene, th), 1, 0.0});
  }
  const auto next = refine(reports, state, ctx);
  ASSERT_TRUE(next);
  EXPECT_DOUBLE_EQ(next->intensity_multipliers[0], 1.5);
  EXPECT_DOUBLE_EQ(next->intensity_multipliers[1], 1.5);
  EXPECT_DOUBLE_EQ(next->importance_multipliers[1], 1.5);
  EXPECT_TRUE(next->radius_multipliers.empty());
}

TEST(Refine, PassingConstraintsUntouchedAndRoundsCapped) {
  const Scene scene = two_sphere_scene();
  const auto set = set_of({shift(kUp), shift(kDown)});
  const Trajectory t = straight();
  const ObserverThresholds th;
  RefinementState state = RefinementState::initial(set, scene);
  AgentReport r{AgentKind::Parallel, t, {}, 1, 0.0};
  r.outcomes = {{0, CheckKind::Cartesian, 0.1, 0.05, true}, {1, CheckKind::Cartesian, 0.0, 0.05, false}};
  const RefineContext ctx{t, set, scene, kParams, th, 4};
  const auto next = refine({r}, state, ctx);
  ASSERT_TRUE(next);
  EXPECT_DOUBLE_EQ(next->intensity_multipliers[0], 1.0);
  EXPECT_DOUBLE_EQ(next->intensity_multipliers[1], 1.5);
  EXPECT_EQ(next->priority_order, (std::vector<std::size_t>{1, 0}));
  state.round = 4;
  EXPECT_FALSE(refine({r}, state, ctx));
}

TEST(Orchestrate, EasyConstraintSucceedsFirstRound) {
  const Scene scene = two_sphere_scene();
  const auto result = orchestrate(straight(), set_of({shift(kUp)}), scene, kParams);
  ASSERT_TRUE(result.success());
  EXPECT_EQ(*result.success_round, 1);
  EXPECT_EQ(result.rounds_run, 1);
  ASSERT_EQ(result.reports.size(), 4u);
  for (const auto& r : result.reports) EXPECT_TRUE(r.all_passed());
  EXPECT_TRUE(result.best.all_passed());
}

TEST(Orchestrate, FarObjectSucceedsAfterExpansion) {
  Scene scene;
  scene.objects.push_back(sphere_at("far", {0, 0.45, 0}, 0.1));
  const auto result = orchestrate(straight(), set_of({distance_to("far", -1)}), scene, kParams);
  ASSERT_TRUE(result.success());
  EXPECT_GT(*result.success_round, 1);
  EXPECT_TRUE(result.best.all_passed());
}

TEST(Orchestrate, ContradictionExhaustsRounds) {
  const Scene scene = two_sphere_scene();
  OrchestrateOptions opts;
  opts.thresholds.distance = 5.0;
  const auto set = set_of({distance_to("a", 1), distance_to("a", -1)});
  const auto result = orchestrate(straight(), set, scene, kParams, opts);
  EXPECT_FALSE(result.success());
  EXPECT_EQ(result.rounds_run, 4);
  EXPECT_EQ(result.reports.size(), 16u);
  EXPECT_EQ(result.best.outcomes.size(), 2u);
  for (const auto& r : result.reports) EXPECT_FALSE(r.all_passed());
}

TEST(Orchestrate, DeterministicAndConcurrencyInvariant) {
  const Sample s = generate_sample(sample_seed(17, 3), SampleKind::Complex);
  const Scene scene = apply_influence_rule(s.scene, Config{}.influence);
  OrchestrateOptions serial;
  serial.concurrent = false;
  const auto a = orchestrate(s.trajectory, s.ground_truth, scene, kParams);
  const auto b = orchestrate(s.trajectory, s.ground_truth, scene, kParams);
  const auto c = orchestrate(s.trajectory, s.ground_truth, scene, kParams, serial);
  ASSERT_EQ(a.reports.size(), b.reports.size());
  ASSERT_EQ(a.reports.size(), c.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_EQ(a.reports[i].candidate.waypoints(), b.reports[i].candidate.waypoints());
    EXPECT_EQ(a.reports[i].candidate.waypoints(), c.reports[i].candidate.waypoints());
  }
  EXPECT_EQ(a.best.candidate.waypoints(), b.best.candidate.waypoints());
}

TEST(Orchestrate, DatasetProperties) {
  const Config config;
  int orchestrator = 0;
  std::array<int, 4> per_agent{};
  for (std::size_t i = 0; i < 12; ++i) {
    const Sample s = generate_sample(sample_seed(23, i), i % 2 ? SampleKind::Multi : SampleKind::Single);
    const Scene scene = apply_influence_rule(s.scene, config.influence);
    OrchestrateOptions opts;
    opts.exhaustive = true;
    const auto r = orchestrate(s.trajectory, s.ground_truth, scene, config.optimizer, opts);
    orchestrator += r.success();
    for (std::size_t a = 0; a < 4; ++a) per_agent[a] += r.agent_success_round[a].has_value();

    // A fully passed report re-checks as fully passed.
    if (r.best.all_passed()) {
      const auto again = observe(s.trajectory, r.best.candidate, s.ground_truth, scene, opts.thresholds);
      for (const auto& o : again) EXPECT_TRUE(o.passed);
    }

    // Scenes solved within r rounds stay solved, in the same round, with one more.
    std::optional<int> previous;
    for (int rounds = 1; rounds <= 4; ++rounds) {
      OrchestrateOptions capped;
      capped.max_rounds = rounds;
      const auto c = orchestrate(s.trajectory, s.ground_truth, scene, config.optimizer, capped);
      if (previous) {
        ASSERT_TRUE(c.success());
        EXPECT_EQ(*c.success_round, *previous);
      }
      previous = c.success_round;
    }
  }
  for (int a : per_agent) EXPECT_GE(orchestrator, a);
}
