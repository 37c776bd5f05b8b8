#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "georeshape/errors.hpp"
#include "georeshape/io.hpp"
#include "georeshape/serialization.hpp"
#include "georeshape/trajectory.hpp"
#include "oracles.hpp"

using namespace georeshape;

namespace {

Trajectory circle_arc(std::size_t n, double radius, double sweep) {
  std::vector<Waypoint> w;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = sweep * static_cast<double>(i) / static_cast<double>(n - 1);
    w.push_back({{radius * std::cos(a), radius * std::sin(a), 0.0}, 0.5});
  }
  return Trajectory(std::move(w));
}

Trajectory random_walk(std::mt19937_64& rng, std::size_t n, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::uniform_real_distribution<double> v(0.0, 2.0);
  std::vector<Waypoint> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back({{u(rng), u(rng), u(rng)}, v(rng)});
  return Trajectory(std::move(w));
}

double polyline_length(const std::vector<Vec3>& p) {
  double s = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) s += distance(p[i], p[i - 1]);
  return s;
}

}  // namespace

TEST(Trajectory, RejectsInvalidInput) {
  EXPECT_THROW(Trajectory({{{0, 0, 0}, 1}, {{1, 0, 0}, 1}, {{2, 0, 0}, 1}}), std::invalid_argument);
  EXPECT_THROW(Trajectory({{{0, 0, 0}, 1}, {{0, 0, 0}, 1}, {{1, 0, 0}, 1}, {{2, 0, 0}, 1}}),
               std::invalid_argument);
  EXPECT_THROW(Trajectory({{{0, 0, 0}, -1}, {{1, 0, 0}, 1}, {{2, 0, 0}, 1}, {{3, 0, 0}, 1}}),
               std::invalid_argument);
  EXPECT_THROW(Trajectory({{{0, 0, NAN}, 1}, {{1, 0, 0}, 1}, {{2, 0, 0}, 1}, {{3, 0, 0}, 1}}),
               std::invalid_argument);
}

TEST(Trajectory, ReferenceSurvivesEdits) {
  const Trajectory t = oracle::line({0, 0, 0}, {1, 0, 0}, 5);
  auto w = t.waypoints();
  w[2].position.y = 0.3;
  const Trajectory edited = t.with_waypoints(w);
  EXPECT_EQ(edited.original_waypoints(), t.waypoints());
  EXPECT_EQ(edited.rebased().original_waypoints(), w);
}

TEST(Normalize, IdentityInsideUnitCube) {
  std::vector<Waypoint> w = {{{-1, -1, -1}, 0.2}, {{1, -1, 0}, 1.0}, {{1, 1, 0}, 0.5}, {{1, 1, 1}, 0.1}};
  const auto n = normalize_scene(Trajectory(w), Scene{});
  EXPECT_NEAR(n.transform.spatial_scale, 1.0, 1e-12);
  EXPECT_NEAR(n.transform.speed_scale, 1.0, 1e-12);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(distance(n.trajectory[i].position, w[i].position), 0.0, 1e-12);
  }
}

TEST(Normalize, SpanZeroToTen) {
  std::vector<Waypoint> w = {{{0, 0, 0}, 2}, {{10, 0, 0}, 4}, {{10, 10, 0}, 1}, {{10, 10, 10}, 3}};
  Scene scene;
  scene.objects.push_back({"b", "ball", Sphere{1.0}, Pose::translation({5, 5, 5}), std::nullopt, 0.5});
  const auto n = normalize_scene(Trajectory(w), scene);
  EXPECT_NEAR(n.transform.spatial_scale, 5.0, 1e-12);
  EXPECT_NEAR(distance(n.transform.spatial_center, {5, 5, 5}), 0.0, 1e-12);
  EXPECT_NEAR(n.transform.speed_scale, 4.0, 1e-12);
  for (const auto& p : n.trajectory.waypoints()) {
    for (int a = 0; a < 3; ++a) EXPECT_LE(std::abs(p.position[a]), 1.0 + 1e-12);
  }
  EXPECT_NEAR(std::get<Sphere>(n.scene.objects[0].primitive).radius, 0.2, 1e-12);
  EXPECT_NEAR(n.scene.objects[0].pose.position().norm(), 0.0, 1e-12);
}

TEST(Normalize, RoundTripRandom) {
  std::mt19937_64 rng(3);
  for (int seed = 0; seed < 100; ++seed) {
    const Trajectory t = random_walk(rng, 12, 20.0);
    Scene scene;
    scene.objects.push_back(
        {"c", "can", Cylinder{0.5, 1.0}, oracle::random_pose(rng, 15.0), std::nullopt, 0.5});
    const auto n = normalize_scene(t, scene);
    const Trajectory back = denormalize(n.trajectory, n.transform);
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_NEAR(distance(back[i].position, t[i].position), 0.0, 1e-9);
      EXPECT_NEAR(back[i].speed, t[i].speed, 1e-9);
    }
    const Scene scene_back = denormalize(n.scene, n.transform);
    EXPECT_NEAR(distance(scene_back.objects[0].pose.position(), scene.objects[0].pose.position()),
                0.0, 1e-9);
    EXPECT_NEAR(std::get<Cylinder>(scene_back.objects[0].primitive).radius, 0.5, 1e-9);
  }
}

TEST(Normalize, IdempotentOnNormalizedScene) {
  std::mt19937_64 rng(4);
  const auto first = normalize_scene(random_walk(rng, 10, 7.0), Scene{});
  const auto second = normalize_scene(first.trajectory, first.scene);
  EXPECT_NEAR(second.transform.spatial_scale, 1.0, 1e-9);
}

TEST(Denormalize, ScaleOnlyDoubles) {
  NormalizationTransform t;
  t.spatial_scale = 2.0;
  const Trajectory line = oracle::line({0, 1, 0}, {1, 1, 0}, 4);
  const Trajectory out = denormalize(line, t);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(out[i].position.x, 2.0 * line[i].position.x);
    EXPECT_DOUBLE_EQ(out[i].position.y, 2.0);
  }
  EXPECT_EQ(denormalize(line, NormalizationTransform{}).waypoints(), line.waypoints());
}

TEST(Resample, StraightLineIsUniform) {
  const Trajectory in = oracle::line({0, 0, 0}, {3, 0, 0}, 7);
  for (std::size_t n : {4u, 9u, 50u}) {
    const Trajectory out = resample(in, n);
    ASSERT_EQ(out.size(), n);
    const double step = 3.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(out[i].position.x, step * static_cast<double>(i), 1e-9);
      EXPECT_NEAR(out[i].position.y, 0.0, 1e-12);
      EXPECT_NEAR(out[i].position.z, 0.0, 1e-12);
    }
  }
}

TEST(Resample, FixedPointOnUniformInput) {
  const Trajectory in = circle_arc(40, 1.0, std::numbers::pi / 2);
  const Trajectory out = resample(in, 40);
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_NEAR(distance(out[i].position, in[i].position), 0.0, 1e-6);
  }
}

TEST(Resample, CircleRoundTrip) {
  const double radius = 2.0;
  const Trajectory in = circle_arc(100, radius, 1.5 * std::numbers::pi);
  const Trajectory back = resample(resample(in, 20), 100);
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    worst = std::max(worst, distance(back[i].position, in[i].position));
  }
  EXPECT_LT(worst, 0.02 * radius);
}

TEST(Resample, EndpointsExactAndLengthKept) {
  const Trajectory in = circle_arc(80, 1.0, std::numbers::pi);
  for (std::size_t n : {20u, 33u, 64u, 200u}) {
    const Trajectory out = resample(in, n);
    EXPECT_EQ(out.waypoints().front(), in.waypoints().front());
    EXPECT_EQ(out.waypoints().back(), in.waypoints().back());
    EXPECT_NEAR(polyline_length(out.positions()), std::numbers::pi, 0.01 * std::numbers::pi);
    EXPECT_EQ(out.original_waypoints(), out.waypoints());
  }
}

TEST(Resample, SpeedIsLinearInArcLength) {
  std::vector<Waypoint> w;
  for (int i = 0; i < 5; ++i) w.push_back({{static_cast<double>(i), 0, 0}, static_cast<double>(i)});
  const Trajectory out = resample(Trajectory(w), 9);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i].speed, 0.5 * i, 1e-9);
}

TEST(ClosestIndices, TangentSphere) {
  const Trajectory t = oracle::line({-1.4, 0.5, 0}, {1.4, 0.5, 0}, 15);
  // Waypoint 7 sits at x = 0, touching the sphere's top.
  SceneObject s{"s", "s", Sphere{0.5}, Pose(), std::nullopt, 0.5};
  EXPECT_EQ(closest_waypoint_indices(t, s, 5).front(), 7u);
}

TEST(ClosestIndices, EquidistantTieBreak) {
  const std::vector<Waypoint> w = {{{2, 0, 0}, 1},  {{0, 2, 0}, 1}, {{-2, 0, 0}, 1},
                                   {{0, -2, 0}, 1}, {{0, 0, 2}, 1}, {{0, 0, -2}, 1}};
  SceneObject s{"s", "s", Sphere{0.5}, Pose(), std::nullopt, 0.5};
  const auto idx = closest_waypoint_indices(Trajectory(w), s, 5);
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(ClosestIndices, MatchesBruteForceSort) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const Trajectory t = random_walk(rng, 30, 1.0);
    SceneObject obj{"b", "b", Cuboid{{0.2, 0.3, 0.1}}, oracle::random_pose(rng, 0.5), std::nullopt, 0.5};
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < t.size(); ++i) {
      all.push_back({closest_point(t[i].position, obj).signed_distance, i});
    }
    std::sort(all.begin(), all.end());
    const auto got = closest_waypoint_indices(t, obj, t.size());
    ASSERT_EQ(got.size(), t.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], all[i].second);
  }
}

TEST(TrajectoryFiles, CsvRoundTripIsExact) {
  std::mt19937_64 rng(6);
  const Trajectory t = random_walk(rng, 9, 3.0);
  const auto dir = std::filesystem::temp_directory_path() / "georeshape_traj_test";
  write_text_file(dir / "t.csv", format_trajectory(t, TrajectoryFormat::Csv));
  write_text_file(dir / "t.json", format_trajectory(t, TrajectoryFormat::Json));
  EXPECT_EQ(read_trajectory_file(dir / "t.csv").waypoints(), t.waypoints());
  EXPECT_EQ(read_trajectory_file(dir / "t.json").waypoints(), t.waypoints());
  std::filesystem::remove_all(dir);
}

TEST(TrajectoryFiles, CsvWithoutHeader) {
  const auto dir = std::filesystem::temp_directory_path() / "georeshape_traj_test2";
  write_text_file(dir / "t.csv", "0,0,0,1\n1,0,0,1\n2,0,0,1\n3,0.5,0,0.5\n");
  const Trajectory t = read_trajectory_file(dir / "t.csv");
  EXPECT_EQ(t.size(), 4u);
  EXPECT_DOUBLE_EQ(t[3].position.y, 0.5);
  std::filesystem::remove_all(dir);
}

TEST(TrajectoryJson, ReportsFieldPath) {
  const Json j = Json::parse(R"([{"x":0,"y":0,"z":0,"v":1},{"x":1,"y":0,"z":0},
                                 {"x":2,"y":0,"z":0,"v":1},{"x":3,"y":0,"z":0,"v":1}])");
  try {
    trajectory_from_json(j, "trajectory");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "trajectory[1].v");
  }
}
