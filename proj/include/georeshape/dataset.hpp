#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "georeshape/constraints.hpp"
#include "georeshape/serialization.hpp"
#include "georeshape/trajectory.hpp"

namespace georeshape {

enum class SampleKind { Single, Multi, Complex };

std::string to_string(SampleKind kind);
SampleKind sample_kind_from_string(const std::string& text);

struct Sample {
  Trajectory trajectory;
  Scene scene;
  std::string command_text;
  ConstraintSet ground_truth;
  std::uint64_t seed = 0;
  SampleKind kind = SampleKind::Single;
};

/// Seeded generator with a fixed bit-to-value mapping, so streams are the
/// same on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform in [0, n).
  std::size_t index(std::size_t n);
  std::uint64_t fork();

 private:
  std::uint64_t state_;
};

/// Control points uniform in [-0.8, 0.8]^3 with speeds uniform in
/// [0.3, 1.0], spline-resampled to `n` waypoints. Draws that leave
/// [-1, 1]^3 after resampling are redrawn.
Trajectory random_trajectory(std::uint64_t seed, std::size_t control_points = 6,
                             std::size_t n = 64);

inline constexpr int kSceneRejectionBudget = 1000;
inline constexpr double kMinTrajectoryClearance = 0.02;

/// `m` objects in [1, 4] with shapes uniform over sphere, cylinder, cone and
/// cuboid, dimensions in [0.1, 0.4], centers in [-0.6, 0.6]^3 and random
/// orientation. Bounding spheres are disjoint and every waypoint of
/// `trajectory` stays more than 0.02 outside every object, while each object
/// comes within its influence radius of the trajectory. Throws Error when
/// 1000 placement attempts do not produce the scene.
Scene random_scene(std::uint64_t seed, std::size_t m, const Trajectory& trajectory);

/// single: 1 clause; multi: 2 clauses on distinct targets and axes;
/// complex: 3 or 4 clauses that may share targets. The command text is
/// built from the template grammar so `ground_truth` is its exact
/// interpretation.
Sample generate_sample(std::uint64_t seed, SampleKind kind);

Json sample_to_json(const Sample& sample);
Sample sample_from_json(const Json& j);

/// Seed of the i-th sample of a dataset.
std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t index);

/// Writes sample_NNNNN.json files plus manifest.json ({"samples": [{"file",
/// "seed", "kind"}]}) into `dir`. Returns the manifest.
Json write_dataset(const std::filesystem::path& dir, std::uint64_t base_seed, std::size_t count,
                   SampleKind kind);

/// Samples listed in `dir`/manifest.json, in manifest order.
std::vector<Sample> read_dataset(const std::filesystem::path& dir);

}  // namespace georeshape
