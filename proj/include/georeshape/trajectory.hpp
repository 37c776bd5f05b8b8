#pragma once

#include <cstddef>
#include <vector>

#include "georeshape/geometry.hpp"

namespace georeshape {

struct Waypoint {
  Vec3 position;
  double speed = 0.0;
  bool operator==(const Waypoint&) const = default;
};

/// Ordered waypoints plus the reference copy they were created from. The
/// reference is what the adherence, spring and curvature forces measure
/// deviation against.
class Trajectory {
 public:
  static constexpr std::size_t kMinWaypoints = 4;
  static constexpr double kMinSegmentLength = 1e-9;

  /// Throws std::invalid_argument on fewer than four waypoints, non-finite
  /// values, negative speeds or coincident consecutive positions.
  explicit Trajectory(std::vector<Waypoint> waypoints);

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  const std::vector<Waypoint>& original_waypoints() const { return original_; }
  std::size_t size() const { return waypoints_.size(); }
  const Waypoint& operator[](std::size_t i) const { return waypoints_[i]; }

  std::vector<Vec3> positions() const;
  std::vector<Vec3> original_positions() const;
  std::vector<double> speeds() const;

  /// Same reference, new current waypoints (validated).
  Trajectory with_waypoints(std::vector<Waypoint> waypoints) const;
  /// Current waypoints become the new reference.
  Trajectory rebased() const { return Trajectory(waypoints_); }

  double arc_length() const;

  bool operator==(const Trajectory&) const = default;

 private:
  Trajectory(std::vector<Waypoint> waypoints, std::vector<Waypoint> original);

  std::vector<Waypoint> waypoints_;
  std::vector<Waypoint> original_;
};

/// Maps world coordinates into the normalized frame: p' = (p - center) / scale,
/// v' = v / speed_scale.
struct NormalizationTransform {
  Vec3 spatial_center;
  double spatial_scale = 1.0;
  double speed_scale = 1.0;

  Vec3 to_normalized(const Vec3& p) const { return (p - spatial_center) / spatial_scale; }
  Vec3 to_world(const Vec3& p) const { return p * spatial_scale + spatial_center; }
};

struct NormalizedScene {
  Trajectory trajectory;
  Scene scene;
  NormalizationTransform transform;
};

/// Isotropic scale + translation taking the joint bounding box of waypoints
/// and object centers into [-1, 1]^3; speeds divided by the max speed.
/// Influence radii are already in normalized units and are left untouched.
NormalizedScene normalize_scene(const Trajectory& trajectory, const Scene& scene);

Trajectory denormalize(const Trajectory& trajectory, const NormalizationTransform& transform);
Scene denormalize(const Scene& scene, const NormalizationTransform& transform);

/// Centripetal Catmull-Rom through the positions, sampled at uniform arc
/// length. Speed is interpolated linearly in arc length. Endpoints are kept
/// exactly. The result is its own reference.
Trajectory resample(const Trajectory& trajectory, std::size_t target_n);

/// Indices of the k waypoints closest to the object's surface, ascending by
/// signed distance, ties to the lower index.
std::vector<std::size_t> closest_waypoint_indices(const Trajectory& trajectory,
                                                  const SceneObject& object, std::size_t k = 5);

}  // namespace georeshape
