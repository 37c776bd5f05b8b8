#pragma once

#include <string>
#include <vector>

#include "georeshape/geometry.hpp"

namespace georeshape {

enum class ShapeHint { Sphere, Cylinder, Cone, Cuboid };

std::string to_string(ShapeHint hint);
/// Accepts "sphere", "cylinder", "cone", "cuboid" (also "cube", "box").
ShapeHint shape_hint_from_string(const std::string& text);

struct PointCloud {
  std::vector<Vec3> points;
  std::string label;
  ShapeHint shape_hint = ShapeHint::Cuboid;
};

struct OrientedBox {
  Pose pose;
  Vec3 half_extents;
};

struct RegistrationParams {
  int outlier_neighbors = 20;
  double outlier_std_ratio = 1.0;
  double cluster_eps = 0.15;
  int cluster_min_points = 15;
};

/// Drops points whose mean distance to their `neighbors` nearest neighbours
/// exceeds mean + std_ratio * stddev of that statistic over the cloud.
/// Throws InsufficientDataError unless the cloud has more than `neighbors`
/// points.
PointCloud remove_statistical_outliers(const PointCloud& cloud, int neighbors = 20,
                                       double std_ratio = 1.0);

/// Density-based clustering. A point is core when at least `min_points`
/// points (itself included) lie within `eps`. Noise is discarded; clusters
/// are returned largest first. Throws NoClusterError when nothing clusters.
std::vector<PointCloud> dbscan_cluster(const PointCloud& cloud, double eps = 0.15,
                                       int min_points = 15);

/// Principal-axes box, tightened by a local volume descent over small
/// rotations. Axes start in descending covariance eigenvalue order; the first
/// two are signed so their first non-zero world component
/// (X, then Y, then Z) is positive and the third completes a right-handed
/// frame. Throws DegenerateCloudError for fewer than 4 points or a rank
/// deficient covariance.
OrientedBox fit_obb(const PointCloud& cloud);

/// Maps the box onto the hinted primitive:
///  - sphere:   radius = mean half extent, centered on the box
///  - cuboid:   the box itself
///  - cylinder: axis = longest box axis, radius = mean of the other two half
///              extents, half_length = longest half extent
///  - cone:     same axis and radius, height = 2 x longest half extent, base
///              at the axis end holding more points
/// The influence radius is left to the default rule.
SceneObject fit_primitive(ShapeHint hint, const OrientedBox& obb, const PointCloud& cloud);

/// Outlier removal, clustering (largest cluster), box and primitive fit.
SceneObject register_object(const PointCloud& cloud, const RegistrationParams& params = {});

}  // namespace georeshape
