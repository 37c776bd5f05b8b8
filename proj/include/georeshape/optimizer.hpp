#pragma once

#include <optional>
#include <vector>

#include "georeshape/constraints.hpp"
#include "georeshape/geometry.hpp"
#include "georeshape/trajectory.hpp"

namespace georeshape {

struct OptimizerParams {
  double k = 1.0;                     // segment spring stiffness
  double k_ang = 0.5;                 // curvature stiffness
  double w_ext = 1.0;                 // external force weight
  double w_self = 0.1;                // adherence to the reference path
  double eta = 0.01;                  // step size
  int max_iterations = 200;
  double convergence_epsilon = 1e-5;  // max waypoint displacement per iteration
  double obstacle_range = 0.05;       // repulsion shell thickness
  double obstacle_gain = 2.0;

  /// Throws std::invalid_argument on non-positive values.
  void validate() const;
};

/// One constraint turned into a field. `constraint.intensity` and
/// `constraint.importance` are the effective values after any strategy or
/// refinement scaling.
struct PotentialField {
  Constraint constraint;
  std::optional<SceneObject> object;
  double influence_radius = 0.0;
};

/// Field for `c` against its target in `scene` (if any), radius taken from
/// the object and multiplied by `radius_multiplier`.
PotentialField make_field(const Constraint& c, const Scene& scene, double radius_multiplier = 1.0);

using ForceArray = std::vector<Vec3>;

/// Segment springs toward the reference lengths. The pair term
/// f_j = k (|w_{j+1}-w_j| - |w0_{j+1}-w0_j|) u_j is applied restoratively,
/// +f_j on waypoint j and -f_j on j+1. Endpoint forces are zero.
ForceArray spring_forces(const std::vector<Vec3>& current, const std::vector<Vec3>& original,
                         double k);

/// c_j = (w_{j+2} - w_{j+1})/2 - (w_{j+1} - w_j)/2; waypoint j+1 receives
/// k_ang (|c_j| - |c0_j|) c_j/|c_j|. Zero where |c_j| < 1e-12.
ForceArray curvature_forces(const std::vector<Vec3>& current, const std::vector<Vec3>& original,
                            double k_ang);

/// -w_self (w_j - w0_j).
ForceArray self_adherence_forces(const std::vector<Vec3>& current,
                                 const std::vector<Vec3>& original, double w_self);

/// w_ext times the sum of the constraint terms and the obstacle repulsion of
/// every scene object. The repulsion gain is max(obstacle_gain, sum of
/// intensity * importance over the positional fields).
///
/// No-penetration: attraction is zero inside the repulsion shell
/// (d <= obstacle_range) and repulsion at the surface is at least the total
/// positional pull, so waypoints cannot be pushed through a surface as long
/// as a single step (eta * |F_total|) is shorter than the shell.
Vec3 external_force(const Vec3& waypoint, const std::vector<PotentialField>& fields,
                    const Scene& scene, const OptimizerParams& params);

/// One Jacobi update of all interior positions; endpoints are copied through.
std::vector<Vec3> optimization_step(const Trajectory& trajectory, const std::vector<Vec3>& current,
                                    const std::vector<PotentialField>& fields, const Scene& scene,
                                    const OptimizerParams& params, int iteration = 0);

struct OptimizeResult {
  Trajectory trajectory;
  int iterations = 0;
  bool converged = false;
};

/// Iterates optimization_step until max_iterations or until the largest
/// displacement drops below convergence_epsilon. Positions only; the
/// reference waypoints of `trajectory` are kept. Throws NumericError on a
/// non-finite force.
OptimizeResult optimize(const Trajectory& trajectory, const std::vector<PotentialField>& fields,
                        const Scene& scene, const OptimizerParams& params);

inline constexpr double kMinSpeedFactor = 0.05;
inline constexpr double kMaxSpeedFactor = 3.0;

/// Speed post-pass for SpeedChange fields: inside a field's radius the speed
/// is multiplied by 1 + sign * intensity * importance * (1 - d/radius);
/// several fields compose multiplicatively and the result is clamped to
/// [0.05, 3] times the incoming speed.
Trajectory apply_speed_profile(const Trajectory& trajectory,
                               const std::vector<PotentialField>& fields, const Scene& scene);

}  // namespace georeshape
