#include "georeshape/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "georeshape/errors.hpp"

namespace georeshape {

namespace {

constexpr double kTinyCurvature = 1e-12;

void require_same_length(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("waypoint arrays differ in length");
}

}  // namespace

void OptimizerParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be > 0");
    }
  };
  positive(k, "k");
  positive(k_ang, "k_ang");
  positive(w_ext, "w_ext");
  positive(eta, "eta");
  positive(convergence_epsilon, "convergence_epsilon");
  positive(obstacle_range, "obstacle_range");
  positive(obstacle_gain, "obstacle_gain");
  if (!(w_self >= 0.0)) throw std::invalid_argument("w_self must be >= 0");
  if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be > 0");
}

PotentialField make_field(const Constraint& c, const Scene& scene, double radius_multiplier) {
  PotentialField field;
  field.constraint = c;
  if (c.target) {
    const SceneObject* obj = scene.find(*c.target);
    if (!obj) throw std::invalid_argument("constraint targets unknown object '" + *c.target + "'");
    field.object = *obj;
    field.influence_radius = influence_radius(*obj) * radius_multiplier;
  }
  return field;
}

ForceArray spring_forces(const std::vector<Vec3>& current, const std::vector<Vec3>& original,
                         double k) {
  require_same_length(current, original);
  const std::size_t n = current.size();
  if (n < 3) throw std::invalid_argument("spring forces need at least 3 waypoints");
  ForceArray forces(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const Vec3 seg = current[j + 1] - current[j];
    const double len = seg.norm();
    if (len <= 1e-12) {
      throw std::invalid_argument("waypoints " + std::to_string(j) + " and " +
                                  std::to_string(j + 1) + " coincide");
    }
    const double rest = distance(original[j + 1], original[j]);
    const Vec3 pair = seg * (k * (len - rest) / len);
    forces[j] += pair;
    forces[j + 1] -= pair;
  }
  forces.front() = {};
  forces.back() = {};
  return forces;
}

ForceArray curvature_forces(const std::vector<Vec3>& current, const std::vector<Vec3>& original,
                            double k_ang) {
  require_same_length(current, original);
  const std::size_t n = current.size();
  if (n < 3) throw std::invalid_argument("curvature forces need at least 3 waypoints");
  ForceArray forces(n);
  for (std::size_t j = 0; j + 2 < n; ++j) {
    const Vec3 c = (current[j + 2] - current[j + 1]) * 0.5 - (current[j + 1] - current[j]) * 0.5;
    const Vec3 c0 =
        (original[j + 2] - original[j + 1]) * 0.5 - (original[j + 1] - original[j]) * 0.5;
    const double len = c.norm();
    if (len < kTinyCurvature) continue;
    forces[j + 1] += c * (k_ang * (len - c0.norm()) / len);
  }
  return forces;
}

ForceArray self_adherence_forces(const std::vector<Vec3>& current,
                                 const std::vector<Vec3>& original, double w_self) {
  require_same_length(current, original);
  ForceArray forces(current.size());
  for (std::size_t j = 0; j < current.size(); ++j) {
    forces[j] = (current[j] - original[j]) * -w_self;
  }
  return forces;
}

Vec3 external_force(const Vec3& waypoint, const std::vector<PotentialField>& fields,
                    const Scene& scene, const OptimizerParams& params) {
  Vec3 total;
  double pull = 0.0;
  for (const auto& field : fields) {
    const Constraint& c = field.constraint;
    const double gain = c.intensity * c.importance;
    if (c.kind != ConstraintKind::SpeedChange) pull += gain;
    switch (c.kind) {
      case ConstraintKind::SpeedChange:
        break;
      case ConstraintKind::CartesianShift: {
        if (!field.object) {
          total += c.direction * gain;
        } else if (closest_point(waypoint, *field.object).signed_distance <=
                   field.influence_radius) {
          total += c.direction * gain;
        }
        break;
      }
      case ConstraintKind::ObjectDistance: {
        if (!field.object) break;
        const ProximityResult p = closest_point(waypoint, *field.object);
        const double d = p.signed_distance;
        if (d > field.influence_radius) break;
        if (c.sign < 0 && d <= params.obstacle_range) break;
        total += p.outward_normal * (c.sign * gain * (1.0 - d / field.influence_radius));
        break;
      }
    }
  }
  const double repulsion = std::max(params.obstacle_gain, pull);
  for (const auto& obj : scene.objects) {
    const ProximityResult p = closest_point(waypoint, obj);
    const double d = p.signed_distance;
    if (d >= params.obstacle_range) continue;
    const double falloff = d < 0.0 ? 1.0 : 1.0 - d / params.obstacle_range;
    total += p.outward_normal * (repulsion * falloff);
  }
  return total * params.w_ext;
}

std::vector<Vec3> optimization_step(const Trajectory& trajectory, const std::vector<Vec3>& current,
                                    const std::vector<PotentialField>& fields, const Scene& scene,
                                    const OptimizerParams& params, int iteration) {
  const std::vector<Vec3> original = trajectory.original_positions();
  const ForceArray spring = spring_forces(current, original, params.k);
  const ForceArray curvature = curvature_forces(current, original, params.k_ang);
  const ForceArray adherence = self_adherence_forces(current, original, params.w_self);

  std::vector<Vec3> next = current;
  for (std::size_t j = 1; j + 1 < current.size(); ++j) {
    const Vec3 force = spring[j] + curvature[j] + adherence[j] +
                       external_force(current[j], fields, scene, params);
    if (!force.is_finite()) throw NumericError(iteration, static_cast<int>(j));
    next[j] = current[j] + force * params.eta;
  }
  return next;
}

OptimizeResult optimize(const Trajectory& trajectory, const std::vector<PotentialField>& fields,
                        const Scene& scene, const OptimizerParams& params) {
  params.validate();
  std::vector<Vec3> current = trajectory.positions();
  OptimizeResult result{trajectory, 0, false};
  for (int it = 0; it < params.max_iterations; ++it) {
    std::vector<Vec3> next = optimization_step(trajectory, current, fields, scene, params, it);
    double max_step = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      max_step = std::max(max_step, distance(next[j], current[j]));
    }
    if (max_step < params.convergence_epsilon) {
      result.converged = true;
      break;
    }
    current = std::move(next);
    result.iterations = it + 1;
  }

  std::vector<Waypoint> wps = trajectory.waypoints();
  for (std::size_t j = 0; j < wps.size(); ++j) wps[j].position = current[j];
  result.trajectory = trajectory.with_waypoints(std::move(wps));
  return result;
}

Trajectory apply_speed_profile(const Trajectory& trajectory,
                               const std::vector<PotentialField>& fields, const Scene&) {
  std::vector<Waypoint> wps = trajectory.waypoints();
  bool any = false;
  for (auto& w : wps) {
    double factor = 1.0;
    for (const auto& field : fields) {
      const Constraint& c = field.constraint;
      if (c.kind != ConstraintKind::SpeedChange || !field.object) continue;
      const double d = closest_point(w.position, *field.object).signed_distance;
      if (d >= field.influence_radius) continue;
      factor *= 1.0 + c.sign * c.intensity * c.importance * (1.0 - d / field.influence_radius);
      any = true;
    }
    w.speed = std::clamp(w.speed * factor, kMinSpeedFactor * w.speed, kMaxSpeedFactor * w.speed);
  }
  if (!any) return trajectory;
  return trajectory.with_waypoints(std::move(wps));
}

}  // namespace georeshape
