#include "georeshape/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace georeshape {

namespace {

constexpr double kDegenerate = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Closed surfaces of revolution are handled in the half-plane (rho >= 0, z)
// through the query's azimuth. The surface is the union of profile segments.
struct Point2 {
  double rho;
  double z;
};

struct ProfileSegment {
  Point2 a;
  Point2 b;
  Point2 outward;  // unit normal in the half-plane
};

struct ProfileHit {
  Point2 point;
  double distance;
  Point2 outward;
};

ProfileHit closest_on_profile(const Point2& q, const ProfileSegment* segments, std::size_t count) {
  ProfileHit best{{0.0, 0.0}, std::numeric_limits<double>::infinity(), {1.0, 0.0}};
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = segments[i];
    const double dr = s.b.rho - s.a.rho;
    const double dz = s.b.z - s.a.z;
    const double len2 = dr * dr + dz * dz;
    const double t = clamp(((q.rho - s.a.rho) * dr + (q.z - s.a.z) * dz) / len2, 0.0, 1.0);
    const Point2 p{s.a.rho + t * dr, s.a.z + t * dz};
    const double d = std::hypot(q.rho - p.rho, q.z - p.z);
    if (d < best.distance) best = {p, d, s.outward};
  }
  return best;
}

// Builds the world-frame result for a surface of revolution about local Z.
ProximityResult revolve(const Vec3& local, const ProfileSegment* segments, std::size_t count,
                        bool inside, const Pose& pose) {
  const double rho = std::hypot(local.x, local.y);
  const Vec3 radial = rho < kDegenerate ? Vec3{1.0, 0.0, 0.0} : Vec3{local.x / rho, local.y / rho, 0.0};
  const ProfileHit hit = closest_on_profile({rho, local.z}, segments, count);

  const Vec3 closest = radial * hit.point.rho + Vec3{0.0, 0.0, hit.point.z};
  Vec3 normal = radial * hit.outward.rho + Vec3{0.0, 0.0, hit.outward.z};
  if (!inside && hit.distance > kDegenerate) normal = (local - closest) / hit.distance;

  ProximityResult r;
  r.closest_point = pose.to_world(closest);
  r.signed_distance = inside ? -hit.distance : hit.distance;
  r.outward_normal = pose.rotate_to_world(normal);
  return r;
}

}  // namespace

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < kDegenerate) return identity();
  const double s = std::sin(angle / 2.0) / n;
  return Quat{std::cos(angle / 2.0), axis.x * s, axis.y * s, axis.z * s}.normalized();
}

Quat Quat::from_columns(const Vec3& ex, const Vec3& ey, const Vec3& ez) {
  // Rotation matrix R with R(:,0)=ex, R(:,1)=ey, R(:,2)=ez.
  const double m00 = ex.x, m10 = ex.y, m20 = ex.z;
  const double m01 = ey.x, m11 = ey.y, m21 = ey.z;
  const double m02 = ez.x, m12 = ez.y, m22 = ez.z;
  const double trace = m00 + m11 + m22;
  Quat q;
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
  } else if (m00 > m11 && m00 > m22) {
    const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
    q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
  } else if (m11 > m22) {
    const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
    q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
  } else {
    const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
  }
  return q.normalized();
}

Quat Quat::normalized() const {
  const double n = norm();
  if (!(n > kDegenerate) || !std::isfinite(n)) {
    throw std::invalid_argument("quaternion cannot be normalized");
  }
  // Leaves already-unit values bit-identical so serialization round-trips.
  if (std::abs(n - 1.0) <= 1e-14) return *this;
  return {w / n, x / n, y / n, z / n};
}

Quat Quat::operator*(const Quat& o) const {
  return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
          w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
}

Vec3 Quat::rotate(const Vec3& v) const {
  // v' = v + 2 q_v x (q_v x v + w v)
  const Vec3 qv{x, y, z};
  const Vec3 t = qv.cross(v) * 2.0;
  return v + t * w + qv.cross(t);
}

Pose::Pose(const Vec3& position, const Quat& orientation)
    : position_(position), orientation_(orientation.normalized()) {
  if (!position.is_finite()) throw std::invalid_argument("pose position must be finite");
}

Pose Pose::inverse() const {
  const Quat inv = orientation_.conjugate();
  return Pose(-inv.rotate(position_), inv);
}

Pose Pose::compose(const Pose& other) const {
  return Pose(to_world(other.position_), orientation_ * other.orientation_);
}

void validate(const Primitive& primitive) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  const bool ok = std::visit(
      Overloaded{
          [&](const Sphere& s) { return positive(s.radius); },
          [&](const RectPlane& p) { return positive(p.half_width) && positive(p.half_height); },
          [&](const Cylinder& c) { return positive(c.radius) && positive(c.half_length); },
          [&](const Cone& c) { return positive(c.base_radius) && positive(c.height); },
          [&](const Cuboid& b) {
            return positive(b.half_extents.x) && positive(b.half_extents.y) &&
                   positive(b.half_extents.z);
          },
      },
      primitive);
  if (!ok) throw std::invalid_argument(shape_name(primitive) + ": dimensions must be > 0");
}

std::string shape_name(const Primitive& primitive) {
  return std::visit(Overloaded{
                        [](const Sphere&) { return std::string("sphere"); },
                        [](const RectPlane&) { return std::string("plane"); },
                        [](const Cylinder&) { return std::string("cylinder"); },
                        [](const Cone&) { return std::string("cone"); },
                        [](const Cuboid&) { return std::string("cuboid"); },
                    },
                    primitive);
}

double largest_dimension(const Primitive& primitive) {
  return std::visit(
      Overloaded{
          [](const Sphere& s) { return s.radius; },
          [](const RectPlane& p) { return std::max(p.half_width, p.half_height); },
          [](const Cylinder& c) { return std::max(c.radius, c.half_length); },
          [](const Cone& c) { return std::max(c.base_radius, c.height); },
          [](const Cuboid& b) {
            return std::max({b.half_extents.x, b.half_extents.y, b.half_extents.z});
          },
      },
      primitive);
}

double bounding_radius(const Primitive& primitive) {
  return std::visit(Overloaded{
                        [](const Sphere& s) { return s.radius; },
                        [](const RectPlane& p) { return std::hypot(p.half_width, p.half_height); },
                        [](const Cylinder& c) { return std::hypot(c.radius, c.half_length); },
                        [](const Cone& c) { return std::max(c.base_radius, c.height); },
                        [](const Cuboid& b) { return b.half_extents.norm(); },
                    },
                    primitive);
}

Primitive scaled(const Primitive& primitive, double factor) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) -> Primitive { return Sphere{s.radius * factor}; },
          [&](const RectPlane& p) -> Primitive {
            return RectPlane{p.half_width * factor, p.half_height * factor};
          },
          [&](const Cylinder& c) -> Primitive {
            return Cylinder{c.radius * factor, c.half_length * factor};
          },
          [&](const Cone& c) -> Primitive { return Cone{c.base_radius * factor, c.height * factor}; },
          [&](const Cuboid& b) -> Primitive { return Cuboid{b.half_extents * factor}; },
      },
      primitive);
}

Vec3 local_centroid(const Primitive& primitive) {
  if (const auto* cone = std::get_if<Cone>(&primitive)) return {0.0, 0.0, cone->height / 4.0};
  return {};
}

double default_influence_radius(const Primitive& primitive) {
  return std::max(0.3, 1.5 * largest_dimension(primitive));
}

double influence_radius(const SceneObject& object) {
  return object.influence_radius.value_or(default_influence_radius(object.primitive));
}

Vec3 centroid(const SceneObject& object) {
  return object.pose.to_world(local_centroid(object.primitive));
}

const SceneObject* Scene::find(const std::string& id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

SceneObject* Scene::find(const std::string& id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

void validate(const Scene& scene) {
  std::unordered_set<std::string> ids;
  for (const auto& o : scene.objects) {
    if (o.id.empty()) throw std::invalid_argument("object id must not be empty");
    if (!ids.insert(o.id).second) throw std::invalid_argument("duplicate object id '" + o.id + "'");
    validate(o.primitive);
    if (o.influence_radius && !(*o.influence_radius > 0.0)) {
      throw std::invalid_argument(o.id + ": influence_radius must be > 0");
    }
    if (!(o.fragility >= 0.0 && o.fragility <= 1.0)) {
      throw std::invalid_argument(o.id + ": fragility must lie in [0, 1]");
    }
  }
}

ProximityResult closest_point_sphere(const Vec3& query, double radius, const Pose& pose) {
  const Vec3 offset = query - pose.position();
  const double r = offset.norm();
  const Vec3 dir = r < kDegenerate ? pose.rotate_to_world({1.0, 0.0, 0.0}) : offset / r;
  ProximityResult result;
  result.closest_point = pose.position() + dir * radius;
  result.signed_distance = r - radius;
  result.outward_normal = dir;
  return result;
}

ProximityResult closest_point_rect_plane(const Vec3& query, double half_width, double half_height,
                                         const Pose& pose) {
  const Vec3 local = pose.to_local(query);
  const Vec3 closest{clamp(local.x, -half_width, half_width),
                     clamp(local.y, -half_height, half_height), 0.0};
  const Vec3 diff = local - closest;
  const double d = diff.norm();
  ProximityResult result;
  result.closest_point = pose.to_world(closest);
  result.signed_distance = d;
  result.outward_normal = pose.rotate_to_world(d > kDegenerate ? diff / d : Vec3{0.0, 0.0, 1.0});
  return result;
}

ProximityResult closest_point_cylinder(const Vec3& query, double radius, double half_length,
                                       const Pose& pose) {
  const Vec3 local = pose.to_local(query);
  const std::array<ProfileSegment, 3> profile{{
      {{radius, -half_length}, {radius, half_length}, {1.0, 0.0}},
      {{0.0, half_length}, {radius, half_length}, {0.0, 1.0}},
      {{0.0, -half_length}, {radius, -half_length}, {0.0, -1.0}},
  }};
  const bool inside =
      std::hypot(local.x, local.y) < radius && std::abs(local.z) < half_length;
  return revolve(local, profile.data(), profile.size(), inside, pose);
}

ProximityResult closest_point_cone(const Vec3& query, double base_radius, double height,
                                   const Pose& pose) {
  const Vec3 local = pose.to_local(query);
  const double slant = std::hypot(base_radius, height);
  const std::array<ProfileSegment, 2> profile{{
      {{0.0, 0.0}, {base_radius, 0.0}, {0.0, -1.0}},
      {{base_radius, 0.0}, {0.0, height}, {height / slant, base_radius / slant}},
  }};
  const double rho = std::hypot(local.x, local.y);
  const bool inside = local.z > 0.0 && local.z < height * (1.0 - rho / base_radius);
  return revolve(local, profile.data(), profile.size(), inside, pose);
}

ProximityResult closest_point_cuboid(const Vec3& query, const Vec3& half_extents,
                                     const Pose& pose) {
  const Vec3 local = pose.to_local(query);

  // Nearest face: smallest gap h_i - |q_i|, lowest axis on ties, + side at 0.
  int face_axis = 0;
  double face_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double gap = half_extents[i] - std::abs(local[i]);
    if (gap < face_gap) {
      face_gap = gap;
      face_axis = i;
    }
  }
  const double face_sign = local[face_axis] >= 0.0 ? 1.0 : -1.0;
  Vec3 face_normal;
  face_normal[face_axis] = face_sign;

  ProximityResult result;
  if (face_gap > 0.0) {
    Vec3 closest = local;
    closest[face_axis] = face_sign * half_extents[face_axis];
    result.closest_point = pose.to_world(closest);
    result.signed_distance = -face_gap;
    result.outward_normal = pose.rotate_to_world(face_normal);
    return result;
  }

  Vec3 closest;
  for (int i = 0; i < 3; ++i) closest[i] = clamp(local[i], -half_extents[i], half_extents[i]);
  const Vec3 diff = local - closest;
  const double d = diff.norm();
  result.closest_point = pose.to_world(closest);
  result.signed_distance = d;
  result.outward_normal = pose.rotate_to_world(d > kDegenerate ? diff / d : face_normal);
  return result;
}

ProximityResult closest_point(const Vec3& query, const Primitive& primitive, const Pose& pose) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) { return closest_point_sphere(query, s.radius, pose); },
          [&](const RectPlane& p) {
            return closest_point_rect_plane(query, p.half_width, p.half_height, pose);
          },
          [&](const Cylinder& c) {
            return closest_point_cylinder(query, c.radius, c.half_length, pose);
          },
          [&](const Cone& c) { return closest_point_cone(query, c.base_radius, c.height, pose); },
          [&](const Cuboid& b) { return closest_point_cuboid(query, b.half_extents, pose); },
      },
      primitive);
}

ProximityResult closest_point(const Vec3& query, const SceneObject& object) {
  return closest_point(query, object.primitive, object.pose);
}

std::vector<std::pair<std::size_t, ProximityResult>> batch_proximity(
    const std::vector<Vec3>& points, const SceneObject& object) {
  const double range = influence_radius(object);
  std::vector<std::pair<std::size_t, ProximityResult>> hits;
  for (std::size_t i = 0; i < points.size(); ++i) {
    ProximityResult r = closest_point(points[i], object);
    if (r.signed_distance <= range) hits.emplace_back(i, r);
  }
  return hits;
}

}  // namespace georeshape
