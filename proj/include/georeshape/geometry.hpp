#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace georeshape {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr double squared_norm() const { return dot(*this); }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Unit quaternion, w + xi + yj + zk.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quat identity() { return {}; }
  static Quat from_axis_angle(const Vec3& axis, double angle);
  /// Columns are the images of the local X, Y, Z axes. Must be a proper rotation.
  static Quat from_columns(const Vec3& ex, const Vec3& ey, const Vec3& ez);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat normalized() const;
  Quat conjugate() const { return {w, -x, -y, -z}; }
  Quat operator*(const Quat& o) const;
  Vec3 rotate(const Vec3& v) const;
  bool operator==(const Quat&) const = default;
};

/// Rigid transform mapping local coordinates to world coordinates.
class Pose {
 public:
  Pose() = default;
  /// Normalizes `orientation`; throws std::invalid_argument on a zero or
  /// non-finite quaternion.
  Pose(const Vec3& position, const Quat& orientation);

  static Pose translation(const Vec3& t) { return Pose(t, Quat::identity()); }

  const Vec3& position() const { return position_; }
  const Quat& orientation() const { return orientation_; }

  Vec3 to_world(const Vec3& local) const { return orientation_.rotate(local) + position_; }
  Vec3 to_local(const Vec3& world) const {
    return orientation_.conjugate().rotate(world - position_);
  }
  Vec3 rotate_to_world(const Vec3& v) const { return orientation_.rotate(v); }
  Vec3 rotate_to_local(const Vec3& v) const { return orientation_.conjugate().rotate(v); }

  Pose inverse() const;
  /// this * other: apply `other` first, then this.
  Pose compose(const Pose& other) const;

  bool operator==(const Pose&) const = default;

 private:
  Vec3 position_;
  Quat orientation_;
};

struct Sphere {
  double radius = 1.0;
  bool operator==(const Sphere&) const = default;
};

/// Finite rectangle in the local XY plane, normal +Z.
struct RectPlane {
  double half_width = 1.0;
  double half_height = 1.0;
  bool operator==(const RectPlane&) const = default;
};

/// Axis along local Z, centered at the origin.
struct Cylinder {
  double radius = 1.0;
  double half_length = 1.0;
  bool operator==(const Cylinder&) const = default;
};

/// Base disc at local Z = 0, apex at local (0, 0, height).
struct Cone {
  double base_radius = 1.0;
  double height = 1.0;
  bool operator==(const Cone&) const = default;
};

struct Cuboid {
  Vec3 half_extents{1.0, 1.0, 1.0};
  bool operator==(const Cuboid&) const = default;
};

using Primitive = std::variant<Sphere, RectPlane, Cylinder, Cone, Cuboid>;

/// Throws std::invalid_argument unless every dimension is finite and > 0.
void validate(const Primitive& primitive);

/// "sphere", "plane", "cylinder", "cone" or "cuboid".
std::string shape_name(const Primitive& primitive);

/// Largest dimension field of the primitive (radius, half length, height, ...).
double largest_dimension(const Primitive& primitive);

/// Radius of a sphere about the local origin enclosing the whole primitive.
double bounding_radius(const Primitive& primitive);

/// Multiplies every dimension field by `factor`.
Primitive scaled(const Primitive& primitive, double factor);

/// Local-frame centroid of the solid (the cone's is off its origin).
Vec3 local_centroid(const Primitive& primitive);

struct SceneObject {
  std::string id;
  std::string name;
  Primitive primitive;
  Pose pose;
  /// Range of the object's potential field in normalized units. Unset means
  /// "use default_influence_radius", which tracks the current dimensions.
  std::optional<double> influence_radius;
  double fragility = 0.5;
};

/// max(0.3, 1.5 x largest primitive dimension).
double default_influence_radius(const Primitive& primitive);
double influence_radius(const SceneObject& object);

/// World-frame centroid of the object's solid.
Vec3 centroid(const SceneObject& object);

struct Scene {
  std::vector<SceneObject> objects;

  const SceneObject* find(const std::string& id) const;
  SceneObject* find(const std::string& id);
};

/// Throws std::invalid_argument on duplicate ids or invalid primitives.
void validate(const Scene& scene);

struct ProximityResult {
  Vec3 closest_point;
  /// Negative strictly inside a solid; never negative for RectPlane.
  double signed_distance = 0.0;
  Vec3 outward_normal{1.0, 0.0, 0.0};
};

ProximityResult closest_point_sphere(const Vec3& query, double radius, const Pose& pose);
ProximityResult closest_point_rect_plane(const Vec3& query, double half_width,
                                         double half_height, const Pose& pose);
ProximityResult closest_point_cylinder(const Vec3& query, double radius, double half_length,
                                       const Pose& pose);
ProximityResult closest_point_cone(const Vec3& query, double base_radius, double height,
                                   const Pose& pose);
ProximityResult closest_point_cuboid(const Vec3& query, const Vec3& half_extents,
                                     const Pose& pose);

ProximityResult closest_point(const Vec3& query, const Primitive& primitive, const Pose& pose);
ProximityResult closest_point(const Vec3& query, const SceneObject& object);

/// Results for the points whose signed distance is within the object's
/// influence radius, paired with their index in `points`.
std::vector<std::pair<std::size_t, ProximityResult>> batch_proximity(
    const std::vector<Vec3>& points, const SceneObject& object);

}  // namespace georeshape
