#include "georeshape/serialization.hpp"

#include <cmath>
#include <stdexcept>

#include "georeshape/errors.hpp"

namespace georeshape {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(join(path, key), "missing field");
  return *it;
}

std::string string_at(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_string()) throw ParseError(join(path, key), "expected a string");
  return v.get<std::string>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                    const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ParseError(join(path, key), "unknown field");
  }
}

Json dimensions_to_json(const Primitive& p) {
  if (const auto* s = std::get_if<Sphere>(&p)) return {{"radius", s->radius}};
  if (const auto* r = std::get_if<RectPlane>(&p)) {
    return {{"half_width", r->half_width}, {"half_height", r->half_height}};
  }
  if (const auto* c = std::get_if<Cylinder>(&p)) {
    return {{"radius", c->radius}, {"half_length", c->half_length}};
  }
  if (const auto* c = std::get_if<Cone>(&p)) {
    return {{"base_radius", c->base_radius}, {"height", c->height}};
  }
  return {{"half_extents", vec3_to_json(std::get<Cuboid>(p).half_extents)}};
}

Primitive primitive_from_json(const std::string& shape, const Json& dims, const std::string& path) {
  Primitive p;
  if (shape == "sphere") {
    reject_unknown(dims, {"radius"}, path);
    p = Sphere{number_at(dims, "radius", path)};
  } else if (shape == "plane") {
    reject_unknown(dims, {"half_width", "half_height"}, path);
    p = RectPlane{number_at(dims, "half_width", path), number_at(dims, "half_height", path)};
  } else if (shape == "cylinder") {
    reject_unknown(dims, {"radius", "half_length"}, path);
    p = Cylinder{number_at(dims, "radius", path), number_at(dims, "half_length", path)};
  } else if (shape == "cone") {
    reject_unknown(dims, {"base_radius", "height"}, path);
    p = Cone{number_at(dims, "base_radius", path), number_at(dims, "height", path)};
  } else if (shape == "cuboid") {
    reject_unknown(dims, {"half_extents"}, path);
    p = Cuboid{vec3_from_json(field(dims, "half_extents", path), join(path, "half_extents"))};
  } else {
    throw ParseError(path, "unknown shape '" + shape + "'");
  }
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
  return p;
}

}  // namespace

Json vec3_to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ParseError(path, "expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ParseError(index_path(path, i), "expected a number");
    v[i] = j[i].get<double>();
  }
  if (!v.is_finite()) throw ParseError(path, "components must be finite");
  return v;
}

double number_at(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number()) throw ParseError(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(join(path, key), "must be finite");
  return d;
}

Json object_to_json(const SceneObject& o) {
  const Quat& q = o.pose.orientation();
  Json j = {
      {"id", o.id},
      {"name", o.name},
      {"shape", shape_name(o.primitive)},
      {"dimensions", dimensions_to_json(o.primitive)},
      {"pose",
       {{"position", vec3_to_json(o.pose.position())}, {"orientation", {q.w, q.x, q.y, q.z}}}},
      {"fragility", o.fragility},
  };
  if (o.influence_radius) j["influence_radius"] = *o.influence_radius;
  return j;
}

SceneObject object_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  reject_unknown(j, {"id", "name", "shape", "dimensions", "pose", "fragility", "influence_radius"},
                 path);
  SceneObject o;
  o.id = string_at(j, "id", path);
  o.name = j.contains("name") ? string_at(j, "name", path) : o.id;
  o.primitive = primitive_from_json(string_at(j, "shape", path), field(j, "dimensions", path),
                                    join(path, "dimensions"));
  const std::string pose_path = join(path, "pose");
  const Json& pose = field(j, "pose", path);
  reject_unknown(pose, {"position", "orientation"}, pose_path);
  const Vec3 position = vec3_from_json(field(pose, "position", pose_path), join(pose_path, "position"));
  Quat q;
  if (pose.contains("orientation")) {
    const Json& oj = pose["orientation"];
    const std::string opath = join(pose_path, "orientation");
    if (!oj.is_array() || oj.size() != 4) throw ParseError(opath, "expected [w, x, y, z]");
    for (std::size_t i = 0; i < 4; ++i) {
      if (!oj[i].is_number()) throw ParseError(index_path(opath, i), "expected a number");
    }
    q = {oj[0].get<double>(), oj[1].get<double>(), oj[2].get<double>(), oj[3].get<double>()};
  }
  try {
    o.pose = Pose(position, q);
  } catch (const std::invalid_argument& e) {
    throw ParseError(pose_path, e.what());
  }
  if (j.contains("fragility")) {
    o.fragility = number_at(j, "fragility", path);
    if (o.fragility < 0.0 || o.fragility > 1.0) {
      throw ParseError(join(path, "fragility"), "must lie in [0, 1]");
    }
  }
  if (j.contains("influence_radius") && !j["influence_radius"].is_null()) {
    const double r = number_at(j, "influence_radius", path);
    if (!(r > 0.0)) throw ParseError(join(path, "influence_radius"), "must be > 0");
    o.influence_radius = r;
  }
  return o;
}

Json scene_to_json(const Scene& scene) {
  Json objects = Json::array();
  for (const auto& o : scene.objects) objects.push_back(object_to_json(o));
  return {{"objects", objects}};
}

Scene scene_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("", "scene must be an object");
  reject_unknown(j, {"objects"}, "");
  const Json& objects = field(j, "objects", "");
  if (!objects.is_array()) throw ParseError("objects", "expected an array");
  Scene scene;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    scene.objects.push_back(object_from_json(objects[i], index_path("objects", i)));
  }
  try {
    validate(scene);
  } catch (const std::invalid_argument& e) {
    throw ParseError("objects", e.what());
  }
  return scene;
}

Json trajectory_to_json(const Trajectory& trajectory) {
  Json arr = Json::array();
  for (const auto& w : trajectory.waypoints()) {
    arr.push_back({{"x", w.position.x}, {"y", w.position.y}, {"z", w.position.z}, {"v", w.speed}});
  }
  return arr;
}

Trajectory trajectory_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of waypoints");
  std::vector<Waypoint> wps;
  wps.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = index_path(path, i);
    reject_unknown(j[i], {"x", "y", "z", "v"}, p);
    wps.push_back({{number_at(j[i], "x", p), number_at(j[i], "y", p), number_at(j[i], "z", p)},
                   number_at(j[i], "v", p)});
  }
  try {
    return Trajectory(std::move(wps));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
}

Json constraint_to_json(const Constraint& c) {
  Json j = {{"kind", to_string(c.kind)}};
  if (c.kind == ConstraintKind::CartesianShift) {
    j["direction"] = vec3_to_json(c.direction);
  } else {
    j["sign"] = c.sign;
  }
  j["target"] = c.target ? Json(*c.target) : Json(nullptr);
  j["intensity"] = c.intensity;
  j["importance"] = c.importance;
  j["priority"] = c.priority;
  return j;
}

Json constraint_set_to_json(const ConstraintSet& set) {
  Json arr = Json::array();
  for (const auto& c : set.constraints) arr.push_back(constraint_to_json(c));
  return {{"constraints", arr}, {"source_command", set.source_command}};
}

Constraint constraint_from_json(const Json& j, const std::string& path, std::size_t index) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  reject_unknown(j, {"kind", "direction", "sign", "target", "intensity", "importance", "priority"},
                 path);
  Constraint c;
  const std::string kind = string_at(j, "kind", path);
  if (kind == "cartesian") {
    c.kind = ConstraintKind::CartesianShift;
    if (j.contains("sign")) throw ParseError(join(path, "sign"), "not allowed for cartesian");
    const Vec3 d = vec3_from_json(field(j, "direction", path), join(path, "direction"));
    const double n = d.norm();
    if (!(n > 1e-9)) throw ParseError(join(path, "direction"), "must be non-zero");
    c.direction = d / n;
  } else if (kind == "speed" || kind == "distance") {
    c.kind = kind == "speed" ? ConstraintKind::SpeedChange : ConstraintKind::ObjectDistance;
    if (j.contains("direction")) {
      throw ParseError(join(path, "direction"), "only allowed for cartesian");
    }
    const Json& s = field(j, "sign", path);
    if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1)) {
      throw ParseError(join(path, "sign"), "must be 1 or -1");
    }
    c.sign = s.get<int>();
  } else {
    throw ParseError(join(path, "kind"), "must be \"cartesian\", \"speed\" or \"distance\"");
  }
  if (j.contains("target") && !j["target"].is_null()) c.target = string_at(j, "target", path);
  if (j.contains("intensity")) c.intensity = number_at(j, "intensity", path);
  if (j.contains("importance")) c.importance = number_at(j, "importance", path);
  c.priority = static_cast<int>(index);
  if (j.contains("priority")) {
    const Json& p = j["priority"];
    if (!p.is_number_integer()) throw ParseError(join(path, "priority"), "expected an integer");
    c.priority = p.get<int>();
  }
  return c;
}

}  // namespace georeshape
