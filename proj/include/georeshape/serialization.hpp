#pragma once

// JSON forms of the domain types. Readers throw ParseError naming the
// offending field path.

#include <string>

#include "json.hpp"

#include "georeshape/constraints.hpp"
#include "georeshape/geometry.hpp"
#include "georeshape/trajectory.hpp"

namespace georeshape {

using Json = nlohmann::json;

Json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j, const std::string& path);

/// Reads a number field, throwing ParseError on a missing or mistyped value.
double number_at(const Json& j, const std::string& key, const std::string& path);

/// Scene document: {"objects": [{"id", "name", "shape", "dimensions": {...},
/// "pose": {"position": [x, y, z], "orientation": [w, x, y, z]},
/// "fragility", "influence_radius"?}]}
Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);
Json object_to_json(const SceneObject& object);
SceneObject object_from_json(const Json& j, const std::string& path);

/// Array of {"x", "y", "z", "v"} records.
Json trajectory_to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const Json& j, const std::string& path = "");

Json constraint_to_json(const Constraint& c);
/// `set.source_command` is stored under "source_command".
Json constraint_set_to_json(const ConstraintSet& set);
/// Structural parse only; no scene resolution or bound checks.
Constraint constraint_from_json(const Json& j, const std::string& path, std::size_t index);

}  // namespace georeshape
