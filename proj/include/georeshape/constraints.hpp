#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "georeshape/geometry.hpp"

namespace georeshape {

enum class ConstraintKind { CartesianShift, SpeedChange, ObjectDistance };

/// "cartesian", "speed" or "distance".
std::string to_string(ConstraintKind kind);

inline constexpr double kMaxIntensity = 2.0;
inline constexpr double kMaxImportance = 2.0;

// Canonical axes in the normalized frame.
inline constexpr Vec3 kRight{1.0, 0.0, 0.0};
inline constexpr Vec3 kLeft{-1.0, 0.0, 0.0};
inline constexpr Vec3 kFront{0.0, 1.0, 0.0};
inline constexpr Vec3 kBack{0.0, -1.0, 0.0};
inline constexpr Vec3 kUp{0.0, 0.0, 1.0};
inline constexpr Vec3 kDown{0.0, 0.0, -1.0};

struct Constraint {
  ConstraintKind kind = ConstraintKind::CartesianShift;
  /// Unit vector, CartesianShift only.
  Vec3 direction;
  /// +1 faster / farther, -1 slower / closer. SpeedChange and ObjectDistance.
  int sign = 1;
  /// Object id. Optional only for CartesianShift.
  std::optional<std::string> target;
  double intensity = 1.0;
  double importance = 1.0;
  int priority = 0;

  bool operator==(const Constraint&) const = default;
};

struct ConstraintSet {
  std::vector<Constraint> constraints;
  std::string source_command;

  bool operator==(const ConstraintSet&) const = default;
};

struct InterpreterResult {
  ConstraintSet constraint_set;
  /// Alternative execution orders, each a permutation of constraint indices.
  std::vector<std::vector<std::size_t>> sequences;
  std::string rationale;
  std::vector<std::string> warnings;
};

/// Throws ParseError (with field path) on bound or shape violations and
/// ResolutionError when a target is not an object of `scene`.
void validate(const ConstraintSet& set, const Scene& scene);

/// Exact id match first, then case-insensitive name match. Throws
/// ResolutionError listing the candidates when ambiguous or unknown.
std::string resolve_object(const std::string& reference, const Scene& scene);

/// Parses the constraint document schema:
///   {"constraints": [{"kind": "cartesian"|"speed"|"distance",
///                     "direction": [x, y, z],   // cartesian only
///                     "sign": 1 | -1,           // speed / distance only
///                     "target": "<id or name>" | null,
///                     "intensity": 1.0, "importance": 1.0, "priority": 0}],
///    "source_command": "...",                   // optional
///    "sequences": [[0, 1], [1, 0]],             // optional
///    "rationale": "..."}                        // optional
/// Missing intensity/importance default to 1.0, a missing priority to the
/// entry's index.
InterpreterResult parse_interpreter_document(std::string_view text, const Scene& scene);
ConstraintSet parse_constraint_document(std::string_view text, const Scene& scene);

std::string serialize_constraint_document(const ConstraintSet& set);

/// Deterministic interpreter for the English template grammar. Clauses are
/// joined by "and", "then" or commas; each clause becomes one constraint whose
/// priority is its position. Throws InterpretationError on any clause it does
/// not recognize.
InterpreterResult interpret_command_template(const std::string& command, const Scene& scene);

}  // namespace georeshape
