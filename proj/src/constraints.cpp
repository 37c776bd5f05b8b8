#include "georeshape/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "georeshape/errors.hpp"
#include "georeshape/serialization.hpp"

namespace georeshape {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n.!?;:");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n.!?;:");
  return s.substr(b, e - b + 1);
}

std::string collapse_spaces(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

bool contains_word(const std::string& text, const char* pattern) {
  return std::regex_search(text, std::regex(std::string("\\b(") + pattern + ")\\b"));
}

std::vector<std::string> split_clauses(const std::string& command) {
  std::vector<std::string> clauses;
  std::string normalized;
  for (char c : " " + lower(command) + " ") normalized += (c == ',' || c == ';') ? '|' : c;
  normalized = std::regex_replace(normalized, std::regex("\\s+(and then|and|then)\\s+"), "|");
  std::size_t start = 0;
  while (start <= normalized.size()) {
    const auto bar = normalized.find('|', start);
    const std::string piece =
        collapse_spaces(trim(normalized.substr(start, bar == std::string::npos ? std::string::npos
                                                                               : bar - start)));
    if (!piece.empty() && piece != "and" && piece != "then") clauses.push_back(piece);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return clauses;
}

bool is_direction_word(const std::string& s) {
  static const char* words[] = {"right", "left", "front", "back", "top", "bottom"};
  return std::any_of(std::begin(words), std::end(words), [&](const char* w) { return s == w; });
}

std::optional<Vec3> direction_of(const std::string& action) {
  if (contains_word(action, "right|rightward|rightwards")) return kRight;
  if (contains_word(action, "left|leftward|leftwards")) return kLeft;
  if (contains_word(action, "front|forward|forwards")) return kFront;
  if (contains_word(action, "back|backward|backwards")) return kBack;
  if (contains_word(action, "up|upward|upwards|higher")) return kUp;
  if (contains_word(action, "down|downward|downwards|lower")) return kDown;
  return std::nullopt;
}

double intensity_of(const std::string& action) {
  if (contains_word(action, "slightly|a little|a bit|somewhat")) return 0.5;
  if (contains_word(action, "much|a lot|significantly|way")) return 1.5;
  return 1.0;
}

}  // namespace

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::CartesianShift:
      return "cartesian";
    case ConstraintKind::SpeedChange:
      return "speed";
    case ConstraintKind::ObjectDistance:
      return "distance";
  }
  return "cartesian";
}

std::string resolve_object(const std::string& reference, const Scene& scene) {
  if (scene.find(reference)) return reference;
  const std::string key = lower(reference);
  std::vector<std::string> matches;
  for (const auto& o : scene.objects) {
    if (lower(o.name) == key || lower(o.id) == key) matches.push_back(o.id);
  }
  if (matches.size() == 1) return matches.front();
  if (matches.empty()) {
    std::vector<std::string> all;
    for (const auto& o : scene.objects) all.push_back(o.id);
    throw ResolutionError(reference, std::move(all), false);
  }
  throw ResolutionError(reference, std::move(matches), true);
}

void validate(const ConstraintSet& set, const Scene& scene) {
  if (set.constraints.empty()) throw ParseError("constraints", "must not be empty");
  for (std::size_t i = 0; i < set.constraints.size(); ++i) {
    const auto& c = set.constraints[i];
    const std::string path = "constraints[" + std::to_string(i) + "]";
    if (!(c.intensity > 0.0 && c.intensity <= kMaxIntensity)) {
      throw ParseError(path + ".intensity", "must lie in (0, 2]");
    }
    if (!(c.importance > 0.0 && c.importance <= kMaxImportance)) {
      throw ParseError(path + ".importance", "must lie in (0, 2]");
    }
    if (c.priority < 0) throw ParseError(path + ".priority", "must be >= 0");
    if (c.kind == ConstraintKind::CartesianShift) {
      if (std::abs(c.direction.norm() - 1.0) > 1e-9) {
        throw ParseError(path + ".direction", "must be a unit vector");
      }
    } else {
      if (c.sign != 1 && c.sign != -1) throw ParseError(path + ".sign", "must be 1 or -1");
      if (!c.target) throw ParseError(path + ".target", "required for " + to_string(c.kind));
    }
    if (c.target && !scene.find(*c.target)) {
      std::vector<std::string> all;
      for (const auto& o : scene.objects) all.push_back(o.id);
      throw ResolutionError(*c.target, std::move(all), false);
    }
  }
}

InterpreterResult parse_interpreter_document(std::string_view text, const Scene& scene) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "document must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "constraints" && key != "source_command" && key != "sequences" &&
        key != "rationale") {
      throw ParseError(key, "unknown field");
    }
  }
  if (!doc.contains("constraints")) throw ParseError("constraints", "missing field");
  const Json& arr = doc["constraints"];
  if (!arr.is_array()) throw ParseError("constraints", "expected an array");

  InterpreterResult result;
  auto& set = result.constraint_set;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "constraints[" + std::to_string(i) + "]";
    Constraint c = constraint_from_json(arr[i], path, i);
    if (c.target) c.target = resolve_object(*c.target, scene);
    set.constraints.push_back(std::move(c));
  }
  if (doc.contains("source_command")) {
    if (!doc["source_command"].is_string()) throw ParseError("source_command", "expected a string");
    set.source_command = doc["source_command"].get<std::string>();
  }
  if (doc.contains("rationale")) {
    if (!doc["rationale"].is_string()) throw ParseError("rationale", "expected a string");
    result.rationale = doc["rationale"].get<std::string>();
  }
  validate(set, scene);

  if (doc.contains("sequences")) {
    const Json& seqs = doc["sequences"];
    if (!seqs.is_array()) throw ParseError("sequences", "expected an array");
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      const std::string path = "sequences[" + std::to_string(s) + "]";
      if (!seqs[s].is_array()) throw ParseError(path, "expected an array");
      std::vector<std::size_t> order;
      for (const auto& v : seqs[s]) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
          throw ParseError(path, "expected constraint indices");
        }
        order.push_back(v.get<std::size_t>());
      }
      std::vector<std::size_t> sorted = order;
      std::sort(sorted.begin(), sorted.end());
      bool permutation = sorted.size() == set.constraints.size();
      for (std::size_t k = 0; permutation && k < sorted.size(); ++k) permutation = sorted[k] == k;
      if (!permutation) throw ParseError(path, "must be a permutation of the constraint indices");
      result.sequences.push_back(std::move(order));
    }
  }
  return result;
}

ConstraintSet parse_constraint_document(std::string_view text, const Scene& scene) {
  return parse_interpreter_document(text, scene).constraint_set;
}

std::string serialize_constraint_document(const ConstraintSet& set) {
  return constraint_set_to_json(set).dump(2);
}

InterpreterResult interpret_command_template(const std::string& command, const Scene& scene) {
  static const std::regex object_phrase(
      "^(.*)\\b(to|from|near|next to|close to|around|by|beside|past|of)\\s+the\\s+(.+)$");

  const auto clauses = split_clauses(command);
  if (clauses.empty()) throw InterpretationError("no clause recognized in '" + command + "'");

  InterpreterResult result;
  auto& set = result.constraint_set;
  set.source_command = command;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const std::string& clause = clauses[i];
    std::string action = clause;
    std::optional<std::string> target;
    std::smatch m;
    if (std::regex_match(clause, m, object_phrase) && !is_direction_word(m[3].str())) {
      action = m[1].str() + m[2].str();
      target = resolve_object(m[3].str(), scene);
    }

    Constraint c;
    c.priority = static_cast<int>(i);
    c.intensity = intensity_of(action);
    c.target = target;
    if (contains_word(action, "closer|nearer|approach")) {
      c.kind = ConstraintKind::ObjectDistance;
      c.sign = -1;
    } else if (contains_word(action, "farther|further|away")) {
      c.kind = ConstraintKind::ObjectDistance;
      c.sign = 1;
    } else if (contains_word(action, "slower|slow down|slowly|decelerate")) {
      c.kind = ConstraintKind::SpeedChange;
      c.sign = -1;
    } else if (contains_word(action, "faster|speed up|quicker|quickly|accelerate")) {
      c.kind = ConstraintKind::SpeedChange;
      c.sign = 1;
    } else if (auto dir = direction_of(action)) {
      c.kind = ConstraintKind::CartesianShift;
      c.direction = *dir;
    } else {
      throw InterpretationError("unrecognized clause '" + clause + "'");
    }
    if (c.kind != ConstraintKind::CartesianShift && !c.target) {
      throw InterpretationError("clause '" + clause + "' needs an object, e.g. 'near the table'");
    }
    set.constraints.push_back(std::move(c));
  }
  validate(set, scene);

  result.rationale = "template grammar: " + std::to_string(clauses.size()) + " clause(s)";
  return result;
}

}  // namespace georeshape
