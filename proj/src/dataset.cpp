#include "georeshape/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

#include "georeshape/errors.hpp"

namespace georeshape {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct ShapeNames {
  const char* shape;
  std::vector<std::string> names;
};

const std::vector<ShapeNames>& shape_names() {
  static const std::vector<ShapeNames> table = {
      {"sphere", {"ball", "orange", "globe", "melon"}},
      {"cylinder", {"glass", "bottle", "can", "mug"}},
      {"cone", {"funnel", "cone", "lampshade", "pylon"}},
      {"cuboid", {"table", "box", "crate", "cabinet"}},
  };
  return table;
}

Quat random_orientation(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform() * 2.0 * std::numbers::pi;
  const double u3 = rng.uniform() * 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return Quat{a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)}.normalized();
}

Primitive random_primitive(std::size_t shape, Rng& rng) {
  auto dim = [&] { return rng.uniform(0.1, 0.4); };
  switch (shape) {
    case 0:
      return Sphere{dim()};
    case 1: {
      const double r = dim();
      return Cylinder{r, dim()};
    }
    case 2: {
      const double r = dim();
      return Cone{r, dim()};
    }
    default: {
      const double x = dim();
      const double y = dim();
      return Cuboid{{x, y, dim()}};
    }
  }
}

double min_signed_distance(const Trajectory& t, const SceneObject& obj) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : t.waypoints()) best = std::min(best, closest_point(w.position, obj).signed_distance);
  return best;
}

// Mean signed distance of the five waypoints closest to the object.
double near_distance(const Trajectory& t, const SceneObject& obj) {
  double sum = 0.0;
  const auto idx = closest_waypoint_indices(t, obj, 5);
  for (std::size_t i : idx) sum += closest_point(t[i].position, obj).signed_distance;
  return sum / static_cast<double>(idx.size());
}

struct Modifier {
  const char* text;
  double intensity;
};

constexpr Modifier kModifiers[] = {
    {"", 1.0}, {"", 1.0}, {"slightly ", 0.5}, {"a bit ", 0.5}, {"much ", 1.5}, {"a lot ", 1.5},
};

struct Direction {
  Vec3 axis;
  std::vector<std::string> phrases;  // "{m}" marks the modifier slot
};

const std::vector<Direction>& directions() {
  static const std::vector<Direction> table = {
      {kRight, {"go {m}more to the right", "move {m}to the right", "shift {m}rightward"}},
      {kLeft, {"go {m}more to the left", "move {m}to the left", "shift {m}leftward"}},
      {kFront, {"move {m}forward", "go {m}more to the front"}},
      {kBack, {"move {m}backward", "go {m}more to the back"}},
      {kUp, {"go {m}higher", "move {m}up"}},
      {kDown, {"go {m}lower", "move {m}down"}},
  };
  return table;
}

const std::vector<std::string> kSlower = {"go {m}slower near the {o}", "slow down {m}near the {o}",
                                          "slow down when next to the {o}",
                                          "move {m}slower past the {o}"};
const std::vector<std::string> kFaster = {"go {m}faster near the {o}", "speed up {m}near the {o}",
                                          "move {m}faster past the {o}"};
const std::vector<std::string> kCloser = {"move {m}closer to the {o}", "get {m}nearer to the {o}",
                                          "stay {m}closer to the {o}"};
const std::vector<std::string> kFarther = {"stay {m}farther from the {o}",
                                           "keep {m}further away from the {o}",
                                           "move {m}away from the {o}"};
const char* const kJoiners[] = {", ", " and ", " then ", ", then ", " and then "};

std::string fill(std::string phrase, const std::string& modifier, const std::string& object) {
  if (const auto p = phrase.find("{m}"); p != std::string::npos) phrase.replace(p, 3, modifier);
  if (const auto p = phrase.find("{o}"); p != std::string::npos) phrase.replace(p, 3, object);
  return phrase;
}

struct Clause {
  Constraint constraint;
  std::string text;
};

// Draws one clause; nullopt when the drawn kind is infeasible for the scene.
std::optional<Clause> draw_clause(Rng& rng, const Trajectory& trajectory, const Scene& scene) {
  const Modifier mod = kModifiers[rng.index(std::size(kModifiers))];
  const SceneObject& obj = scene.objects[rng.index(scene.objects.size())];
  Clause clause;
  Constraint& c = clause.constraint;
  c.intensity = mod.intensity;

  auto pick = [&](const std::vector<std::string>& phrases) {
    std::string p = phrases[rng.index(phrases.size())];
    // Phrases without a modifier slot carry the neutral intensity.
    if (p.find("{m}") == std::string::npos) c.intensity = 1.0;
    return fill(p, mod.text, obj.name);
  };

  switch (rng.index(5)) {
    case 0:
    case 1: {
      const Direction& d = directions()[rng.index(directions().size())];
      c.kind = ConstraintKind::CartesianShift;
      c.direction = d.axis;
      clause.text = fill(d.phrases[rng.index(d.phrases.size())], mod.text, "");
      if (rng.index(2) == 0) {
        c.target = obj.id;
        clause.text += " near the " + obj.name;
      }
      return clause;
    }
    case 2: {
      c.kind = ConstraintKind::SpeedChange;
      c.target = obj.id;
      c.sign = rng.index(2) == 0 ? -1 : 1;
      clause.text = pick(c.sign < 0 ? kSlower : kFaster);
      return clause;
    }
    default: {
      c.kind = ConstraintKind::ObjectDistance;
      c.target = obj.id;
      c.sign = rng.index(2) == 0 ? -1 : 1;
      if (c.sign < 0 && near_distance(trajectory, obj) < 0.15) return std::nullopt;
      clause.text = pick(c.sign < 0 ? kCloser : kFarther);
      return clause;
    }
  }
}

Vec3 abs_axis(const Vec3& v) { return {std::abs(v.x), std::abs(v.y), std::abs(v.z)}; }

bool same_scope(const Constraint& a, const Constraint& b) { return a.target == b.target; }

bool compatible(const Constraint& c, const std::vector<Clause>& chosen, SampleKind kind) {
  for (const auto& other : chosen) {
    const Constraint& o = other.constraint;
    if (kind == SampleKind::Multi) {
      if (c.target && o.target && *c.target == *o.target) return false;
      if (c.kind == ConstraintKind::CartesianShift && o.kind == ConstraintKind::CartesianShift &&
          abs_axis(c.direction) == abs_axis(o.direction)) {
        return false;
      }
      if (!c.target && !o.target) return false;
    }
    if (c.kind != o.kind || !same_scope(c, o)) continue;
    // Same kind on the same scope: no repeats and no opposites.
    if (c.kind == ConstraintKind::CartesianShift) {
      if (abs_axis(c.direction) == abs_axis(o.direction)) return false;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string to_string(SampleKind kind) {
  switch (kind) {
    case SampleKind::Single:
      return "single";
    case SampleKind::Multi:
      return "multi";
    case SampleKind::Complex:
      return "complex";
  }
  return "single";
}

SampleKind sample_kind_from_string(const std::string& text) {
  if (text == "single") return SampleKind::Single;
  if (text == "multi") return SampleKind::Multi;
  if (text == "complex") return SampleKind::Complex;
  throw std::invalid_argument("unknown sample kind '" + text + "'");
}

Rng::Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

std::uint64_t Rng::next() {
  const std::uint64_t out = splitmix64(state_);
  state_ += 0x9E3779B97F4A7C15ULL;
  return out;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("index range is empty");
  return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
}

std::uint64_t Rng::fork() { return next() ^ 0xD1B54A32D192ED03ULL; }

Trajectory random_trajectory(std::uint64_t seed, std::size_t control_points, std::size_t n) {
  if (control_points < 4) throw std::invalid_argument("control_points must be >= 4");
  Rng rng(seed);
  while (true) {
    std::vector<Waypoint> cps(control_points);
    for (auto& w : cps) {
      w.position = {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
      w.speed = rng.uniform(0.3, 1.0);
    }
    Trajectory t = resample(Trajectory(std::move(cps)), n);
    const bool inside = std::all_of(t.waypoints().begin(), t.waypoints().end(), [](const auto& w) {
      return std::abs(w.position.x) <= 1.0 && std::abs(w.position.y) <= 1.0 &&
             std::abs(w.position.z) <= 1.0;
    });
    if (inside) return t;
  }
}

Scene random_scene(std::uint64_t seed, std::size_t m, const Trajectory& trajectory) {
  if (m < 1 || m > 4) throw std::invalid_argument("object count must lie in [1, 4]");
  Rng rng(seed);
  Scene scene;
  std::set<std::string> used;
  for (int attempt = 0; attempt < kSceneRejectionBudget && scene.objects.size() < m; ++attempt) {
    const std::size_t shape = rng.index(4);
    SceneObject obj;
    obj.primitive = random_primitive(shape, rng);
    const Vec3 center{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
    const Quat q = random_orientation(rng);
    // Place the solid's centroid at the drawn center.
    obj.pose = Pose(center - q.rotate(local_centroid(obj.primitive)), q);
    obj.fragility = rng.uniform(0.1, 0.9);
    const auto& names = shape_names()[shape].names;
    const std::string name = names[rng.index(names.size())];
    if (used.count(name)) continue;
    obj.name = name;
    obj.id = name + "_01";

    const double r = bounding_radius(obj.primitive);
    bool ok = true;
    for (const auto& other : scene.objects) {
      // Bounding spheres are taken about each pose origin.
      if (distance(obj.pose.position(), other.pose.position()) <=
          r + bounding_radius(other.primitive)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const double clearance = min_signed_distance(trajectory, obj);
    if (clearance <= kMinTrajectoryClearance || clearance > influence_radius(obj)) continue;
    used.insert(name);
    scene.objects.push_back(std::move(obj));
  }
  if (scene.objects.size() < m) {
    throw Error("scene rejection budget of " + std::to_string(kSceneRejectionBudget) +
                " attempts exhausted");
  }
  return scene;
}

Sample generate_sample(std::uint64_t seed, SampleKind kind) {
  Rng rng(seed);
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 100) throw Error("could not generate a sample for seed " + std::to_string(seed));
    Trajectory trajectory = random_trajectory(rng.fork());
    const std::size_t m = kind == SampleKind::Single ? 1 + rng.index(4) : 2 + rng.index(3);
    Scene scene;
    try {
      scene = random_scene(rng.fork(), m, trajectory);
    } catch (const Error&) {
      continue;
    }

    const std::size_t clauses = kind == SampleKind::Single  ? 1
                                : kind == SampleKind::Multi ? 2
                                                            : 3 + rng.index(2);
    std::vector<Clause> chosen;
    for (int draw = 0; draw < 200 && chosen.size() < clauses; ++draw) {
      auto clause = draw_clause(rng, trajectory, scene);
      if (!clause || !compatible(clause->constraint, chosen, kind)) continue;
      clause->constraint.priority = static_cast<int>(chosen.size());
      chosen.push_back(std::move(*clause));
    }
    if (chosen.size() < clauses) continue;

    Sample sample{std::move(trajectory), std::move(scene), {}, {}, seed, kind};
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (i > 0) sample.command_text += kJoiners[rng.index(std::size(kJoiners))];
      sample.command_text += chosen[i].text;
      sample.ground_truth.constraints.push_back(chosen[i].constraint);
    }
    sample.ground_truth.source_command = sample.command_text;
    return sample;
  }
}

Json sample_to_json(const Sample& sample) {
  return {{"seed", sample.seed},
          {"kind", to_string(sample.kind)},
          {"command", sample.command_text},
          {"trajectory", trajectory_to_json(sample.trajectory)},
          {"scene", scene_to_json(sample.scene)},
          {"ground_truth", constraint_set_to_json(sample.ground_truth)}};
}

Sample sample_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("", "sample must be an object");
  for (const char* key : {"seed", "kind", "command", "trajectory", "scene", "ground_truth"}) {
    if (!j.contains(key)) throw ParseError(key, "missing");
  }
  if (!j.at("seed").is_number_unsigned()) throw ParseError("seed", "must be an unsigned integer");
  if (!j.at("command").is_string()) throw ParseError("command", "must be a string");
  if (!j.at("kind").is_string()) throw ParseError("kind", "must be a string");

  Sample s{trajectory_from_json(j.at("trajectory"), "trajectory"),
           scene_from_json(j.at("scene")),
           j.at("command").get<std::string>(),
           {},
           j.at("seed").get<std::uint64_t>(),
           SampleKind::Single};
  try {
    s.kind = sample_kind_from_string(j.at("kind").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError("kind", e.what());
  }
  const Json& gt = j.at("ground_truth");
  if (!gt.is_object() || !gt.contains("constraints") || !gt.at("constraints").is_array()) {
    throw ParseError("ground_truth.constraints", "must be an array");
  }
  const Json& arr = gt.at("constraints");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    s.ground_truth.constraints.push_back(
        constraint_from_json(arr[i], "ground_truth.constraints[" + std::to_string(i) + "]", i));
  }
  if (gt.contains("source_command")) {
    s.ground_truth.source_command = gt.at("source_command").get<std::string>();
  }
  return s;
}

std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t index) {
  return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

Json write_dataset(const std::filesystem::path& dir, std::uint64_t base_seed, std::size_t count,
                   SampleKind kind) {
  std::filesystem::create_directories(dir);
  Json entries = Json::array();
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = sample_seed(base_seed, i);
    const Sample sample = generate_sample(seed, kind);
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%05zu.json", i);
    std::ofstream(dir / name) << sample_to_json(sample).dump(2) << '\n';
    entries.push_back({{"file", name}, {"seed", seed}, {"kind", to_string(kind)}});
  }
  Json manifest = {{"base_seed", base_seed}, {"kind", to_string(kind)}, {"samples", entries}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  return manifest;
}

std::vector<Sample> read_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error("cannot open " + (dir / "manifest.json").string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("manifest.json", e.what());
  }
  if (!manifest.contains("samples") || !manifest.at("samples").is_array()) {
    throw ParseError("samples", "must be an array");
  }
  std::vector<Sample> out;
  for (const auto& entry : manifest.at("samples")) {
    const std::string file = entry.at("file").get<std::string>();
    std::ifstream f(dir / file);
    if (!f) throw Error("cannot open " + (dir / file).string());
    try {
      out.push_back(sample_from_json(Json::parse(f)));
    } catch (const Json::parse_error& e) {
      throw ParseError(file, e.what());
    }
  }
  return out;
}

}  // namespace georeshape
