#include "georeshape/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace georeshape {

namespace {

constexpr int kArcSubsamples = 100;

// Control point beyond an end, extrapolated quadratically from the three
// nearest waypoints, or reflected linearly when that spacing is off.
Vec3 phantom(const Vec3& end, const Vec3& next, const Vec3& after) {
  const Vec3 quadratic = end * 3.0 - next * 3.0 + after;
  const double seg = distance(end, next);
  if (distance(quadratic, end) > 0.5 * seg && distance(quadratic, end) < 2.0 * seg) return quadratic;
  return end * 2.0 - next;
}

void validate_waypoints(const std::vector<Waypoint>& wps) {
  if (wps.size() < Trajectory::kMinWaypoints) {
    throw std::invalid_argument("trajectory needs at least 4 waypoints, got " +
                                std::to_string(wps.size()));
  }
  for (std::size_t i = 0; i < wps.size(); ++i) {
    if (!wps[i].position.is_finite() || !std::isfinite(wps[i].speed)) {
      throw std::invalid_argument("waypoint " + std::to_string(i) + " is not finite");
    }
    if (wps[i].speed < 0.0) {
      throw std::invalid_argument("waypoint " + std::to_string(i) + " has negative speed");
    }
    if (i > 0 && distance(wps[i].position, wps[i - 1].position) <= Trajectory::kMinSegmentLength) {
      throw std::invalid_argument("waypoints " + std::to_string(i - 1) + " and " +
                                  std::to_string(i) + " coincide");
    }
  }
}

// One centripetal Catmull-Rom span between p1 and p2 (Barry-Goldman form).
class CatmullRomSpan {
 public:
  CatmullRomSpan(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3)
      : p_{p0, p1, p2, p3} {
    t_[0] = 0.0;
    for (int i = 1; i < 4; ++i) {
      const double gap = std::sqrt(distance(p_[i], p_[i - 1]));
      t_[i] = t_[i - 1] + std::max(gap, 1e-12);
    }
  }

  double start() const { return t_[1]; }
  double end() const { return t_[2]; }

  Vec3 at(double t) const {
    auto lerp = [](const Vec3& a, const Vec3& b, double ta, double tb, double tt) {
      return a * ((tb - tt) / (tb - ta)) + b * ((tt - ta) / (tb - ta));
    };
    const Vec3 a1 = lerp(p_[0], p_[1], t_[0], t_[1], t);
    const Vec3 a2 = lerp(p_[1], p_[2], t_[1], t_[2], t);
    const Vec3 a3 = lerp(p_[2], p_[3], t_[2], t_[3], t);
    const Vec3 b1 = lerp(a1, a2, t_[0], t_[2], t);
    const Vec3 b2 = lerp(a2, a3, t_[1], t_[3], t);
    return lerp(b1, b2, t_[1], t_[2], t);
  }

 private:
  Vec3 p_[4];
  double t_[4];
};

}  // namespace

Trajectory::Trajectory(std::vector<Waypoint> waypoints) {
  validate_waypoints(waypoints);
  original_ = waypoints;
  waypoints_ = std::move(waypoints);
}

Trajectory::Trajectory(std::vector<Waypoint> waypoints, std::vector<Waypoint> original)
    : waypoints_(std::move(waypoints)), original_(std::move(original)) {}

std::vector<Vec3> Trajectory::positions() const {
  std::vector<Vec3> out;
  out.reserve(waypoints_.size());
  for (const auto& w : waypoints_) out.push_back(w.position);
  return out;
}

std::vector<Vec3> Trajectory::original_positions() const {
  std::vector<Vec3> out;
  out.reserve(original_.size());
  for (const auto& w : original_) out.push_back(w.position);
  return out;
}

std::vector<double> Trajectory::speeds() const {
  std::vector<double> out;
  out.reserve(waypoints_.size());
  for (const auto& w : waypoints_) out.push_back(w.speed);
  return out;
}

Trajectory Trajectory::with_waypoints(std::vector<Waypoint> waypoints) const {
  if (waypoints.size() != original_.size()) {
    throw std::invalid_argument("waypoint count must match the reference trajectory");
  }
  validate_waypoints(waypoints);
  return Trajectory(std::move(waypoints), original_);
}

double Trajectory::arc_length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    total += distance(waypoints_[i].position, waypoints_[i - 1].position);
  }
  return total;
}

NormalizedScene normalize_scene(const Trajectory& trajectory, const Scene& scene) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Vec3 lo{kInf, kInf, kInf};
  Vec3 hi{-kInf, -kInf, -kInf};
  auto extend = [&](const Vec3& p) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  };
  for (const auto& w : trajectory.waypoints()) extend(w.position);
  for (const auto& o : scene.objects) extend(o.pose.position());

  NormalizationTransform tf;
  tf.spatial_center = (lo + hi) * 0.5;
  tf.spatial_scale = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z}) * 0.5;
  if (!(tf.spatial_scale > 1e-12)) throw std::invalid_argument("scene has zero spatial extent");

  double max_speed = 0.0;
  for (const auto& w : trajectory.waypoints()) max_speed = std::max(max_speed, w.speed);
  tf.speed_scale = max_speed > 0.0 ? max_speed : 1.0;

  std::vector<Waypoint> wps;
  wps.reserve(trajectory.size());
  for (const auto& w : trajectory.waypoints()) {
    wps.push_back({tf.to_normalized(w.position), w.speed / tf.speed_scale});
  }

  Scene normalized = scene;
  for (auto& o : normalized.objects) {
    o.pose = Pose(tf.to_normalized(o.pose.position()), o.pose.orientation());
    o.primitive = scaled(o.primitive, 1.0 / tf.spatial_scale);
  }
  return {Trajectory(std::move(wps)), std::move(normalized), tf};
}

Trajectory denormalize(const Trajectory& trajectory, const NormalizationTransform& transform) {
  std::vector<Waypoint> wps;
  wps.reserve(trajectory.size());
  for (const auto& w : trajectory.waypoints()) {
    wps.push_back({transform.to_world(w.position), w.speed * transform.speed_scale});
  }
  return Trajectory(std::move(wps));
}

Scene denormalize(const Scene& scene, const NormalizationTransform& transform) {
  Scene out = scene;
  for (auto& o : out.objects) {
    o.pose = Pose(transform.to_world(o.pose.position()), o.pose.orientation());
    o.primitive = scaled(o.primitive, transform.spatial_scale);
  }
  return out;
}

Trajectory resample(const Trajectory& trajectory, std::size_t target_n) {
  if (target_n < Trajectory::kMinWaypoints) {
    throw std::invalid_argument("resample target must be at least 4");
  }
  const auto& wps = trajectory.waypoints();
  const std::size_t n = wps.size();

  std::vector<Vec3> pts;
  pts.reserve(n + 2);
  pts.push_back(phantom(wps[0].position, wps[1].position, wps[2].position));
  for (const auto& w : wps) pts.push_back(w.position);
  pts.push_back(phantom(wps[n - 1].position, wps[n - 2].position, wps[n - 3].position));

  // Arc-length table: per span, cumulative length at kArcSubsamples+1 params.
  std::vector<CatmullRomSpan> spans;
  spans.reserve(n - 1);
  std::vector<double> params;
  std::vector<double> cumulative;
  std::vector<double> knot_arc(n, 0.0);
  params.reserve((n - 1) * kArcSubsamples + 1);
  cumulative.reserve((n - 1) * kArcSubsamples + 1);
  double total = 0.0;
  Vec3 prev = wps[0].position;
  params.push_back(0.0);
  cumulative.push_back(0.0);
  for (std::size_t s = 0; s + 1 < n; ++s) {
    spans.emplace_back(pts[s], pts[s + 1], pts[s + 2], pts[s + 3]);
    const auto& span = spans.back();
    for (int k = 1; k <= kArcSubsamples; ++k) {
      const double u = static_cast<double>(k) / kArcSubsamples;
      const Vec3 p = span.at(span.start() + u * (span.end() - span.start()));
      total += distance(p, prev);
      prev = p;
      params.push_back(static_cast<double>(s) + u);
      cumulative.push_back(total);
    }
    knot_arc[s + 1] = total;
  }

  auto position_at = [&](double global_param) {
    const std::size_t s =
        std::min(static_cast<std::size_t>(global_param), spans.size() - 1);
    const double u = global_param - static_cast<double>(s);
    const auto& span = spans[s];
    return span.at(span.start() + u * (span.end() - span.start()));
  };
  auto speed_at = [&](double arc) {
    const auto it = std::upper_bound(knot_arc.begin(), knot_arc.end(), arc);
    if (it == knot_arc.begin()) return wps.front().speed;
    if (it == knot_arc.end()) return wps.back().speed;
    const std::size_t i = static_cast<std::size_t>(it - knot_arc.begin());
    const double a = knot_arc[i - 1];
    const double b = knot_arc[i];
    const double t = b > a ? (arc - a) / (b - a) : 0.0;
    return wps[i - 1].speed * (1.0 - t) + wps[i].speed * t;
  };

  std::vector<Waypoint> out;
  out.reserve(target_n);
  out.push_back(wps.front());
  for (std::size_t k = 1; k + 1 < target_n; ++k) {
    const double arc = total * static_cast<double>(k) / static_cast<double>(target_n - 1);
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), arc);
    const std::size_t j = std::max<std::size_t>(1, static_cast<std::size_t>(it - cumulative.begin()));
    const double c0 = cumulative[j - 1];
    const double c1 = cumulative[j];
    const double t = c1 > c0 ? (arc - c0) / (c1 - c0) : 0.0;
    const double param = params[j - 1] + t * (params[j] - params[j - 1]);
    out.push_back({position_at(param), speed_at(arc)});
  }
  out.push_back(wps.back());
  return Trajectory(std::move(out));
}

std::vector<std::size_t> closest_waypoint_indices(const Trajectory& trajectory,
                                                  const SceneObject& object, std::size_t k) {
  if (k > trajectory.size()) throw std::invalid_argument("k exceeds the waypoint count");
  std::vector<double> dist(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    dist[i] = closest_point(trajectory[i].position, object).signed_distance;
  }
  std::vector<std::size_t> idx(trajectory.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  idx.resize(k);
  return idx;
}

}  // namespace georeshape
