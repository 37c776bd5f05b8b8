#include "georeshape/registration.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "georeshape/errors.hpp"

namespace georeshape {

namespace {

// Uniform hash grid for fixed-radius neighbour queries.
class VoxelGrid {
 public:
  VoxelGrid(const std::vector<Vec3>& points, double cell) : points_(points), cell_(cell) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[cell_of(points[i])].push_back(i);
  }

  // Indices within `radius` (<= cell size) of point i, itself included, ascending.
  std::vector<std::size_t> within(std::size_t i, double radius) const {
    std::vector<std::size_t> out;
    const auto c = cell_of(points_[i]);
    const double r2 = radius * radius;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find(Cell{c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == cells_.end()) continue;
          for (std::size_t j : it->second) {
            if ((points_[j] - points_[i]).squared_norm() <= r2) out.push_back(j);
          }
        }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  using Cell = std::array<std::int64_t, 3>;
  struct CellHash {
    std::size_t operator()(const Cell& c) const {
      std::uint64_t h = 1469598103934665603ULL;
      for (std::int64_t v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
      return static_cast<std::size_t>(h);
    }
  };

  Cell cell_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_)),
            static_cast<std::int64_t>(std::floor(p.z / cell_))};
  }

  const std::vector<Vec3>& points_;
  double cell_;
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> cells_;
};

Vec3 canonical_sign(const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > 1e-12) return v[i] < 0.0 ? -v : v;
  }
  return v;
}

}  // namespace

std::string to_string(ShapeHint hint) {
  switch (hint) {
    case ShapeHint::Sphere:
      return "sphere";
    case ShapeHint::Cylinder:
      return "cylinder";
    case ShapeHint::Cone:
      return "cone";
    case ShapeHint::Cuboid:
      return "cuboid";
  }
  return "cuboid";
}

ShapeHint shape_hint_from_string(const std::string& text) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "sphere") return ShapeHint::Sphere;
  if (s == "cylinder") return ShapeHint::Cylinder;
  if (s == "cone") return ShapeHint::Cone;
  if (s == "cuboid" || s == "cube" || s == "box") return ShapeHint::Cuboid;
  throw std::invalid_argument("unknown shape hint '" + text + "'");
}

PointCloud remove_statistical_outliers(const PointCloud& cloud, int neighbors, double std_ratio) {
  const std::size_t n = cloud.points.size();
  if (neighbors < 1 || n <= static_cast<std::size_t>(neighbors)) {
    throw InsufficientDataError("outlier removal needs more than " + std::to_string(neighbors) +
                                " points, got " + std::to_string(n));
  }
  const auto k = static_cast<std::size_t>(neighbors);
  std::vector<double> mean_knn(n);
  std::vector<double> d2(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d2[m++] = (cloud.points[j] - cloud.points[i]).squared_norm();
    }
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(k - 1), d2.end());
    double sum = 0.0;
    for (std::size_t t = 0; t < k; ++t) sum += std::sqrt(d2[t]);
    mean_knn[i] = sum / static_cast<double>(k);
  }

  const double mean = std::accumulate(mean_knn.begin(), mean_knn.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : mean_knn) var += (v - mean) * (v - mean);
  const double stddev = std::sqrt(var / static_cast<double>(n - 1));
  const double threshold = mean + std_ratio * stddev;

  PointCloud out{{}, cloud.label, cloud.shape_hint};
  for (std::size_t i = 0; i < n; ++i) {
    if (mean_knn[i] <= threshold) out.points.push_back(cloud.points[i]);
  }
  return out;
}

std::vector<PointCloud> dbscan_cluster(const PointCloud& cloud, double eps, int min_points) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (min_points < 1) throw std::invalid_argument("min_points must be >= 1");

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  const std::size_t n = cloud.points.size();
  const VoxelGrid grid(cloud.points, eps);
  std::vector<int> label(n, kUnvisited);
  int clusters = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    const auto seeds = grid.within(i, eps);
    if (seeds.size() < static_cast<std::size_t>(min_points)) {
      label[i] = kNoise;
      continue;
    }
    const int id = clusters++;
    label[i] = id;
    std::vector<std::size_t> frontier(seeds.begin(), seeds.end());
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const std::size_t j = frontier[f];
      if (label[j] == kNoise) label[j] = id;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = id;
      const auto nbrs = grid.within(j, eps);
      if (nbrs.size() >= static_cast<std::size_t>(min_points)) {
        frontier.insert(frontier.end(), nbrs.begin(), nbrs.end());
      }
    }
  }
  if (clusters == 0) throw NoClusterError();

  std::vector<PointCloud> out(static_cast<std::size_t>(clusters),
                              PointCloud{{}, cloud.label, cloud.shape_hint});
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) out[static_cast<std::size_t>(label[i])].points.push_back(cloud.points[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const PointCloud& a, const PointCloud& b) {
    return a.points.size() > b.points.size();
  });
  return out;
}

OrientedBox fit_obb(const PointCloud& cloud) {
  const std::size_t n = cloud.points.size();
  if (n < 4) throw DegenerateCloudError();

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : cloud.points) mean += Eigen::Vector3d(p.x, p.y, p.z);
  mean /= static_cast<double>(n);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : cloud.points) {
    const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n);

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d values = solver.eigenvalues();  // ascending
  if (solver.info() != Eigen::Success || !(values(0) > 1e-12 * std::max(values(2), 1e-300))) {
    throw DegenerateCloudError();
  }
  auto column = [&](int c) {
    const Eigen::Vector3d v = solver.eigenvectors().col(c).normalized();
    return Vec3{v(0), v(1), v(2)};
  };
  Vec3 axes[3] = {canonical_sign(column(2)), canonical_sign(column(1)), {}};
  axes[2] = axes[0].cross(axes[1]);

  const Vec3 centroid{mean(0), mean(1), mean(2)};
  auto extent = [&](const Vec3 (&frame)[3], Vec3& lo, Vec3& hi) {
    const double inf = std::numeric_limits<double>::infinity();
    lo = {inf, inf, inf};
    hi = -lo;
    for (const auto& p : cloud.points) {
      const Vec3 d = p - centroid;
      for (int a = 0; a < 3; ++a) {
        const double t = d.dot(frame[a]);
        lo[a] = std::min(lo[a], t);
        hi[a] = std::max(hi[a], t);
      }
    }
    return (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
  };

  // Local volume descent from the principal frame.
  Vec3 lo;
  Vec3 hi;
  double volume = extent(axes, lo, hi);
  for (double step = 0.02; step > 1e-4;) {
    bool improved = false;
    for (int a = 0; a < 3; ++a) {
      for (double sign : {1.0, -1.0}) {
        const Quat q = Quat::from_axis_angle(axes[a], sign * step);
        const Vec3 trial[3] = {q.rotate(axes[0]), q.rotate(axes[1]), q.rotate(axes[2])};
        Vec3 tlo;
        Vec3 thi;
        const double v = extent(trial, tlo, thi);
        if (v < volume * (1.0 - 1e-9)) {
          volume = v;
          std::copy(std::begin(trial), std::end(trial), std::begin(axes));
          lo = tlo;
          hi = thi;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  axes[0] = canonical_sign(axes[0]);
  axes[1] = canonical_sign(axes[1]);
  axes[2] = axes[0].cross(axes[1]);
  extent(axes, lo, hi);

  Vec3 center = centroid;
  Vec3 half;
  for (int a = 0; a < 3; ++a) {
    center += axes[a] * ((lo[a] + hi[a]) * 0.5);
    half[a] = std::max((hi[a] - lo[a]) * 0.5, 1e-9);
  }
  return {Pose(center, Quat::from_columns(axes[0], axes[1], axes[2])), half};
}

SceneObject fit_primitive(ShapeHint hint, const OrientedBox& obb, const PointCloud& cloud) {
  SceneObject obj;
  obj.id = cloud.label;
  obj.name = cloud.label;
  const Vec3& h = obb.half_extents;
  const Vec3& center = obb.pose.position();

  switch (hint) {
    case ShapeHint::Cuboid:
      obj.primitive = Cuboid{h};
      obj.pose = obb.pose;
      return obj;
    case ShapeHint::Sphere:
      obj.primitive = Sphere{(h.x + h.y + h.z) / 3.0};
      obj.pose = Pose::translation(center);
      return obj;
    case ShapeHint::Cylinder:
    case ShapeHint::Cone:
      break;
  }

  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (h[a] > h[axis]) axis = a;
  const int u = (axis + 1) % 3;
  const int v = (axis + 2) % 3;
  Vec3 basis[3];
  for (int a = 0; a < 3; ++a) {
    Vec3 e;
    e[a] = 1.0;
    basis[a] = obb.pose.rotate_to_world(e);
  }
  const double longest = h[axis];
  const double radius = (h[u] + h[v]) / 2.0;

  if (hint == ShapeHint::Cylinder) {
    // (u, v, axis) is a cyclic permutation of the box frame, so right-handed.
    obj.primitive = Cylinder{radius, longest};
    obj.pose = Pose(center, Quat::from_columns(basis[u], basis[v], basis[axis]));
    return obj;
  }

  std::size_t plus_end = 0;
  std::size_t minus_end = 0;
  for (const auto& p : cloud.points) {
    const double t = (p - center).dot(basis[axis]);
    if (t > longest * 0.5) ++plus_end;
    if (t < -longest * 0.5) ++minus_end;
  }
  const double base_side = plus_end > minus_end ? 1.0 : -1.0;
  const Vec3 apex_dir = basis[axis] * -base_side;
  // Flip u with the axis to stay right-handed.
  const Vec3 eu = basis[u] * -base_side;
  obj.primitive = Cone{radius, 2.0 * longest};
  obj.pose = Pose(center + basis[axis] * (base_side * longest),
                  Quat::from_columns(eu, basis[v], apex_dir));
  return obj;
}

SceneObject register_object(const PointCloud& cloud, const RegistrationParams& params) {
  const PointCloud cleaned =
      remove_statistical_outliers(cloud, params.outlier_neighbors, params.outlier_std_ratio);
  const auto clusters = dbscan_cluster(cleaned, params.cluster_eps, params.cluster_min_points);
  const PointCloud& target = clusters.front();
  return fit_primitive(cloud.shape_hint, fit_obb(target), target);
}

}  // namespace georeshape
