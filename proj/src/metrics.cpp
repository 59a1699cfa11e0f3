// Accelerated metric kernels. Per-item work (nearest sample, closest face)
// runs in OpenMP loops writing into per-item slots; reductions then run
// sequentially in index order so results match the serial kernels exactly.

#include "tmts/metrics.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

#include "tmts/error.hpp"

namespace tmts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double squared(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return d.x * d.x + d.y * d.y + d.z * d.z;
}

double component(const Vec3& v, int axis) { return axis == 0 ? v.x : (axis == 1 ? v.y : v.z); }

// -----------------------------------------------------------------------------
// Static kd-tree over a point set, nearest-neighbour queries only.
// -----------------------------------------------------------------------------

class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points) : points_(points), order_(points.size()) {
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(order_.size()));
  }

  // Smallest squared distance from p to the set.
  double nearest_squared(const Vec3& p) const {
    double best = kInf;
    search(0, p, best);
    return best;
  }

 private:
  static constexpr std::uint32_t kLeafSize = 8;

  struct Node {
    std::uint32_t begin, end;  // range in order_
    std::int32_t left = -1, right = -1;
    int axis = 0;
    double split = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo{kInf, kInf, kInf}, hi{-kInf, -kInf, -kInf};
    for (auto i = begin; i < end; ++i) {
      const auto& q = points_[order_[i]];
      lo = {std::min(lo.x, q.x), std::min(lo.y, q.y), std::min(lo.z, q.z)};
      hi = {std::max(hi.x, q.x), std::max(hi.y, q.y), std::max(hi.z, q.z)};
    }
    const Vec3 ext = hi - lo;
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t l, std::uint32_t r) {
                       return component(points_[l], axis) < component(points_[r], axis);
                     });
    const double split = component(points_[order_[mid]], axis);
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    auto& node = nodes_[id];
    node.left = left;
    node.right = right;
    node.axis = axis;
    node.split = split;
    return id;
  }

  void search(std::int32_t id, const Vec3& p, double& best) const {
    const auto& node = nodes_[id];
    if (node.left < 0) {
      for (auto i = node.begin; i < node.end; ++i) best = std::min(best, squared(p, points_[order_[i]]));
      return;
    }
    // Left holds coordinates <= split, right holds >= split.
    const double diff = component(p, node.axis) - node.split;
    const auto near = diff < 0 ? node.left : node.right;
    const auto far = diff < 0 ? node.right : node.left;
    search(near, p, best);
    if (diff * diff <= best) search(far, p, best);
  }

  std::span<const Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

double mean_nearest(std::span<const Vec3> from, std::span<const Vec3> to) {
  const KdTree tree(to);
  std::vector<double> nearest(from.size());
  const auto n = static_cast<std::int64_t>(from.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) nearest[i] = std::sqrt(tree.nearest_squared(from[i]));

  double sum = 0;
  for (double d : nearest) sum += d;
  return sum / static_cast<double>(from.size());
}

// -----------------------------------------------------------------------------
// Bounding volume hierarchy over triangles, closest-face queries.
// -----------------------------------------------------------------------------

struct Box {
  Vec3 lo{kInf, kInf, kInf}, hi{-kInf, -kInf, -kInf};

  void grow(const Vec3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  void grow(const Box& b) {
    grow(b.lo);
    grow(b.hi);
  }
  double distance(const Vec3& p) const {
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    const double dz = std::max({lo.z - p.z, 0.0, p.z - hi.z});
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
};

class TriangleBvh {
 public:
  explicit TriangleBvh(std::span<const Triangle> triangles)
      : triangles_(triangles), order_(triangles.size()), boxes_(triangles.size()) {
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    scale_ = 0;
    for (std::size_t i = 0; i < triangles.size(); ++i) {
      boxes_[i].grow(triangles[i].a);
      boxes_[i].grow(triangles[i].b);
      boxes_[i].grow(triangles[i].c);
      for (const auto& v : {boxes_[i].lo, boxes_[i].hi})
        scale_ = std::max({scale_, std::abs(v.x), std::abs(v.y), std::abs(v.z)});
    }
    if (!triangles.empty()) build(0, static_cast<std::uint32_t>(triangles.size()));
  }

  // Closest triangle to p; ties go to the lower index, as in a linear scan.
  std::uint32_t closest(const Vec3& p) const {
    double best = kInf;
    std::uint32_t best_index = 0;
    // Box distances and triangle distances round differently; the slack keeps
    // pruning conservative so the answer equals the brute-force scan.
    const double slack = 1e-9 * (1.0 + scale_ + std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)}));
    search(0, p, best, best_index, slack);
    return best_index;
  }

 private:
  static constexpr std::uint32_t kLeafSize = 4;

  struct Node {
    Box box;
    std::uint32_t begin, end;
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    Box box, centers;
    for (auto i = begin; i < end; ++i) {
      box.grow(boxes_[order_[i]]);
      centers.grow((boxes_[order_[i]].lo + boxes_[order_[i]].hi) * 0.5);
    }
    nodes_.push_back({box, begin, end});
    if (end - begin <= kLeafSize) return id;

    const Vec3 ext = centers.hi - centers.lo;
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    const auto mid = begin + (end - begin) / 2;
    auto center = [&](std::uint32_t t) {
      return component(boxes_[t].lo, axis) + component(boxes_[t].hi, axis);
    };
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t l, std::uint32_t r) { return center(l) < center(r); });
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::int32_t id, const Vec3& p, double& best, std::uint32_t& best_index,
              double slack) const {
    const auto& node = nodes_[id];
    if (node.box.distance(p) - slack > best) return;
    if (node.left < 0) {
      for (auto i = node.begin; i < node.end; ++i) {
        const auto t = order_[i];
        const double d = point_to_triangle_distance(p, triangles_[t]);
        if (d < best || (d == best && t < best_index)) {
          best = d;
          best_index = t;
        }
      }
      return;
    }
    const auto& l = nodes_[node.left];
    const auto& r = nodes_[node.right];
    if (l.box.distance(p) <= r.box.distance(p)) {
      search(node.left, p, best, best_index, slack);
      search(node.right, p, best, best_index, slack);
    } else {
      search(node.right, p, best, best_index, slack);
      search(node.left, p, best, best_index, slack);
    }
  }

  std::span<const Triangle> triangles_;
  std::vector<std::uint32_t> order_;
  std::vector<Box> boxes_;
  std::vector<Node> nodes_;
  double scale_ = 0;
};

std::pair<double, double> directed_similarity(const detail::FaceGeometry& from,
                                              const detail::FaceGeometry& to) {
  const TriangleBvh bvh(to.triangles);
  std::vector<double> cosine(from.centroids.size());
  const auto n = static_cast<std::int64_t>(from.centroids.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i)
    cosine[i] = dot(from.normals[i], to.normals[bvh.closest(from.centroids[i])]);

  double sum = 0, abs_sum = 0;
  for (double c : cosine) {
    sum += c;
    abs_sum += std::abs(c);
  }
  return {sum, abs_sum};
}

}  // namespace

std::vector<Vec3> sample_surface(const MeshReal& mesh, std::size_t count, std::uint64_t seed) {
  const auto cumulative = detail::cumulative_areas(mesh);
  std::vector<Vec3> points(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    points[i] = detail::surface_sample(mesh, cumulative, seed, static_cast<std::size_t>(i));
  return points;
}

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySurface, "empty point set");
  return 0.5 * (mean_nearest(a, b) + mean_nearest(b, a));
}

NormalConsistency normal_consistency(const MeshReal& src, const MeshReal& ref) {
  const auto s = detail::face_geometry(src), r = detail::face_geometry(ref);
  if (s.triangles.empty() || r.triangles.empty())
    throw Error(ErrorCode::EmptySurface, "mesh has no non-degenerate face");
  const auto [s_sum, s_abs] = directed_similarity(s, r);
  const auto [r_sum, r_abs] = directed_similarity(r, s);
  const double ns = 2.0 * static_cast<double>(s.triangles.size());
  const double nr = 2.0 * static_cast<double>(r.triangles.size());
  return {s_sum / ns + r_sum / nr, s_abs / ns + r_abs / nr};
}

std::int64_t closest_face(const MeshReal& mesh, const Vec3& p) {
  const auto g = detail::face_geometry(mesh);
  if (g.triangles.empty()) return -1;
  return g.index[TriangleBvh(g.triangles).closest(p)];
}

MetricsReport evaluate(const MeshReal& src, const MeshReal& ref, std::size_t samples,
                       std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorCode::InvalidConfig, "sample count must be positive");
  MetricsReport report;
  report.samples = samples;
  report.seed = seed;
  const auto a = sample_surface(src, samples, seed);
  const auto b = sample_surface(ref, samples, seed);
  report.cd = chamfer(a, b);
  const auto nc = normal_consistency(src, ref);
  report.nc = nc.nc;
  report.abs_nc = nc.abs_nc;
  return report;
}

}  // namespace tmts
