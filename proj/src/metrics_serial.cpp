// Brute-force reference kernels and the per-face helpers both kernel families
// share. Everything here is single threaded and visits pairs in index order.

#include <algorithm>
#include <limits>

#include "tmts/error.hpp"
#include "tmts/metrics.hpp"
#include "tmts/preprocess.hpp"

namespace tmts {

// Closest point on a triangle by Voronoi region (vertex, edge, face).
double point_to_triangle_distance(const Vec3& p, const Triangle& tri) {
  const Vec3 &a = tri.a, &b = tri.b, &c = tri.c;
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return length(p - a);

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return length(p - b);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double v = d1 / (d1 - d3);
    return length(p - (a + ab * v));
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return length(p - c);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double w = d2 / (d2 - d6);
    return length(p - (a + ac * w));
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return length(p - (b + (c - b) * w));
  }

  const double denom = va + vb + vc;
  if (denom == 0) {
    // Collinear triangle: the closest point lies on one of its edges.
    auto segment = [&](const Vec3& s, const Vec3& t) {
      const Vec3 st = t - s;
      const double len2 = dot(st, st);
      const double u = len2 > 0 ? std::clamp(dot(p - s, st) / len2, 0.0, 1.0) : 0.0;
      return length(p - (s + st * u));
    };
    return std::min({segment(a, b), segment(b, c), segment(c, a)});
  }
  const double v = vb / denom, w = vc / denom;
  return length(p - (a + ab * v + ac * w));
}

namespace detail {

FaceGeometry face_geometry(const MeshReal& mesh) {
  FaceGeometry g;
  for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    const Triangle t{mesh.vertices[face.a], mesh.vertices[face.b], mesh.vertices[face.c]};
    const auto n = triangle_normal(t.a, t.b, t.c);
    if (!n) continue;
    g.triangles.push_back(t);
    g.normals.push_back(*n);
    g.centroids.push_back((t.a + t.b + t.c) * (1.0 / 3.0));
    g.index.push_back(f);
  }
  return g;
}

std::vector<double> cumulative_areas(const MeshReal& mesh) {
  std::vector<double> cumulative;
  cumulative.reserve(mesh.faces.size());
  double total = 0;
  for (const auto& f : mesh.faces) {
    const Vec3 a = mesh.vertices[f.a], b = mesh.vertices[f.b], c = mesh.vertices[f.c];
    const double area2 = length(cross(b - a, c - a));
    if (area2 >= 1e-12) total += 0.5 * area2;
    cumulative.push_back(total);
  }
  if (!(total > 0)) throw Error(ErrorCode::EmptySurface, "mesh has no non-degenerate face");
  return cumulative;
}

Vec3 surface_sample(const MeshReal& mesh, std::span<const double> cumulative_area,
                    std::uint64_t seed, std::size_t i) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i)));
  const double u0 = unit_double(h);
  const double u1 = unit_double(splitmix64(h));
  const double u2 = unit_double(splitmix64(h ^ 0x5bd1e995u));

  const double target = u0 * cumulative_area.back();
  auto it = std::upper_bound(cumulative_area.begin(), cumulative_area.end(), target);
  if (it == cumulative_area.end()) --it;
  const auto& f = mesh.faces[static_cast<std::size_t>(it - cumulative_area.begin())];

  const double r = std::sqrt(u1);
  const Vec3 a = mesh.vertices[f.a], b = mesh.vertices[f.b], c = mesh.vertices[f.c];
  return a * (1 - r) + b * (r * (1 - u2)) + c * (r * u2);
}

}  // namespace detail

namespace serial {

std::vector<Vec3> sample_surface(const MeshReal& mesh, std::size_t count, std::uint64_t seed) {
  const auto cumulative = detail::cumulative_areas(mesh);
  std::vector<Vec3> points(count);
  for (std::size_t i = 0; i < count; ++i)
    points[i] = detail::surface_sample(mesh, cumulative, seed, i);
  return points;
}

namespace {

double squared(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return d.x * d.x + d.y * d.y + d.z * d.z;
}

double mean_nearest(std::span<const Vec3> from, std::span<const Vec3> to) {
  double sum = 0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) best = std::min(best, squared(p, q));
    sum += std::sqrt(best);
  }
  return sum / static_cast<double>(from.size());
}

// Sum of cosines (and |cosines|) from each centroid of `from` to its closest
// face of `to`.
std::pair<double, double> directed_similarity(const detail::FaceGeometry& from,
                                              const detail::FaceGeometry& to) {
  double sum = 0, abs_sum = 0;
  for (std::size_t i = 0; i < from.centroids.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < to.triangles.size(); ++j) {
      const double d = point_to_triangle_distance(from.centroids[i], to.triangles[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    const double cosine = dot(from.normals[i], to.normals[best_j]);
    sum += cosine;
    abs_sum += std::abs(cosine);
  }
  return {sum, abs_sum};
}

}  // namespace

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

}  // namespace serial

}  // namespace tmts
