#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tmts/mesh.hpp"

namespace tmts {

struct Triangle {
  Vec3 a, b, c;
};

// Exact Euclidean distance from p to the closed triangle.
double point_to_triangle_distance(const Vec3& p, const Triangle& tri);

// Area-weighted uniform samples over the surface; point i depends only on
// (seed, i), so the result is independent of thread count. Degenerate faces
// carry zero weight. Throws Error(EmptySurface) when the total area is zero.
std::vector<Vec3> sample_surface(const MeshReal& mesh, std::size_t count, std::uint64_t seed);

// 0.5 * (mean_a min_b |a - b| + mean_b min_a |a - b|). Non-squared distances.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

struct NormalConsistency {
  double nc = 0;
  double abs_nc = 0;
};

// Symmetric normal consistency: each face centroid of one mesh is matched to
// the closest face of the other (ties to the lower index) and the cosine of
// their unit normals is averaged per direction; abs_nc takes |cos| inside the
// sums. Degenerate faces are skipped in both roles. Throws
// Error(EmptySurface) when either mesh has no non-degenerate face.
NormalConsistency normal_consistency(const MeshReal& src, const MeshReal& ref);

struct MetricsReport {
  double cd = 0;
  double nc = 0;
  double abs_nc = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// Chamfer distance over `samples` surface points per mesh (same seed for both)
// plus normal consistency.
MetricsReport evaluate(const MeshReal& src, const MeshReal& ref, std::size_t samples = 10000,
                       std::uint64_t seed = 42);

// Index of the closest non-degenerate face of `mesh` to p (ties to the lower
// index), using the accelerated search. Returns -1 when there is none.
std::int64_t closest_face(const MeshReal& mesh, const Vec3& p);

// Reference kernels: brute force, single threaded. They define the results the
// accelerated OpenMP kernels above must reproduce bit for bit.
namespace serial {

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);
NormalConsistency normal_consistency(const MeshReal& src, const MeshReal& ref);
std::vector<Vec3> sample_surface(const MeshReal& mesh, std::size_t count, std::uint64_t seed);

}  // namespace serial

namespace detail {

// Per-face data shared by both kernel families.
struct FaceGeometry {
  std::vector<Triangle> triangles;   // non-degenerate faces only
  std::vector<Vec3> normals;         // unit normals
  std::vector<Vec3> centroids;
  std::vector<std::uint32_t> index;  // original face index
};
FaceGeometry face_geometry(const MeshReal& mesh);

// Sample i of the surface given the cumulative area table.
Vec3 surface_sample(const MeshReal& mesh, std::span<const double> cumulative_area,
                    std::uint64_t seed, std::size_t i);
std::vector<double> cumulative_areas(const MeshReal& mesh);

}  // namespace detail

}  // namespace tmts
