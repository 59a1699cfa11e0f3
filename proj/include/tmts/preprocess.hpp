#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmts/mesh.hpp"

namespace tmts {

struct PreprocessConfig {
  int bits = kDefaultBits;
  std::size_t max_faces = 5500;

  // Orthographic projection screening.
  int projection_grid = 256;
  double projection_min_area = 0.005;

  // Augmentation.
  double scale_low = 0.75;
  double scale_high = 0.95;
  double flip_probability = 0.3;
  double z_rotation_max_degrees = 180.0;

  // Throws Error(InvalidConfig) when a field is out of range.
  void check() const;
};

// Centers the bounding box at the origin and scales uniformly so the longest
// axis spans [-0.5, 0.5]. Throws Error(DegenerateExtent) when all vertices
// coincide.
MeshReal normalize(const MeshReal& mesh);

// Snaps to the 2^bits grid, merges vertices sharing a cell (first occurrence
// keeps its slot), drops faces that collapse and faces whose unordered vertex
// set repeats an earlier face. Throws Error(OutOfRange) when a coordinate is
// outside [-0.5, 0.5] by more than 1e-9.
QuantizedMesh quantize(const MeshReal& mesh, int bits = kDefaultBits);

// True when every coordinate lies in [-0.5, 0.5] up to 1e-9.
bool inside_unit_cube(const MeshReal& mesh);

// -----------------------------------------------------------------------------
// Dataset filter.
// -----------------------------------------------------------------------------

enum class RejectKind { FaceCount, NotManifold, ProjectionArea, ProjectionClusters };

struct RejectReason {
  RejectKind kind;
  std::string detail;
};

struct AcceptDecision {
  bool accept = true;
  std::vector<RejectReason> reasons;
};

// Binary raster of a mesh projected along one axis (0 = x, 1 = y, 2 = z) onto a
// grid x grid image of the [-0.5, 0.5] square. Row-major, 1 = covered.
std::vector<std::uint8_t> rasterize_projection(const QuantizedMesh& mesh, int axis, int grid);

// Number of 8-connected clusters of covered pixels.
int count_clusters(const std::vector<std::uint8_t>& image, int grid);

AcceptDecision filter(const QuantizedMesh& mesh, const PreprocessConfig& cfg = {});

// -----------------------------------------------------------------------------
// Augmentation.
// -----------------------------------------------------------------------------

// A concrete draw of the random augmentation. Applied in order: per-axis scale,
// optional quarter turn about x or y, then rotation about z.
struct AugmentParams {
  Vec3 scale{1, 1, 1};
  int quarter_turn_axis = -1;  // -1 none, 0 = x, 1 = y
  int quarter_turn_sign = 1;   // +1 or -1 (times 90 degrees)
  double z_angle_radians = 0;
};

AugmentParams draw_augment(const PreprocessConfig& cfg, std::uint64_t seed);
MeshReal apply_augment(const MeshReal& mesh, const AugmentParams& params);
MeshReal augment(const MeshReal& mesh, const PreprocessConfig& cfg, std::uint64_t seed);

// Deterministic uniform double in [0, 1) from a 64-bit word (53-bit mantissa).
inline double unit_double(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// SplitMix64 finalizer; used to derive independent streams from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace tmts
