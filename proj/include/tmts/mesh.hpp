#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmts {

inline constexpr int kDefaultBits = 7;
inline constexpr int kMaxBits = 16;

// -----------------------------------------------------------------------------
// Small vector type used for real-valued geometry.
// -----------------------------------------------------------------------------

struct Vec3 {
  double x = 0, y = 0, z = 0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3 operator*(double s, Vec3 a) { return a * s; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }

// -----------------------------------------------------------------------------
// Mesh types.
// -----------------------------------------------------------------------------

// A vertex on the 2^bits integer grid spanning the [-0.5, 0.5] cube. z is the
// height axis.
struct QuantizedVertex {
  std::uint16_t x = 0, y = 0, z = 0;

  friend bool operator==(const QuantizedVertex&, const QuantizedVertex&) = default;
};

// Vertex indices in counter-clockwise order seen from the outward normal.
struct Face {
  std::uint32_t a = 0, b = 0, c = 0;

  friend bool operator==(const Face&, const Face&) = default;
  std::uint32_t operator[](int k) const { return k == 0 ? a : (k == 1 ? b : c); }
  bool degenerate() const { return a == b || b == c || c == a; }
};

struct QuantizedMesh {
  int bits = kDefaultBits;
  std::vector<QuantizedVertex> vertices;
  std::vector<Face> faces;

  friend bool operator==(const QuantizedMesh&, const QuantizedMesh&) = default;
};

struct MeshReal {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  friend bool operator==(const MeshReal&, const MeshReal&) = default;
};

enum class HeightAxis { X, Y, Z };

// Key used for every "lowest position" comparison: the height coordinate
// first, then the remaining axes in z, y, x order.
std::array<std::uint16_t, 3> height_key(const QuantizedVertex& v, HeightAxis axis = HeightAxis::Z);

// Cell-center dequantization: q -> (q + 0.5) / 2^bits - 0.5.
double dequantize(std::uint32_t q, int bits);
Vec3 dequantize(const QuantizedVertex& v, int bits);
MeshReal dequantize(const QuantizedMesh& mesh);

// Grid cell of a coordinate: clamp(floor((x + 0.5) * 2^bits), 0, 2^bits - 1).
std::uint16_t quantize_coordinate(double x, int bits);

// Throws Error(InvalidConfig) unless 1 <= bits <= 16.
void check_bits(int bits);

// -----------------------------------------------------------------------------
// Validation.
// -----------------------------------------------------------------------------

enum class ViolationKind { IndexOutOfRange, DegenerateFace, DuplicateDirectedEdge, EmptyMesh };

struct Violation {
  ViolationKind kind = ViolationKind::EmptyMesh;
  std::uint32_t face = 0;    // offending face (the later occurrence for edges)
  std::uint32_t origin = 0;  // directed edge, for DuplicateDirectedEdge
  std::uint32_t dest = 0;

  std::string describe() const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// A mesh is accepted when every directed edge occurs in at most one face and
// no face is degenerate. The directed-edge rule covers both edge-manifoldness
// and consistent winding between neighbors; bowtie vertices are allowed.
ValidationReport validate_manifold(const QuantizedMesh& mesh);

// Faces partitioned by shared undirected edges. Components are ordered by
// their smallest face index and each list is ascending.
std::vector<std::vector<std::uint32_t>> connected_components(const std::vector<Face>& faces);
inline std::vector<std::vector<std::uint32_t>> connected_components(const QuantizedMesh& mesh) {
  return connected_components(mesh.faces);
}

// Unit normal of (b - a) x (c - a) in dequantized coordinates, or nullopt for
// zero-area faces (|cross| < 1e-12).
std::optional<Vec3> face_normal(const QuantizedMesh& mesh, const Face& face);
std::optional<Vec3> face_normal(const MeshReal& mesh, const Face& face);
std::optional<Vec3> triangle_normal(Vec3 a, Vec3 b, Vec3 c);

// Every face with reversed winding.
template <typename Mesh>
Mesh flip_winding(Mesh mesh) {
  for (auto& f : mesh.faces) std::swap(f.b, f.c);
  return mesh;
}

struct Bounds {
  Vec3 min, max;
};
Bounds bounding_box(const MeshReal& mesh);

}  // namespace tmts
