#include "tmts/mesh.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "tmts/error.hpp"

namespace tmts {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateHalfEdge: return "DuplicateHalfEdge";
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MalformedSequence: return "MalformedSequence";
    case ErrorCode::Desync: return "Desync";
    case ErrorCode::IllegalAnswer: return "IllegalAnswer";
    case ErrorCode::EmptySurface: return "EmptySurface";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonTriangle: return "NonTriangle";
    case ErrorCode::NegativeIndex: return "NegativeIndex";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::array<std::uint16_t, 3> height_key(const QuantizedVertex& v, HeightAxis axis) {
  switch (axis) {
    case HeightAxis::X: return {v.x, v.z, v.y};
    case HeightAxis::Y: return {v.y, v.z, v.x};
    case HeightAxis::Z: break;
  }
  return {v.z, v.y, v.x};
}

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxBits)
    throw Error(ErrorCode::InvalidConfig, "bit depth " + std::to_string(bits) + " outside [1, 16]");
}

double dequantize(std::uint32_t q, int bits) {
  return (static_cast<double>(q) + 0.5) / static_cast<double>(1u << bits) - 0.5;
}

Vec3 dequantize(const QuantizedVertex& v, int bits) {
  return {dequantize(v.x, bits), dequantize(v.y, bits), dequantize(v.z, bits)};
}

MeshReal dequantize(const QuantizedMesh& mesh) {
  MeshReal out;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.vertices.push_back(dequantize(v, mesh.bits));
  out.faces = mesh.faces;
  return out;
}

std::uint16_t quantize_coordinate(double x, int bits) {
  const double cells = static_cast<double>(1u << bits);
  const double q = std::floor((x + 0.5) * cells);
  return static_cast<std::uint16_t>(std::clamp(q, 0.0, cells - 1.0));
}

std::string Violation::describe() const {
  switch (kind) {
    case ViolationKind::IndexOutOfRange:
      return "face " + std::to_string(face) + ": vertex index out of range";
    case ViolationKind::DegenerateFace:
      return "face " + std::to_string(face) + ": degenerate face";
    case ViolationKind::DuplicateDirectedEdge:
      return "face " + std::to_string(face) + ": duplicate directed edge " +
             std::to_string(origin) + "->" + std::to_string(dest);
    case ViolationKind::EmptyMesh:
      return "mesh has no faces";
  }
  return "unknown violation";
}

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

ValidationReport validate_manifold(const QuantizedMesh& mesh) {
  ValidationReport report;
  auto fail = [&](Violation v) {
    report.ok = false;
    report.violations.push_back(v);
  };
  if (mesh.faces.empty()) fail({ViolationKind::EmptyMesh});

  const auto n = mesh.vertices.size();
  std::unordered_map<std::uint64_t, std::uint32_t> owner;
  owner.reserve(mesh.faces.size() * 3);
  for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.a >= n || face.b >= n || face.c >= n) {
      fail({ViolationKind::IndexOutOfRange, f});
      continue;
    }
    if (face.degenerate()) {
      fail({ViolationKind::DegenerateFace, f});
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      const auto from = face[k], to = face[(k + 1) % 3];
      if (!owner.emplace(edge_key(from, to), f).second)
        fail({ViolationKind::DuplicateDirectedEdge, f, from, to});
    }
  }
  return report;
}

std::vector<std::vector<std::uint32_t>> connected_components(const std::vector<Face>& faces) {
  std::vector<std::uint32_t> parent(faces.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  // First face seen on each undirected edge; later faces union with it.
  std::unordered_map<std::uint64_t, std::uint32_t> first_on_edge;
  first_on_edge.reserve(faces.size() * 3);
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      auto a = faces[f][k], b = faces[f][(k + 1) % 3];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      auto [it, inserted] = first_on_edge.emplace(edge_key(a, b), f);
      if (!inserted) {
        const auto ra = find(it->second), rb = find(f);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }

  std::vector<std::vector<std::uint32_t>> components;
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    const auto root = find(f);
    auto [it, inserted] = slot.emplace(root, components.size());
    if (inserted) components.emplace_back();
    components[it->second].push_back(f);
  }
  return components;
}

std::optional<Vec3> triangle_normal(Vec3 a, Vec3 b, Vec3 c) {
  const Vec3 n = cross(b - a, c - a);
  const double len = length(n);
  if (len < 1e-12) return std::nullopt;
  return n * (1.0 / len);
}

std::optional<Vec3> face_normal(const QuantizedMesh& mesh, const Face& face) {
  return triangle_normal(dequantize(mesh.vertices[face.a], mesh.bits),
                         dequantize(mesh.vertices[face.b], mesh.bits),
                         dequantize(mesh.vertices[face.c], mesh.bits));
}

std::optional<Vec3> face_normal(const MeshReal& mesh, const Face& face) {
  return triangle_normal(mesh.vertices[face.a], mesh.vertices[face.b], mesh.vertices[face.c]);
}

Bounds bounding_box(const MeshReal& mesh) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Bounds b{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const auto& v : mesh.vertices) {
    b.min = {std::min(b.min.x, v.x), std::min(b.min.y, v.y), std::min(b.min.z, v.z)};
    b.max = {std::max(b.max.x, v.x), std::max(b.max.y, v.y), std::max(b.max.z, v.z)};
  }
  return b;
}

}  // namespace tmts
