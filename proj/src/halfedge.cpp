#include "tmts/halfedge.hpp"

#include <string>

#include "tmts/error.hpp"

namespace tmts {

namespace {

std::uint64_t key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

HalfEdgeConnectivity HalfEdgeConnectivity::build(const QuantizedMesh& mesh) {
  return build(mesh.faces, mesh.vertices.size());
}

HalfEdgeConnectivity HalfEdgeConnectivity::build(const std::vector<Face>& faces,
                                                 std::size_t vertex_count) {
  HalfEdgeConnectivity conn;
  conn.origin_.reserve(faces.size() * 3);
  conn.index_.reserve(faces.size() * 3);
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    if (face.a >= vertex_count || face.b >= vertex_count || face.c >= vertex_count)
      throw Error(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " index out of range");
    if (face.degenerate())
      throw Error(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " is degenerate");
    for (int k = 0; k < 3; ++k) {
      const auto from = face[k], to = face[(k + 1) % 3];
      const HalfEdge h = 3 * f + k;
      if (!conn.index_.emplace(key(from, to), h).second)
        throw Error(ErrorCode::DuplicateHalfEdge, "directed edge " + std::to_string(from) +
                                                      "->" + std::to_string(to) + " in face " +
                                                      std::to_string(f) + " already used");
      conn.origin_.push_back(from);
    }
  }
  return conn;
}

std::optional<HalfEdge> HalfEdgeConnectivity::lookup(DirectedEdge e) const {
  const auto it = index_.find(key(e.origin, e.dest));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace tmts
