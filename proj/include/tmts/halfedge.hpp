#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tmts/mesh.hpp"

namespace tmts {

struct DirectedEdge {
  std::uint32_t origin = 0;
  std::uint32_t dest = 0;

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
  DirectedEdge reversed() const { return {dest, origin}; }
};

// Half-edge h of face f is 3f + k and runs from face[k] to face[(k+1) % 3],
// so next/face are arithmetic and the only stored table is the lookup map.
using HalfEdge = std::uint32_t;

class HalfEdgeConnectivity {
 public:
  // Throws Error(DuplicateHalfEdge) when a directed edge occurs twice and
  // Error(InvalidMesh) on out-of-range indices or degenerate faces.
  static HalfEdgeConnectivity build(const QuantizedMesh& mesh);
  static HalfEdgeConnectivity build(const std::vector<Face>& faces, std::size_t vertex_count);

  std::size_t size() const { return origin_.size(); }
  std::size_t face_count() const { return origin_.size() / 3; }

  std::optional<HalfEdge> lookup(DirectedEdge e) const;

  std::uint32_t origin(HalfEdge h) const { return origin_[h]; }
  std::uint32_t dest(HalfEdge h) const { return origin_[next(h)]; }
  std::uint32_t face(HalfEdge h) const { return h / 3; }
  HalfEdge next(HalfEdge h) const { return h - h % 3 + (h % 3 + 1) % 3; }
  DirectedEdge edge(HalfEdge h) const { return {origin(h), dest(h)}; }

  // Third vertex of the face containing h.
  std::uint32_t opposite_vertex(HalfEdge h) const { return origin_[next(next(h))]; }

  std::optional<HalfEdge> twin(HalfEdge h) const { return lookup(edge(h).reversed()); }
  bool is_boundary(HalfEdge h) const { return !twin(h).has_value(); }

 private:
  std::vector<std::uint32_t> origin_;
  std::unordered_map<std::uint64_t, HalfEdge> index_;
};

}  // namespace tmts
