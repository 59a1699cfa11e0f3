#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tmts/mesh.hpp"

namespace tmts::fixtures {

// Closed or open procedural meshes, counter-clockwise seen from outside.
MeshReal single_triangle();
MeshReal two_triangle_strip();
MeshReal tetrahedron();
MeshReal cube();
MeshReal octahedron();
MeshReal icosphere(int subdivisions);
MeshReal torus(int major_segments, int minor_segments, double major = 1.0, double minor = 0.4);
MeshReal grid_patch(int width, int height);
MeshReal open_cylinder(int segments, int rings);
MeshReal pyramid(int sides);
MeshReal disc(int segments);
// Two triangles joined only at one vertex.
MeshReal bowtie();
// Two tetrahedra sharing one apex vertex.
MeshReal double_tetrahedron_bowtie();

MeshReal translated(MeshReal mesh, Vec3 offset);
MeshReal scaled(MeshReal mesh, double s);
MeshReal merged(const std::vector<MeshReal>& parts);

// Tetrahedron with face 0 wound backwards.
MeshReal flipped_face_tetrahedron();
// Two triangles sharing edge 0-1 with the same direction in both.
MeshReal duplicated_halfedge_pair();

struct Fixture {
  std::string name;
  MeshReal mesh;
};

// The round-trip corpus: every entry is edge-manifold and consistently wound.
std::vector<Fixture> corpus();

// normalize + quantize.
QuantizedMesh prepare(const MeshReal& mesh, int bits = kDefaultBits);

// Faces as vertex positions, each rotated to start at its smallest position,
// sorted. Equal results mean equal face multisets with matching winding.
using PositionFace = std::array<std::array<std::uint16_t, 3>, 3>;
std::vector<PositionFace> canonical_faces(const QuantizedMesh& mesh);

// Random triangle soup inside the unit cube; faces are non-degenerate.
MeshReal random_soup(std::size_t faces, unsigned seed);

}  // namespace tmts::fixtures
