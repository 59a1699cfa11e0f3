#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "tmts/preprocess.hpp"

namespace tmts::fixtures {

namespace {

constexpr double kPi = std::numbers::pi;

// Flip faces of a convex, origin-enclosing mesh so normals point away from
// the vertex centroid.
MeshReal orient_outward(MeshReal mesh) {
  Vec3 center;
  for (const auto& v : mesh.vertices) center = center + v;
  center = center * (1.0 / static_cast<double>(mesh.vertices.size()));
  for (auto& f : mesh.faces) {
    const Vec3 a = mesh.vertices[f.a], b = mesh.vertices[f.b], c = mesh.vertices[f.c];
    const Vec3 n = cross(b - a, c - a);
    if (dot(n, (a + b + c) * (1.0 / 3.0) - center) < 0) std::swap(f.b, f.c);
  }
  return mesh;
}

std::uint32_t u32(int i) { return static_cast<std::uint32_t>(i); }

}  // namespace

MeshReal single_triangle() { return {{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}}; }

MeshReal two_triangle_strip() {
  return {{{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0.1}, {0.5, -1, 0.2}}, {{0, 1, 2}, {1, 0, 3}}};
}

MeshReal tetrahedron() {
  return {{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
          {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}};
}

MeshReal cube() {
  MeshReal m;
  for (int i = 0; i < 8; ++i) m.vertices.push_back({double(i & 1), double((i >> 1) & 1), double(i >> 2)});
  const int quads[6][4] = {{0, 1, 3, 2}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.faces.push_back({u32(q[0]), u32(q[1]), u32(q[2])});
    m.faces.push_back({u32(q[0]), u32(q[2]), u32(q[3])});
  }
  return orient_outward(m);
}

MeshReal octahedron() {
  MeshReal m{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}, {}};
  for (std::uint32_t x : {0u, 1u})
    for (std::uint32_t y : {2u, 3u})
      for (std::uint32_t z : {4u, 5u}) m.faces.push_back({x, y, z});
  return orient_outward(m);
}

MeshReal icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  MeshReal m{{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
              {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}},
             {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
              {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
              {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
              {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}}};
  for (auto& v : m.vertices) v = v * (1.0 / length(v));
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 p = (m.vertices[a] + m.vertices[b]) * 0.5;
      m.vertices.push_back(p * (1.0 / length(p)));
      const auto id = static_cast<std::uint32_t>(m.vertices.size() - 1);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> faces;
    for (const auto& f : m.faces) {
      const auto ab = mid(f.a, f.b), bc = mid(f.b, f.c), ca = mid(f.c, f.a);
      faces.push_back({f.a, ab, ca});
      faces.push_back({f.b, bc, ab});
      faces.push_back({f.c, ca, bc});
      faces.push_back({ab, bc, ca});
    }
    m.faces = std::move(faces);
  }
  return orient_outward(m);
}

MeshReal torus(int major_segments, int minor_segments, double major, double minor) {
  MeshReal m;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2 * kPi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2 * kPi * j / minor_segments;
      const double ring = major + minor * std::cos(v);
      m.vertices.push_back({ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)});
    }
  }
  auto id = [&](int i, int j) {
    return u32((i % major_segments) * minor_segments + (j % minor_segments));
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  }
  return m;
}

MeshReal grid_patch(int width, int height) {
  MeshReal m;
  for (int j = 0; j <= height; ++j)
    for (int i = 0; i <= width; ++i) {
      const double x = double(i) / width, y = double(j) / height;
      m.vertices.push_back({x, y, 0.15 * std::sin(3 * x) * std::cos(2 * y)});
    }
  auto id = [&](int i, int j) { return u32(j * (width + 1) + i); };
  for (int j = 0; j < height; ++j)
    for (int i = 0; i < width; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

MeshReal open_cylinder(int segments, int rings) {
  MeshReal m;
  for (int r = 0; r <= rings; ++r)
    for (int s = 0; s < segments; ++s) {
      const double a = 2 * kPi * s / segments;
      m.vertices.push_back({std::cos(a), std::sin(a), 2.0 * r / rings});
    }
  auto id = [&](int s, int r) { return u32(r * segments + (s % segments)); };
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      m.faces.push_back({id(s, r), id(s + 1, r), id(s + 1, r + 1)});
      m.faces.push_back({id(s, r), id(s + 1, r + 1), id(s, r + 1)});
    }
  return m;
}

MeshReal pyramid(int sides) {
  MeshReal m;
  for (int s = 0; s < sides; ++s) {
    const double a = 2 * kPi * s / sides;
    m.vertices.push_back({std::cos(a), std::sin(a), 0});
  }
  m.vertices.push_back({0.1, -0.05, 1.3});
  const auto apex = u32(sides);
  for (int s = 0; s < sides; ++s) m.faces.push_back({u32(s), u32((s + 1) % sides), apex});
  for (int s = 1; s + 1 < sides; ++s) m.faces.push_back({0, u32(s + 1), u32(s)});
  return orient_outward(m);
}

MeshReal disc(int segments) {
  MeshReal m{{{0, 0, 0.2}}, {}};
  for (int s = 0; s < segments; ++s) {
    const double a = 2 * kPi * s / segments;
    m.vertices.push_back({std::cos(a), std::sin(a), 0});
  }
  for (int s = 0; s < segments; ++s) m.faces.push_back({0, u32(1 + s), u32(1 + (s + 1) % segments)});
  return m;
}

MeshReal bowtie() {
  return {{{0, 0, 0}, {1, 0, 0}, {0.6, 1, 0}, {-1, 0, 0.2}, {-0.6, -1, 0.3}}, {{0, 1, 2}, {0, 3, 4}}};
}

MeshReal double_tetrahedron_bowtie() {
  // Apex at index 0; the second tetrahedron is the first turned 180 degrees
  // about the x axis.
  MeshReal m{{{0, 0, 0}, {1, 0.2, 1}, {-0.6, 1, 1}, {-0.5, -0.9, 1}}, {}};
  m.vertices.push_back({1, -0.2, -1});
  m.vertices.push_back({-0.6, -1, -1});
  m.vertices.push_back({-0.5, 0.9, -1});
  auto tet = [&](std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    // Sides toward the apex plus the base, consistently wound.
    m.faces.push_back({0, b, c});
    m.faces.push_back({0, c, d});
    m.faces.push_back({0, d, b});
    m.faces.push_back({b, d, c});
  };
  tet(1, 2, 3);
  tet(4, 5, 6);
  return m;
}

MeshReal translated(MeshReal mesh, Vec3 offset) {
  for (auto& v : mesh.vertices) v = v + offset;
  return mesh;
}

MeshReal scaled(MeshReal mesh, double s) {
  for (auto& v : mesh.vertices) v = v * s;
  return mesh;
}

MeshReal merged(const std::vector<MeshReal>& parts) {
  MeshReal out;
  for (const auto& p : parts) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
    for (const auto& f : p.faces) out.faces.push_back({f.a + base, f.b + base, f.c + base});
  }
  return out;
}

MeshReal flipped_face_tetrahedron() {
  auto m = tetrahedron();
  std::swap(m.faces[0].b, m.faces[0].c);
  return m;
}

MeshReal duplicated_halfedge_pair() {
  return {{{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, -1, 0.1}}, {{0, 1, 2}, {0, 1, 3}}};
}

std::vector<Fixture> corpus() {
  return {
      {"single_triangle", single_triangle()},
      {"two_triangle_strip", two_triangle_strip()},
      {"tetrahedron", tetrahedron()},
      {"cube", cube()},
      {"octahedron", octahedron()},
      {"icosphere0", icosphere(0)},
      {"icosphere1", icosphere(1)},
      {"icosphere2", icosphere(2)},
      {"icosphere3", icosphere(3)},
      {"torus_24x12", torus(24, 12)},
      {"torus_40x16", torus(40, 16)},
      {"grid_6x4", grid_patch(6, 4)},
      {"grid_12x12", grid_patch(12, 12)},
      {"open_cylinder", open_cylinder(16, 6)},
      {"pyramid7", pyramid(7)},
      {"disc12", disc(12)},
      {"two_tetrahedra", merged({tetrahedron(), translated(tetrahedron(), {2.5, 0.3, 0.1})})},
      {"three_components",
       merged({tetrahedron(), translated(cube(), {2.5, 0, 0}), translated(octahedron(), {0.5, 3, 1})})},
      {"bowtie", bowtie()},
      {"double_tetrahedron_bowtie", double_tetrahedron_bowtie()},
      {"torus_and_sphere",
       merged({torus(20, 10), translated(scaled(icosphere(1), 0.5), {0, 0, 2})})},
      {"grid_cylinder_disc",
       merged({grid_patch(5, 5), translated(scaled(open_cylinder(10, 3), 0.4), {2, 0.5, 0}),
               translated(scaled(disc(9), 0.5), {0.5, 2.2, 0.4})})},
  };
}

QuantizedMesh prepare(const MeshReal& mesh, int bits) { return quantize(normalize(mesh), bits); }

std::vector<PositionFace> canonical_faces(const QuantizedMesh& mesh) {
  std::vector<PositionFace> out;
  out.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    PositionFace pf;
    for (int k = 0; k < 3; ++k) {
      const auto& v = mesh.vertices[f[k]];
      pf[k] = {v.x, v.y, v.z};
    }
    const auto first = std::min_element(pf.begin(), pf.end()) - pf.begin();
    std::rotate(pf.begin(), pf.begin() + first, pf.end());
    out.push_back(pf);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MeshReal random_soup(std::size_t faces, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(-0.35, 0.35), offset(-0.15, 0.15);
  MeshReal m;
  while (m.faces.size() < faces) {
    const Vec3 a{coord(rng), coord(rng), coord(rng)};
    const Vec3 b = a + Vec3{offset(rng), offset(rng), offset(rng)};
    const Vec3 c = a + Vec3{offset(rng), offset(rng), offset(rng)};
    if (length(cross(b - a, c - a)) < 1e-4) continue;
    const auto base = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.insert(m.vertices.end(), {a, b, c});
    m.faces.push_back({base, base + 1, base + 2});
  }
  return m;
}

}  // namespace tmts::fixtures
