#include "tmts/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

#include "tmts/error.hpp"

namespace tmts {

void PreprocessConfig::check() const {
  check_bits(bits);
  if (!(scale_low > 0 && scale_low <= scale_high && scale_high <= 1))
    throw Error(ErrorCode::InvalidConfig, "scale range must satisfy 0 < low <= high <= 1");
  if (!(flip_probability >= 0 && flip_probability <= 1))
    throw Error(ErrorCode::InvalidConfig, "flip probability must lie in [0, 1]");
  if (!(z_rotation_max_degrees >= 0 && z_rotation_max_degrees <= 180))
    throw Error(ErrorCode::InvalidConfig, "z rotation range must lie in [0, 180] degrees");
  if (projection_grid < 1 || projection_grid > 8192)
    throw Error(ErrorCode::InvalidConfig, "projection grid must lie in [1, 8192]");
  if (!(projection_min_area >= 0 && projection_min_area <= 1))
    throw Error(ErrorCode::InvalidConfig, "projection min-area fraction must lie in [0, 1]");
}

MeshReal normalize(const MeshReal& mesh) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::DegenerateExtent, "mesh has no vertices");
  const auto box = bounding_box(mesh);
  const Vec3 extent = box.max - box.min;
  const double longest = std::max({extent.x, extent.y, extent.z});
  if (!(longest > 0)) throw Error(ErrorCode::DegenerateExtent, "all vertices coincide");

  const Vec3 center = (box.min + box.max) * 0.5;
  const double scale = 1.0 / longest;
  MeshReal out = mesh;
  for (auto& v : out.vertices) v = (v - center) * scale;
  return out;
}

bool inside_unit_cube(const MeshReal& mesh) {
  constexpr double lo = -0.5 - 1e-9, hi = 0.5 + 1e-9;
  return std::all_of(mesh.vertices.begin(), mesh.vertices.end(), [](const Vec3& v) {
    return v.x >= lo && v.x <= hi && v.y >= lo && v.y <= hi && v.z >= lo && v.z <= hi;
  });
}

QuantizedMesh quantize(const MeshReal& mesh, int bits) {
  check_bits(bits);
  if (!inside_unit_cube(mesh))
    throw Error(ErrorCode::OutOfRange, "coordinates must lie within [-0.5, 0.5]");

  QuantizedMesh out;
  out.bits = bits;
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  std::unordered_map<std::uint64_t, std::uint32_t> by_cell;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& p = mesh.vertices[i];
    const QuantizedVertex q{quantize_coordinate(p.x, bits), quantize_coordinate(p.y, bits),
                            quantize_coordinate(p.z, bits)};
    const std::uint64_t cell = (std::uint64_t{q.z} << 32) | (std::uint64_t{q.y} << 16) | q.x;
    auto [it, inserted] = by_cell.emplace(cell, static_cast<std::uint32_t>(out.vertices.size()));
    if (inserted) out.vertices.push_back(q);
    remap[i] = it->second;
  }

  std::set<std::array<std::uint32_t, 3>> seen;
  for (const auto& f : mesh.faces) {
    if (f.a >= remap.size() || f.b >= remap.size() || f.c >= remap.size())
      throw Error(ErrorCode::InvalidMesh, "face index out of range");
    const Face g{remap[f.a], remap[f.b], remap[f.c]};
    if (g.degenerate()) continue;
    std::array<std::uint32_t, 3> canonical{g.a, g.b, g.c};
    std::sort(canonical.begin(), canonical.end());
    if (!seen.insert(canonical).second) continue;
    out.faces.push_back(g);
  }
  return out;
}

// -----------------------------------------------------------------------------
// Projection screening.
// -----------------------------------------------------------------------------

namespace {

struct Point2 {
  double u, v;
};

// Continuous raster coordinate of a dequantized value: pixel i covers [i, i+1).
double to_raster(double x, int grid) { return (x + 0.5) * grid; }

int pixel_of(double r, int grid) {
  return std::clamp(static_cast<int>(std::floor(r)), 0, grid - 1);
}

double edge_fn(Point2 a, Point2 b, Point2 p) {
  return (b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u);
}

}  // namespace

std::vector<std::uint8_t> rasterize_projection(const QuantizedMesh& mesh, int axis, int grid) {
  std::vector<std::uint8_t> image(static_cast<std::size_t>(grid) * grid, 0);
  const int iu = axis == 0 ? 1 : 0;
  const int iv = axis == 2 ? 1 : 2;

  std::vector<Point2> pts;
  pts.reserve(mesh.vertices.size());
  for (const auto& q : mesh.vertices) {
    const Vec3 p = dequantize(q, mesh.bits);
    const double c[3] = {p.x, p.y, p.z};
    pts.push_back({to_raster(c[iu], grid), to_raster(c[iv], grid)});
  }
  auto mark = [&](int i, int j) { image[static_cast<std::size_t>(j) * grid + i] = 1; };

  for (const auto& f : mesh.faces) {
    const Point2 a = pts[f.a], b = pts[f.b], c = pts[f.c];

    // Outline: faces seen edge-on still cover the pixels along their edges.
    for (const auto& [p, q] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
      const double len = std::hypot(q.u - p.u, q.v - p.v);
      const int steps = static_cast<int>(std::ceil(len * 2)) + 1;
      for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        mark(pixel_of(p.u + (q.u - p.u) * t, grid), pixel_of(p.v + (q.v - p.v) * t, grid));
      }
    }

    // Interior: pixel centers inside the projected triangle.
    const double area = edge_fn(a, b, c);
    if (area == 0) continue;
    const int i0 = pixel_of(std::min({a.u, b.u, c.u}), grid);
    const int i1 = pixel_of(std::max({a.u, b.u, c.u}), grid);
    const int j0 = pixel_of(std::min({a.v, b.v, c.v}), grid);
    const int j1 = pixel_of(std::max({a.v, b.v, c.v}), grid);
    const double sign = area > 0 ? 1.0 : -1.0;
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const Point2 p{i + 0.5, j + 0.5};
        if (sign * edge_fn(a, b, p) >= 0 && sign * edge_fn(b, c, p) >= 0 &&
            sign * edge_fn(c, a, p) >= 0)
          mark(i, j);
      }
    }
  }
  return image;
}

int count_clusters(const std::vector<std::uint8_t>& image, int grid) {
  std::vector<std::uint8_t> seen(image.size(), 0);
  std::vector<int> stack;
  int clusters = 0;
  for (int start = 0; start < static_cast<int>(image.size()); ++start) {
    if (!image[start] || seen[start]) continue;
    ++clusters;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int i = p % grid, j = p / grid;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ni = i + di, nj = j + dj;
          if (ni < 0 || nj < 0 || ni >= grid || nj >= grid) continue;
          const int q = nj * grid + ni;
          if (image[q] && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
  }
  return clusters;
}

AcceptDecision filter(const QuantizedMesh& mesh, const PreprocessConfig& cfg) {
  cfg.check();
  AcceptDecision decision;
  auto reject = [&](RejectKind kind, std::string detail) {
    decision.accept = false;
    decision.reasons.push_back({kind, std::move(detail)});
  };

  if (mesh.faces.size() > cfg.max_faces)
    reject(RejectKind::FaceCount, std::to_string(mesh.faces.size()) + " faces exceeds limit " +
                                      std::to_string(cfg.max_faces));

  const auto report = validate_manifold(mesh);
  if (!report.ok) {
    reject(RejectKind::NotManifold, report.violations.front().describe() + " (" +
                                        std::to_string(report.violations.size()) +
                                        " violations)");
    // Projections of an invalid index set are meaningless.
    for (const auto& v : report.violations)
      if (v.kind == ViolationKind::IndexOutOfRange || v.kind == ViolationKind::EmptyMesh)
        return decision;
  }

  static constexpr const char* kAxisName[] = {"x", "y", "z"};
  const int grid = cfg.projection_grid;
  for (int axis = 0; axis < 3; ++axis) {
    const auto image = rasterize_projection(mesh, axis, grid);
    const auto filled = std::count(image.begin(), image.end(), std::uint8_t{1});
    const double fraction = static_cast<double>(filled) / static_cast<double>(image.size());
    if (fraction < cfg.projection_min_area)
      reject(RejectKind::ProjectionArea, std::string("projection along ") + kAxisName[axis] +
                                             " covers fraction " + std::to_string(fraction));
    const int clusters = count_clusters(image, grid);
    if (clusters > 1)
      reject(RejectKind::ProjectionClusters, std::string("projection along ") + kAxisName[axis] +
                                                 " has " + std::to_string(clusters) +
                                                 " clusters");
  }
  return decision;
}

// -----------------------------------------------------------------------------
// Augmentation.
// -----------------------------------------------------------------------------

AugmentParams draw_augment(const PreprocessConfig& cfg, std::uint64_t seed) {
  cfg.check();
  // mt19937_64 output is fixed by the standard; distributions are not, so the
  // draws go through unit_double.
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return unit_double(rng()); };

  AugmentParams p;
  const double span = cfg.scale_high - cfg.scale_low;
  p.scale = {cfg.scale_low + span * uniform(), cfg.scale_low + span * uniform(),
             cfg.scale_low + span * uniform()};
  const double flip = uniform(), which = uniform(), sign = uniform();
  if (flip < cfg.flip_probability) {
    p.quarter_turn_axis = which < 0.5 ? 0 : 1;
    p.quarter_turn_sign = sign < 0.5 ? -1 : 1;
  }
  const double degrees = (2.0 * uniform() - 1.0) * cfg.z_rotation_max_degrees;
  p.z_angle_radians = degrees * std::numbers::pi / 180.0;
  return p;
}

MeshReal apply_augment(const MeshReal& mesh, const AugmentParams& params) {
  MeshReal out = mesh;
  const double c = std::cos(params.z_angle_radians), s = std::sin(params.z_angle_radians);
  const double sign = params.quarter_turn_sign;
  for (auto& v : out.vertices) {
    v = {v.x * params.scale.x, v.y * params.scale.y, v.z * params.scale.z};
    if (params.quarter_turn_axis == 0) {
      v = {v.x, -sign * v.z, sign * v.y};
    } else if (params.quarter_turn_axis == 1) {
      v = {sign * v.z, v.y, -sign * v.x};
    }
    if (params.z_angle_radians != 0) v = {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
  }
  return out;
}

MeshReal augment(const MeshReal& mesh, const PreprocessConfig& cfg, std::uint64_t seed) {
  return apply_augment(mesh, draw_augment(cfg, seed));
}

}  // namespace tmts
