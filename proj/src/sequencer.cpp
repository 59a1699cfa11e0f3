#include "tmts/sequencer.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <unordered_map>

#include "tmts/error.hpp"
#include "tmts/halfedge.hpp"

namespace tmts {

std::string_view to_string(TraversalOrder order) {
  return order == TraversalOrder::Dfs ? "dfs" : "bfs";
}

bool is_legal(InputKind input, OutputKind output) {
  switch (input) {
    case InputKind::Sos: return output != OutputKind::Stop;
    case InputKind::Sos2: return output == OutputKind::Vertex;
    case InputKind::Edge: return output != OutputKind::Eos;
  }
  return false;
}

namespace {

// Half-edges sorted by the component start rule; the first one whose face is
// still unvisited starts the next component.
std::vector<HalfEdge> start_order(const QuantizedMesh& mesh, const HalfEdgeConnectivity& conn,
                                  HeightAxis axis) {
  std::vector<HalfEdge> order(conn.size());
  for (HalfEdge h = 0; h < order.size(); ++h) order[h] = h;
  auto key = [&](std::uint32_t v) { return std::pair{height_key(mesh.vertices[v], axis), v}; };
  std::sort(order.begin(), order.end(), [&](HalfEdge l, HalfEdge r) {
    const auto lo = key(conn.origin(l)), ro = key(conn.origin(r));
    if (lo != ro) return lo < ro;
    return key(conn.dest(l)) < key(conn.dest(r));
  });
  return order;
}

// Tokens name vertices by grid position, so every referenced vertex needs a
// distinct in-range cell.
void check_positions(const QuantizedMesh& mesh) {
  const std::uint32_t limit = 1u << mesh.bits;
  std::vector<bool> used(mesh.vertices.size(), false);
  for (const auto& f : mesh.faces) used[f.a] = used[f.b] = used[f.c] = true;
  std::unordered_map<std::uint64_t, std::uint32_t> cells;
  for (std::uint32_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!used[i]) continue;
    const auto& v = mesh.vertices[i];
    if (v.x >= limit || v.y >= limit || v.z >= limit)
      throw Error(ErrorCode::InvalidMesh,
                  "vertex " + std::to_string(i) + " lies outside the " +
                      std::to_string(mesh.bits) + "-bit grid");
    const std::uint64_t key = (std::uint64_t{v.x} << 32) | (std::uint64_t{v.y} << 16) | v.z;
    const auto [it, fresh] = cells.emplace(key, i);
    if (!fresh)
      throw Error(ErrorCode::InvalidMesh, "vertices " + std::to_string(it->second) + " and " +
                                              std::to_string(i) + " share a grid position");
  }
}

}  // namespace

TokenSequence encode(const QuantizedMesh& mesh, const EncodeOptions& options) {
  check_bits(mesh.bits);
  const auto report = validate_manifold(mesh);
  if (!report.ok) throw Error(ErrorCode::InvalidMesh, report.violations.front().describe());

  check_positions(mesh);

  const auto conn = HalfEdgeConnectivity::build(mesh);
  const auto starts = start_order(mesh, conn, options.height_axis);
  const bool dfs = options.order == TraversalOrder::Dfs;

  TokenSequence seq;
  seq.bits = mesh.bits;
  seq.order = options.order;
  seq.records.reserve(2 * mesh.faces.size() + 8);
  const auto& pos = mesh.vertices;

  std::vector<bool> visited(mesh.faces.size(), false);
  std::deque<DirectedEdge> pending;
  std::size_t cursor = 0;
  for (;;) {
    while (cursor < starts.size() && visited[conn.face(starts[cursor])]) ++cursor;
    if (cursor == starts.size()) break;

    const DirectedEdge start = conn.edge(starts[cursor]);
    seq.records.push_back({StepInput::sos(), StepOutput::vertex_of(pos[start.origin])});
    seq.records.push_back(
        {StepInput::sos2(pos[start.origin]), StepOutput::vertex_of(pos[start.dest])});
    if (dfs) {
      pending.push_back(start.reversed());
      pending.push_back(start);
    } else {
      pending.push_back(start);
      pending.push_back(start.reversed());
    }

    while (!pending.empty()) {
      DirectedEdge e;
      if (dfs) {
        e = pending.back();
        pending.pop_back();
      } else {
        e = pending.front();
        pending.pop_front();
      }
      const StepInput input = StepInput::edge(pos[e.origin], pos[e.dest]);
      const auto h = conn.lookup(e);
      if (!h || visited[conn.face(*h)]) {
        seq.records.push_back({input, StepOutput::stop()});
        continue;
      }
      visited[conn.face(*h)] = true;
      const auto c = conn.opposite_vertex(*h);
      seq.records.push_back({input, StepOutput::vertex_of(pos[c])});
      pending.push_back({e.origin, c});
      pending.push_back({c, e.dest});
    }
  }
  seq.records.push_back({StepInput::sos(), StepOutput::eos()});
  return seq;
}

SequenceStats sequence_stats(const TokenSequence& seq) {
  auto malformed = [](std::size_t i, const std::string& what) {
    return Error(ErrorCode::MalformedSequence, "record " + std::to_string(i) + ": " + what);
  };

  SequenceStats stats;
  stats.length = seq.records.size();
  if (seq.records.empty()) throw malformed(0, "empty sequence");

  std::size_t component_edges = 0;
  auto close_component = [&](std::size_t i) {
    if (stats.components == 0) return;
    if (component_edges != 2 * stats.faces_per_component.back() + 2)
      throw malformed(i, "component edge count does not match its faces");
  };

  for (std::size_t i = 0; i < seq.records.size(); ++i) {
    const auto& r = seq.records[i];
    if (!is_legal(r.input.kind, r.output.kind)) throw malformed(i, "illegal input/output pair");
    switch (r.input.kind) {
      case InputKind::Sos:
        close_component(i);
        if (r.output.kind == OutputKind::Eos) {
          if (i + 1 != seq.records.size()) throw malformed(i, "EOS is not the last record");
          return stats;
        }
        if (i + 1 >= seq.records.size() || seq.records[i + 1].input.kind != InputKind::Sos2 ||
            seq.records[i + 1].input.from != r.output.vertex)
          throw malformed(i, "SOS must be followed by SOS2 carrying the first vertex");
        ++stats.components;
        stats.faces_per_component.push_back(0);
        stats.stops_per_component.push_back(0);
        component_edges = 0;
        break;
      case InputKind::Sos2:
        if (i == 0 || seq.records[i - 1].input.kind != InputKind::Sos)
          throw malformed(i, "SOS2 must follow SOS");
        break;
      case InputKind::Edge:
        if (stats.components == 0) throw malformed(i, "edge before the first SOS");
        ++stats.traversal_records;
        ++component_edges;
        if (r.output.kind == OutputKind::Vertex) {
          ++stats.faces;
          ++stats.faces_per_component.back();
        } else {
          ++stats.stops;
          ++stats.stops_per_component.back();
        }
        break;
    }
  }
  throw malformed(seq.records.size(), "missing terminal EOS");
}

}  // namespace tmts
